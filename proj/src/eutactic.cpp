#include "sysmorse/eutactic.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <functional>

#include "simplex.hpp"
#include "sysmorse/syst.hpp"

namespace sysmorse {

using Rational = boost::rational<boost::multiprecision::cpp_int>;

namespace {

Rational to_rational(double v) {
    if (v == 0.0) return Rational(0);
    int exp = 0;
    double m = std::frexp(v, &exp); // v = m * 2^exp, |m| in [0.5,1)
    std::int64_t mi = static_cast<std::int64_t>(std::ldexp(m, 53));
    exp -= 53;
    boost::multiprecision::cpp_int num(mi), den(1);
    if (exp >= 0)
        num <<= exp;
    else
        den <<= -exp;
    return Rational(num, den);
}

double to_double(const Rational& r) {
    return static_cast<double>(r.numerator()) / static_cast<double>(r.denominator());
}

// maximize m subject to  sum_i a_i v_i = 0, sum_i a_i = 1, a_i >= m.
// standard form vars: a (n), mp, mm, s (n) with a_i - mp + mm - s_i = 0.
template <class S>
detail::LpResult<S> eutactic_lp(const std::vector<std::vector<S>>& vecs, int dim) {
    size_t n = vecs.size();
    size_t nv = n + 2 + n;
    std::vector<std::vector<S>> A;
    std::vector<S> b;
    for (int r = 0; r < dim; ++r) {
        std::vector<S> row(nv, S(0));
        for (size_t i = 0; i < n; ++i) row[i] = vecs[i][r];
        A.push_back(row);
        b.push_back(S(0));
    }
    std::vector<S> ones(nv, S(0));
    for (size_t i = 0; i < n; ++i) ones[i] = S(1);
    A.push_back(ones);
    b.push_back(S(1));
    for (size_t i = 0; i < n; ++i) {
        std::vector<S> row(nv, S(0));
        row[i] = S(1);
        row[n] = S(-1);
        row[n + 1] = S(1);
        row[n + 2 + i] = S(-1);
        A.push_back(row);
        b.push_back(S(0));
    }
    std::vector<S> c(nv, S(0));
    c[n] = S(-1); // minimize -(mp - mm)
    c[n + 1] = S(1);
    return detail::Simplex<S>(std::move(A), std::move(b), std::move(c)).solve();
}

// feasibility of <v_i, tau> >= 1 (tau free): biased iff feasible.
// standard form vars: tp (d), tm (d), s (n);  <v_i,tp-tm> - s_i = 1.
template <class S>
detail::LpResult<S> biased_feasibility_lp(const std::vector<std::vector<S>>& vecs, int dim) {
    size_t n = vecs.size();
    size_t nv = 2 * dim + n;
    std::vector<std::vector<S>> A;
    std::vector<S> b;
    for (size_t i = 0; i < n; ++i) {
        std::vector<S> row(nv, S(0));
        for (int r = 0; r < dim; ++r) {
            row[r] = vecs[i][r];
            row[dim + r] = -vecs[i][r];
        }
        row[2 * dim + i] = S(-1);
        A.push_back(row);
        b.push_back(S(1));
    }
    std::vector<S> c(nv, S(0)); // pure feasibility
    return detail::Simplex<S>(std::move(A), std::move(b), std::move(c)).solve();
}

template <class S>
std::vector<std::vector<S>> convert(const VectorConfig& cfg) {
    std::vector<std::vector<S>> out;
    for (const auto& v : cfg.vectors) {
        std::vector<S> row;
        for (int r = 0; r < cfg.dim; ++r) {
            if constexpr (std::is_same_v<S, double>)
                row.push_back(v[r]);
            else
                row.push_back(to_rational(v[r]));
        }
        out.push_back(std::move(row));
    }
    return out;
}

Eigen::MatrixXd span_basis(const VectorConfig& c) {
    Eigen::MatrixXd M = c.matrix();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(M, Eigen::ComputeFullV);
    int k = 0;
    double smax = svd.singularValues().size() ? svd.singularValues()[0] : 0.0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol::rank_rel * smax) ++k;
    return svd.matrixV().leftCols(std::max(k, 1)); // dim x k, orthonormal columns
}

// cutting-plane LP for max_{|tau|<=1} min_i <v_i,tau> restricted to span;
// valid (equal to the sphere value) when the optimum is positive.
struct BallMinimax {
    double value = 0;
    Eigen::VectorXd tau;
};

BallMinimax ball_minimax(const VectorConfig& cfg) {
    Eigen::MatrixXd B = span_basis(cfg); // d x k
    int k = static_cast<int>(B.cols());
    size_t n = cfg.vectors.size();
    Eigen::MatrixXd W(n, k);
    for (size_t i = 0; i < n; ++i) W.row(i) = (B.transpose() * cfg.vectors[i]).transpose();

    std::vector<Eigen::VectorXd> cuts;
    for (int j = 0; j < k; ++j) {
        cuts.push_back(Eigen::VectorXd::Unit(k, j));
        cuts.push_back(-Eigen::VectorXd::Unit(k, j));
    }
    Eigen::VectorXd t = Eigen::VectorXd::Zero(k);
    double val = 0;
    for (int round = 0; round < 120; ++round) {
        // vars: tp(k), tm(k), mp, mm, s(n + cuts)
        size_t nc = cuts.size();
        size_t nv = 2 * k + 2 + n + nc;
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (size_t i = 0; i < n; ++i) { // <w_i,t> - m - s_i = 0
            std::vector<double> row(nv, 0.0);
            for (int r = 0; r < k; ++r) {
                row[r] = W(i, r);
                row[k + r] = -W(i, r);
            }
            row[2 * k] = -1.0;
            row[2 * k + 1] = 1.0;
            row[2 * k + 2 + i] = -1.0;
            A.push_back(row);
            b.push_back(0.0);
        }
        for (size_t j = 0; j < nc; ++j) { // <u_j,t> + r_j = 1
            std::vector<double> row(nv, 0.0);
            for (int r = 0; r < k; ++r) {
                row[r] = cuts[j][r];
                row[k + r] = -cuts[j][r];
            }
            row[2 * k + 2 + n + j] = 1.0;
            A.push_back(row);
            b.push_back(1.0);
        }
        std::vector<double> c(nv, 0.0);
        c[2 * k] = -1.0;
        c[2 * k + 1] = 1.0;
        auto res = detail::Simplex<double>(A, b, c).solve();
        if (!res.feasible || !res.bounded)
            throw error(errc::tolerance_ambiguous, "minimax LP failed");
        t = Eigen::VectorXd::Zero(k);
        for (int r = 0; r < k; ++r) t[r] = res.x[r] - res.x[k + r];
        val = res.x[2 * k] - res.x[2 * k + 1];
        double nt = t.norm();
        if (nt <= 1.0 + 1e-9) break;
        cuts.push_back(t / nt);
    }
    BallMinimax out;
    out.value = val;
    out.tau = B * t;
    double nt = out.tau.norm();
    if (nt > 1e-12) out.tau /= nt;
    return out;
}

// vertices of P = {tau in span : <v_i,tau> >= -1}; eutactic configs make P a
// polytope and the sphere max-min equals -1 / max_{tau in P} |tau|.
double eutactic_minimax_value(const VectorConfig& cfg) {
    Eigen::MatrixXd B = span_basis(cfg);
    int k = static_cast<int>(B.cols());
    size_t n = cfg.vectors.size();
    Eigen::MatrixXd W(n, k);
    for (size_t i = 0; i < n; ++i) W.row(i) = (B.transpose() * cfg.vectors[i]).transpose();
    std::vector<int> idx(n);
    for (size_t i = 0; i < n; ++i) idx[i] = static_cast<int>(i);
    double best = 0.0;
    std::vector<int> comb(k);
    // enumerate k-subsets of active constraints
    std::function<void(int, int)> rec = [&](int start, int depth) {
        if (depth == k) {
            Eigen::MatrixXd Asub(k, k);
            Eigen::VectorXd bsub = Eigen::VectorXd::Constant(k, -1.0);
            for (int r = 0; r < k; ++r) Asub.row(r) = W.row(comb[r]);
            Eigen::FullPivLU<Eigen::MatrixXd> lu(Asub);
            if (!lu.isInvertible()) return;
            Eigen::VectorXd t = lu.solve(bsub);
            for (size_t i = 0; i < n; ++i)
                if (W.row(i).dot(t) < -1.0 - 1e-9) return;
            best = std::max(best, t.norm());
            return;
        }
        for (int i = start; i <= static_cast<int>(n) - (k - depth); ++i) {
            comb[depth] = i;
            rec(i + 1, depth + 1);
        }
    };
    rec(0, 0);
    if (best <= 0) throw error(errc::tolerance_ambiguous, "no vertex found for eutactic minimax");
    return -1.0 / best;
}

EutClass classify_floating(const VectorConfig& cfg) {
    auto vecs = convert<double>(cfg);
    auto eut = eutactic_lp<double>(vecs, cfg.dim);
    double me = eut.feasible && eut.bounded ? -eut.objective : -1.0;
    if (me > tol::lp_margin) {
        EutClass out;
        out.kind = EutKind::eutactic;
        out.coeffs.assign(eut.x.begin(), eut.x.begin() + cfg.vectors.size());
        return out;
    }
    auto bal = ball_minimax(cfg);
    if (bal.value > tol::lp_margin) {
        EutClass out;
        out.kind = EutKind::biased;
        out.tau = bal.tau;
        return out;
    }
    // semi: need a verifying nonnegative combination and a supporting tau
    EutClass out;
    out.kind = EutKind::semi_eutactic;
    if (eut.feasible) out.coeffs.assign(eut.x.begin(), eut.x.begin() + cfg.vectors.size());
    out.tau = bal.tau;
    if (!verify_witness(cfg, out))
        throw error(errc::tolerance_ambiguous,
                    "both feasibility margins below tolerance and no verifying witness");
    return out;
}

EutClass classify_exact(const VectorConfig& cfg) {
    auto vecs = convert<Rational>(cfg);
    auto eut = eutactic_lp<Rational>(vecs, cfg.dim);
    bool eutactic = eut.feasible && eut.bounded && -eut.objective > Rational(0);
    if (eutactic) {
        EutClass out;
        out.kind = EutKind::eutactic;
        for (size_t i = 0; i < cfg.vectors.size(); ++i) out.coeffs.push_back(to_double(eut.x[i]));
        return out;
    }
    auto bia = biased_feasibility_lp<Rational>(vecs, cfg.dim);
    if (bia.feasible) {
        EutClass out;
        out.kind = EutKind::biased;
        out.tau = Eigen::VectorXd::Zero(cfg.dim);
        for (int r = 0; r < cfg.dim; ++r)
            out.tau[r] = to_double(bia.x[r]) - to_double(bia.x[cfg.dim + r]);
        out.tau.normalize();
        return out;
    }
    EutClass out;
    out.kind = EutKind::semi_eutactic;
    if (eut.feasible)
        for (size_t i = 0; i < cfg.vectors.size(); ++i) out.coeffs.push_back(to_double(eut.x[i]));
    out.tau = ball_minimax(cfg).tau; // supporting functional polished in floating
    return out;
}

} // namespace

void VectorConfig::validate() const {
    if (vectors.empty()) throw error(errc::degenerate_input, "empty configuration");
    for (const auto& v : vectors) {
        if (v.size() != dim) throw error(errc::shape_mismatch, "vector dimension mismatch");
        if (v.norm() <= 1e-12) throw error(errc::degenerate_input, "zero vector in configuration");
    }
}

Eigen::MatrixXd VectorConfig::matrix() const {
    Eigen::MatrixXd M(vectors.size(), dim);
    for (size_t i = 0; i < vectors.size(); ++i) M.row(i) = vectors[i].transpose();
    return M;
}

const char* eut_kind_name(EutKind k) {
    switch (k) {
        case EutKind::eutactic: return "eutactic";
        case EutKind::semi_eutactic: return "semi_eutactic";
        case EutKind::biased: return "biased";
    }
    return "?";
}

EutClass classify(const VectorConfig& c, EutBackend backend) {
    c.validate();
    if (backend == EutBackend::exact_rational) return classify_exact(c);
    return classify_floating(c);
}

double minimax_score(const VectorConfig& c) {
    EutClass cls = classify(c);
    switch (cls.kind) {
        case EutKind::biased: return ball_minimax(c).value;
        case EutKind::semi_eutactic: return 0.0;
        case EutKind::eutactic: return eutactic_minimax_value(c);
    }
    return 0.0;
}

int eutactic_rank(const VectorConfig& c) {
    c.validate();
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(c.matrix());
    double smax = svd.singularValues()[0];
    int k = 0;
    for (int i = 0; i < svd.singularValues().size(); ++i)
        if (svd.singularValues()[i] > tol::rank_rel * smax) ++k;
    return k;
}

std::set<int> fan_J(const VectorConfig& c, const Eigen::VectorXd& tau) {
    c.validate();
    if (tau.size() != c.dim) throw error(errc::shape_mismatch, "tau dimension mismatch");
    Eigen::MatrixXd B = span_basis(c);
    Eigen::VectorXd proj = B * (B.transpose() * tau);
    if (proj.norm() < 1e-12)
        throw error(errc::perpendicular_input, "tau has no component in the span");
    double best = -std::numeric_limits<double>::infinity();
    std::vector<double> vals;
    for (const auto& v : c.vectors) {
        vals.push_back(v.dot(proj));
        best = std::max(best, vals.back());
    }
    std::set<int> J;
    for (size_t i = 0; i < vals.size(); ++i)
        if (vals[i] >= best - tol::lp_margin) J.insert(static_cast<int>(i));
    return J;
}

SemiSplit semi_eutactic_split(const VectorConfig& c) {
    EutClass cls = classify(c);
    if (cls.kind != EutKind::semi_eutactic)
        throw error(errc::not_semi_eutactic, "split requires a semi-eutactic configuration");
    size_t n = c.vectors.size();
    auto vecs = convert<double>(c);
    SemiSplit out;
    // i belongs to the face iff some nonnegative vanishing combination with
    // sum 1 gives it positive weight: maximize a_i over that polytope.
    for (size_t target = 0; target < n; ++target) {
        size_t nv = n;
        std::vector<std::vector<double>> A;
        std::vector<double> b;
        for (int r = 0; r < c.dim; ++r) {
            std::vector<double> row(nv, 0.0);
            for (size_t i = 0; i < n; ++i) row[i] = vecs[i][r];
            A.push_back(row);
            b.push_back(0.0);
        }
        A.push_back(std::vector<double>(nv, 1.0));
        b.push_back(1.0);
        std::vector<double> obj(nv, 0.0);
        obj[target] = -1.0; // maximize a_target
        auto res = detail::Simplex<double>(A, b, obj).solve();
        bool in_face = res.feasible && res.bounded && -res.objective > tol::lp_margin;
        if (in_face)
            out.eutactic_part.insert(static_cast<int>(target));
        else
            out.biased_part.insert(static_cast<int>(target));
    }
    return out;
}

SurfaceClass surface_classify(const MarkovPoint& p) {
    Systole s = systole(p);
    auto ents = enumerate_geodesics(p, s.value + 2 * tol::length_equality);
    TangentFrame f = tangent_frame(p);
    SurfaceClass out;
    out.config.dim = 2;
    for (const auto& e : ents) {
        if (e.length > s.value + tol::length_equality) continue;
        Eigen::Vector2d v = f.to_frame(e.d_length);
        out.config.vectors.push_back(v);
    }
    out.cls = classify(out.config);
    out.rank = eutactic_rank(out.config);
    return out;
}

bool verify_witness(const VectorConfig& c, const EutClass& cls, double tolerance) {
    switch (cls.kind) {
        case EutKind::eutactic: {
            if (cls.coeffs.size() != c.vectors.size()) return false;
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.dim);
            double mn = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < c.vectors.size(); ++i) {
                sum += cls.coeffs[i] * c.vectors[i];
                mn = std::min(mn, cls.coeffs[i]);
            }
            return mn > tolerance / 10 && sum.norm() <= tolerance;
        }
        case EutKind::biased: {
            if (cls.tau.size() != c.dim) return false;
            for (const auto& v : c.vectors)
                if (v.dot(cls.tau) <= tolerance / 10) return false;
            return true;
        }
        case EutKind::semi_eutactic: {
            if (cls.coeffs.size() != c.vectors.size() || cls.tau.size() != c.dim) return false;
            Eigen::VectorXd sum = Eigen::VectorXd::Zero(c.dim);
            double total = 0, mn = std::numeric_limits<double>::infinity();
            for (size_t i = 0; i < c.vectors.size(); ++i) {
                if (cls.coeffs[i] < -tolerance) return false;
                total += cls.coeffs[i];
                sum += cls.coeffs[i] * c.vectors[i];
            }
            if (total <= tolerance || sum.norm() > tolerance) return false;
            for (const auto& v : c.vectors) mn = std::min(mn, v.dot(cls.tau));
            return std::abs(mn) <= tolerance;
        }
    }
    return false;
}

} // namespace sysmorse
