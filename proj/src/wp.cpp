#include "sysmorse/wp.hpp"

#include <cmath>
#include <numbers>

#include "sysmorse/syst.hpp"

namespace sysmorse {

namespace {

struct Mat2 {
    // row-major 2x2 real matrix with unit determinant
    double a, b, c, d;
    Mat2 operator*(const Mat2& o) const {
        return {a * o.a + b * o.c, a * o.b + b * o.d, c * o.a + d * o.c, c * o.b + d * o.d};
    }
    Mat2 inverse_unit_det() const { return {d, -b, -c, a}; }
};

// Holonomy pair with tr A = x, tr B = y, tr AB = z and A diagonalized
// (axis of A is the imaginary axis).
struct HolonomyPair {
    Mat2 A, B;
};

HolonomyPair holonomy_pair(double x, double y, double z) {
    double lam = (x + std::sqrt(x * x - 4.0)) / 2.0;
    double p = (z - y / lam) / (lam - 1.0 / lam);
    double s = y - p;
    return {{lam, 0.0, 0.0, 1.0 / lam}, {p, 1.0, p * s - 1.0, s}};
}

// Inversive distance between axis(A) = (0,inf) and axis(g): for g = (a b; c d)
// with tr g = x, u = |a - d| / sqrt(x^2 - 4). u > 1 for disjoint axes.
double inversive_u(const Mat2& g, double denom) { return std::abs(g.a - g.d) / denom; }

// Riera summand for disjoint axes: u log((u+1)/(u-1)) - 2, series for large u.
double riera_term(double u) {
    if (u <= 1.0 + 1e-12) return 0.0; // touching axes cannot occur for a simple curve
    if (u > 1e4) {
        double iu2 = 1.0 / (u * u);
        return iu2 * (2.0 / 3.0 + iu2 * (2.0 / 5.0 + iu2 * (2.0 / 7.0)));
    }
    return u * std::log1p(2.0 / (u - 1.0)) - 2.0;
}

} // namespace

RieraSum riera_self_pairing(double x, double y, double z, int trunc) {
    if (!(x > 2.0)) throw error(errc::non_hyperbolic, "pairing curve has trace <= 2");
    if (trunc < 1) throw error(errc::precondition, "need trunc >= 1");
    HolonomyPair h = holonomy_pair(x, y, z);
    const Mat2 letters[4] = {h.A, h.A.inverse_unit_det(), h.B, h.B.inverse_unit_det()};
    auto inverse_letter = [](int i) { return i ^ 1; };

    const double denom = std::sqrt(x * x - 4.0);
    const double l = length_of_trace(x);

    // double-coset representatives of <A>\Gamma/<A>: reduced words with no
    // A^{+-1} at either end; enumerated breadth-first by word length
    struct Node {
        Mat2 M;
        int last;
    };
    std::vector<Node> level;
    level.push_back({letters[2], 2});
    level.push_back({letters[3], 3});

    double total = 0.0;
    double prev_shell = 0.0, shell = 0.0;
    int used = 0;
    bool converged = false;
    for (int len = 1; len <= trunc; ++len) {
        prev_shell = shell;
        shell = 0.0;
        for (const auto& n : level) {
            if (n.last == 2 || n.last == 3) {
                Mat2 g = (n.M * h.A) * n.M.inverse_unit_det();
                shell += riera_term(inversive_u(g, denom));
            }
        }
        total += shell;
        used = len;
        if (len >= 4 && total > 0 && (shell + prev_shell) < tol::wp_shell_stop * total) {
            converged = true;
            break;
        }
        if (len == trunc) break;
        std::vector<Node> next;
        next.reserve(level.size() * 3);
        for (const auto& n : level)
            for (int c = 0; c < 4; ++c) {
                if (c == inverse_letter(n.last)) continue;
                next.push_back({n.M * letters[c], c});
            }
        level = std::move(next);
    }
    RieraSum out;
    out.value = (2.0 / std::numbers::pi) * (l + total);
    out.last_shell_fraction = total > 0 ? (shell + prev_shell) / total : 0.0;
    out.shells_used = used;
    out.converged = converged || out.last_shell_fraction < tol::wp_shell_stop;
    return out;
}

namespace {

RieraSum self_pairing_of_slope(const MarkovPoint& p, const Slope& s, int trunc) {
    SeedTriple st = seed_triple_for_slope(p, s);
    return riera_self_pairing(st.t_gamma, st.t_neighbor, st.t_mediant, trunc);
}

struct Probe {
    Slope slope;
    Eigen::Vector2d dir; // unit direction of dl in the frame
    double dl_norm;
};

std::vector<Probe> probe_slopes(const MarkovPoint& p, const TangentFrame& f) {
    double lsys = length_of_trace(std::min({p.x, p.y, p.z}));
    auto ents = enumerate_geodesics(p, lsys + 2.5);
    std::sort(ents.begin(), ents.end(),
              [](const GeodesicEntry& a, const GeodesicEntry& b) { return a.length < b.length; });
    std::vector<Probe> probes;
    for (const auto& e : ents) {
        Eigen::Vector2d u = f.to_frame(e.d_length);
        double nu = u.norm();
        if (nu < 1e-12) continue;
        probes.push_back({e.slope, u / nu, nu});
        if (probes.size() >= 8) break;
    }
    return probes;
}

} // namespace

CoMetric wp_co_metric(const MarkovPoint& p, int trunc) {
    TangentFrame f = tangent_frame(p);
    auto probes = probe_slopes(p, f);
    if (probes.size() < 3) throw error(errc::basis_degenerate, "fewer than three probe directions");

    // greedy triple with the smallest maximal |cos| between directions
    size_t n = probes.size();
    double best = 2.0;
    int bi = 0, bj = 1, bk = 2;
    for (size_t i = 0; i < n; ++i)
        for (size_t j = i + 1; j < n; ++j)
            for (size_t k = j + 1; k < n; ++k) {
                double m = std::max({std::abs(probes[i].dir.dot(probes[j].dir)),
                                     std::abs(probes[i].dir.dot(probes[k].dir)),
                                     std::abs(probes[j].dir.dot(probes[k].dir))});
                if (m < best) {
                    best = m;
                    bi = static_cast<int>(i);
                    bj = static_cast<int>(j);
                    bk = static_cast<int>(k);
                }
            }
    if (best > 0.999) throw error(errc::basis_degenerate, "probe directions collapse to a line");

    CoMetric out;
    auto solve_triple = [&](int i, int j, int k) {
        Eigen::Matrix3d A;
        Eigen::Vector3d rhs;
        int idx[3] = {i, j, k};
        double worst_shell = 0.0;
        for (int r = 0; r < 3; ++r) {
            const Probe& pr = probes[idx[r]];
            A(r, 0) = pr.dir[0] * pr.dir[0];
            A(r, 1) = 2 * pr.dir[0] * pr.dir[1];
            A(r, 2) = pr.dir[1] * pr.dir[1];
            RieraSum rs = self_pairing_of_slope(p, pr.slope, trunc);
            rhs[r] = rs.value / (pr.dl_norm * pr.dl_norm);
            worst_shell = std::max(worst_shell, rs.last_shell_fraction);
        }
        Eigen::Vector3d g = A.fullPivLu().solve(rhs);
        Eigen::Matrix2d G;
        G << g[0], g[1], g[1], g[2];
        return std::make_pair(G, worst_shell);
    };

    auto [G, shell] = solve_triple(bi, bj, bk);
    out.last_shell_fraction = shell;
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(G);
    if (es.eigenvalues()[0] <= 0) {
        // fall back to the isotropic metric of the shortest curve; keeps the
        // boundary decay law intact since the pinching direction dominates
        const Probe& pr = probes[0];
        RieraSum rs = self_pairing_of_slope(p, pr.slope, trunc);
        G = (rs.value / (pr.dl_norm * pr.dl_norm)) * Eigen::Matrix2d::Identity();
    }
    out.G = G;

    // held-out consistency check on a direction outside the solved triple
    for (size_t i = 0; i < n; ++i) {
        if (static_cast<int>(i) == bi || static_cast<int>(i) == bj || static_cast<int>(i) == bk)
            continue;
        const Probe& pr = probes[i];
        RieraSum rs = self_pairing_of_slope(p, pr.slope, trunc);
        double fitted = pr.dir.dot(out.G * pr.dir) * pr.dl_norm * pr.dl_norm;
        out.fit_check = std::abs(fitted - rs.value) / std::max(1e-300, rs.value);
        break;
    }
    return out;
}

double wp_pairing(const MarkovPoint& p, const Slope& a, const Slope& b, int trunc) {
    if (a == b) {
        RieraSum rs = self_pairing_of_slope(p, a, trunc);
        if (!rs.converged)
            throw error(errc::not_converged, "last shell above 1% of the total at the cap");
        return rs.value;
    }
    return wp_pairing_matrix(p, a, b, trunc).gram(0, 1);
}

PairingMatrix wp_pairing_matrix(const MarkovPoint& p, const Slope& a, const Slope& b, int trunc) {
    PairingMatrix pm;
    pm.a = a;
    pm.b = b;
    pm.frame = tangent_frame(p);
    pm.truncation = trunc;

    // length differentials of the two basis slopes
    auto dl_of = [&](const Slope& s) -> Eigen::Vector2d {
        double lsys = length_of_trace(std::min({p.x, p.y, p.z}));
        for (double L = lsys + 2.0; L < 64.0; L *= 1.6) {
            for (const auto& e : enumerate_geodesics(p, L))
                if (e.slope == s) return pm.frame.to_frame(e.d_length);
        }
        throw error(errc::precondition, "basis slope not found below cutoff");
    };
    pm.dl_a = dl_of(a);
    pm.dl_b = dl_of(b);

    CoMetric cm = wp_co_metric(p, trunc);
    pm.last_shell_fraction = cm.last_shell_fraction;
    pm.gram(0, 0) = pm.dl_a.dot(cm.G * pm.dl_a);
    pm.gram(1, 1) = pm.dl_b.dot(cm.G * pm.dl_b);
    pm.gram(0, 1) = pm.gram(1, 0) = pm.dl_a.dot(cm.G * pm.dl_b);
    pm.monotone_lower = true; // underlying Riera sums are positive-term series

    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2d> es(pm.gram);
    if (!(es.eigenvalues()[0] > 0))
        throw error(errc::basis_degenerate, "pairing matrix is not positive definite");
    return pm;
}

Eigen::Vector2d wp_gradient(const MarkovPoint& p, const Eigen::Vector2d& covector,
                            const PairingMatrix& gram) {
    (void)p;
    Eigen::Matrix2d U;
    U.row(0) = gram.dl_a.transpose();
    U.row(1) = gram.dl_b.transpose();
    Eigen::JacobiSVD<Eigen::Matrix2d> svd(U, Eigen::ComputeFullU | Eigen::ComputeFullV);
    double cond = svd.singularValues()[0] / std::max(svd.singularValues()[1], 1e-300);
    if (cond > tol::wp_cond_max)
        throw error(errc::basis_degenerate, "basis differentials are nearly parallel");
    Eigen::Matrix2d Uinv = svd.solve(Eigen::Matrix2d::Identity());
    Eigen::Matrix2d Gco = Uinv * gram.gram * Uinv.transpose();
    return Gco * covector;
}

} // namespace sysmorse
