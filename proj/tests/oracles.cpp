#include "oracles.hpp"

#include <boost/multiprecision/cpp_int.hpp>
#include <boost/rational.hpp>
#include <cmath>
#include <functional>
#include <numeric>

namespace oracles {

using sysmorse::MarkovPoint;
using sysmorse::Vec3;

namespace {

using M2 = Eigen::Matrix2d;

// Christoffel word of slope p/q (p,q >= 0, coprime) by Stern-Brocot descent;
// 'A' = slope infinity generator, 'B' = slope 0.
std::string christoffel(long long p, long long q) {
    if (p == 1 && q == 0) return "A";
    if (p == 0 && q == 1) return "B";
    long long lp = 0, lq = 1, rp = 1, rq = 0;
    std::string wl = "B", wr = "A";
    for (;;) {
        long long mp = lp + rp, mq = lq + rq;
        std::string wm = wl + wr;
        if (mp == p && mq == q) return wm;
        if (p * mq - mp * q < 0) {
            rp = mp;
            rq = mq;
            wr = wm;
        } else {
            lp = mp;
            lq = mq;
            wl = wm;
        }
    }
}

} // namespace

std::map<std::pair<long long, long long>, double> holonomy_census(const MarkovPoint& pt,
                                                                  double trace_cutoff,
                                                                  int word_bound) {
    double lam = (pt.x + std::sqrt(pt.x * pt.x - 4)) / 2;
    M2 A, B;
    A << lam, 0, 0, 1 / lam;
    double bp = (pt.z - pt.y / lam) / (lam - 1 / lam);
    double bs = pt.y - bp;
    B << bp, 1, bp * bs - 1, bs;
    M2 Ai = A.inverse(), Bi = B.inverse();

    std::map<std::pair<long long, long long>, double> out;
    for (long long q = 0; q <= word_bound; ++q) {
        for (long long p = -word_bound; p <= word_bound; ++p) {
            if (q == 0 && p != 1) continue;
            if (q > 0 && std::gcd(p < 0 ? -p : p, q) != 1) continue;
            std::string w = p >= 0 ? christoffel(p, q) : christoffel(-p, q);
            M2 m = M2::Identity();
            for (char ch : w) {
                if (ch == 'A') m = m * (p >= 0 ? A : Ai);
                else m = m * B;
            }
            double tr = std::abs(m.trace());
            if (tr <= trace_cutoff) out[{p, q}] = tr;
        }
    }
    return out;
}

namespace {

using Int = boost::multiprecision::cpp_int;
using Rat = boost::rational<Int>;
using RVec = std::vector<Rat>;

// row-reduce rows in place, returning the rank (exact arithmetic)
int row_reduce(std::vector<RVec>& rows) {
    if (rows.empty()) return 0;
    size_t cols = rows[0].size();
    int rank = 0;
    for (size_t col = 0; col < cols && rank < static_cast<int>(rows.size()); ++col) {
        int sel = -1;
        for (size_t i = rank; i < rows.size(); ++i)
            if (rows[i][col] != Rat(0)) {
                sel = static_cast<int>(i);
                break;
            }
        if (sel < 0) continue;
        std::swap(rows[rank], rows[sel]);
        for (size_t i = 0; i < rows.size(); ++i) {
            if (static_cast<int>(i) == rank || rows[i][col] == Rat(0)) continue;
            Rat f = rows[i][col] / rows[rank][col];
            for (size_t j = 0; j < cols; ++j) rows[i][j] -= f * rows[rank][j];
        }
        ++rank;
    }
    return rank;
}

// coordinates of the configuration in an exact basis of its span
std::vector<RVec> span_coordinates(const std::vector<std::vector<long long>>& vecs, int& dim_out) {
    std::vector<RVec> rows;
    for (const auto& v : vecs) {
        RVec r;
        for (long long x : v) r.push_back(Rat(x));
        rows.push_back(r);
    }
    std::vector<RVec> basis = rows;
    int rank = row_reduce(basis);
    basis.resize(rank);
    dim_out = rank;
    // solve basis^T c = v for each vector (consistent by construction)
    std::vector<RVec> coords;
    size_t d = vecs[0].size();
    for (const auto& v : rows) {
        // augmented system over the basis
        std::vector<RVec> sys;
        for (size_t r = 0; r < d; ++r) {
            RVec row;
            for (int b = 0; b < rank; ++b) row.push_back(basis[b][r]);
            row.push_back(v[r]);
            sys.push_back(row);
        }
        row_reduce(sys);
        RVec c(rank, Rat(0));
        for (int r = 0; r < rank; ++r) {
            // find pivot column of row r
            int piv = -1;
            for (int jcol = 0; jcol < rank; ++jcol)
                if (sys[r][jcol] != Rat(0)) {
                    piv = jcol;
                    break;
                }
            if (piv >= 0) c[piv] = sys[r][rank] / sys[r][piv];
        }
        coords.push_back(c);
    }
    return coords;
}

bool in_hull_exact(const std::vector<RVec>& pts, int dim) {
    int n = static_cast<int>(pts.size());
    // Caratheodory: origin is in the hull iff some affinely independent subset
    // of size <= dim+1 contains it with nonnegative unique weights
    std::vector<int> comb;
    std::function<bool(int, int)> rec = [&](int start, int want) {
        if (want == 0) {
            int k = static_cast<int>(comb.size());
            // solve sum a_i p_i = 0, sum a_i = 1
            std::vector<RVec> sys;
            for (int r = 0; r < dim; ++r) {
                RVec row;
                for (int i : comb) row.push_back(pts[i][r]);
                row.push_back(Rat(0));
                sys.push_back(row);
            }
            RVec ones(k, Rat(1));
            ones.push_back(Rat(1));
            sys.push_back(ones);
            std::vector<RVec> saved = sys;
            int rank = row_reduce(sys);
            if (rank < k) return false; // affinely dependent; smaller subsets cover it
            // read off the unique solution, checking consistency
            RVec a(k, Rat(0));
            for (size_t r = 0; r < sys.size(); ++r) {
                int piv = -1;
                for (int jcol = 0; jcol < k; ++jcol)
                    if (sys[r][jcol] != Rat(0)) {
                        piv = jcol;
                        break;
                    }
                if (piv < 0) {
                    if (sys[r][k] != Rat(0)) return false; // inconsistent
                    continue;
                }
                a[piv] = sys[r][k] / sys[r][piv];
            }
            for (const Rat& ai : a)
                if (ai < Rat(0)) return false;
            return true;
        }
        for (int i = start; i <= n - want; ++i) {
            comb.push_back(i);
            if (rec(i + 1, want - 1)) return true;
            comb.pop_back();
        }
        return false;
    };
    for (int k = 1; k <= dim + 1 && k <= n; ++k) {
        comb.clear();
        if (rec(0, k)) return true;
    }
    return false;
}

// exists nonzero u in the span with <p_i, u> <= 0 for all i?
bool supporting_normal_exists(const std::vector<RVec>& pts, int dim) {
    int n = static_cast<int>(pts.size());
    auto dot = [&](const RVec& a, const RVec& b) {
        Rat s(0);
        for (int i = 0; i < dim; ++i) s += a[i] * b[i];
        return s;
    };
    auto feasible = [&](const RVec& u) {
        bool nonzero = false;
        for (int i = 0; i < dim; ++i)
            if (u[i] != Rat(0)) nonzero = true;
        if (!nonzero) return false;
        for (const auto& p : pts)
            if (dot(p, u) > Rat(0)) return false;
        return true;
    };
    if (dim == 1) {
        RVec up(1, Rat(1)), um(1, Rat(-1));
        return feasible(up) || feasible(um);
    }
    // candidate extreme rays: orthogonal complements of (dim-1)-subsets
    std::vector<int> comb;
    std::function<bool(int, int)> rec = [&](int start, int want) {
        if (want == 0) {
            // nullspace of the chosen rows, must be 1-dimensional
            std::vector<RVec> rows;
            for (int i : comb) {
                RVec r(pts[i].begin(), pts[i].begin() + dim);
                rows.push_back(r);
            }
            std::vector<RVec> red = rows;
            int rank = row_reduce(red);
            if (rank != dim - 1) return false;
            // find u with red * u = 0: assign the free column 1
            red.resize(rank);
            std::vector<bool> is_piv(dim, false);
            std::vector<int> piv_of_row(rank, -1);
            for (int r = 0; r < rank; ++r)
                for (int c = 0; c < dim; ++c)
                    if (red[r][c] != Rat(0)) {
                        piv_of_row[r] = c;
                        is_piv[c] = true;
                        break;
                    }
            int freec = -1;
            for (int c = 0; c < dim; ++c)
                if (!is_piv[c]) {
                    freec = c;
                    break;
                }
            RVec u(dim, Rat(0));
            u[freec] = Rat(1);
            for (int r = rank - 1; r >= 0; --r) {
                Rat s(0);
                for (int c = 0; c < dim; ++c)
                    if (c != piv_of_row[r]) s += red[r][c] * u[c];
                u[piv_of_row[r]] = -s / red[r][piv_of_row[r]];
            }
            if (feasible(u)) return true;
            for (auto& x : u) x = -x;
            return feasible(u);
        }
        for (int i = start; i <= n - want; ++i) {
            comb.push_back(i);
            if (rec(i + 1, want - 1)) return true;
            comb.pop_back();
        }
        return false;
    };
    comb.clear();
    return rec(0, dim - 1);
}

} // namespace

HullClass exact_hull_classify(const std::vector<std::vector<long long>>& vecs) {
    int dim = 0;
    auto coords = span_coordinates(vecs, dim);
    if (!in_hull_exact(coords, dim)) return HullClass::biased;
    if (supporting_normal_exists(coords, dim)) return HullClass::semi_eutactic;
    return HullClass::eutactic;
}

MarkovPoint sample_domain_point(std::mt19937_64& rng, double thick) {
    std::uniform_real_distribution<double> ux(thick, 4.6), uy(0.0, 2.0);
    for (;;) {
        double x = ux(rng);
        double y = x + uy(rng);
        double disc = x * x * y * y - 4 * (x * x + y * y);
        if (disc < 0) continue;
        double z = (x * y - std::sqrt(disc)) / 2;
        if (z <= 2) continue;
        auto norm = sysmorse::normalize_to_fundamental_domain({x, y, z});
        if (norm.point.x > thick) return norm.point;
    }
}

double second_difference(const MarkovPoint& p, const Vec3& u, double h,
                         const std::function<double(const MarkovPoint&)>& f) {
    double fp = f(sysmorse::retract(p.coords() + h * u));
    double f0 = f(p);
    double fm = f(sysmorse::retract(p.coords() - h * u));
    return (fp - 2 * f0 + fm) / (h * h);
}

} // namespace oracles
