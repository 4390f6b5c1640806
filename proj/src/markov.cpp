#include "sysmorse/markov.hpp"

#include <algorithm>
#include <cmath>
#include <deque>
#include <numeric>
#include <unordered_map>

namespace sysmorse {

Slope Slope::make(std::int64_t p, std::int64_t q) {
    if (q < 0) { p = -p; q = -q; }
    if (q == 0) return {1, 0};
    std::int64_t g = std::gcd(p < 0 ? -p : p, q);
    if (g == 0) throw error(errc::degenerate_input, "slope (0,0)");
    return {p / g, q / g};
}

bool slope_less(const Slope& a, const Slope& b) {
    if (a == b) return false;
    if (a.q == 0) return false; // infinity is largest
    if (b.q == 0) return true;
    // compare p1/q1 < p2/q2 with q > 0
    return a.p * b.q < b.p * a.q;
}

double markov_residual(double x, double y, double z) { return x * x + y * y + z * z - x * y * z; }

Vec3 residual_gradient(const MarkovPoint& p) {
    return {2 * p.x - p.y * p.z, 2 * p.y - p.x * p.z, 2 * p.z - p.x * p.y};
}

Mat3 residual_hessian(const MarkovPoint& p) {
    Mat3 h;
    h << 2, -p.z, -p.y,
        -p.z, 2, -p.x,
        -p.y, -p.x, 2;
    return h;
}

double length_of_trace(double t) {
    if (t <= 2.0) throw error(errc::non_hyperbolic, "trace <= 2");
    return 2.0 * std::acosh(t / 2.0);
}

double dlength_dtrace(double t) { return 1.0 / std::sqrt(t * t / 4.0 - 1.0); }

double d2length_dtrace2(double t) {
    double s = t * t / 4.0 - 1.0;
    return -(t / 4.0) / (s * std::sqrt(s));
}

MarkovPoint point_from_xy(double x, double y, Branch branch) {
    if (!(x > 2.0) || !(y > 2.0)) throw error(errc::non_hyperbolic, "need x,y > 2");
    double disc = x * x * y * y - 4.0 * (x * x + y * y);
    if (disc < 0) throw error(errc::negative_discriminant, "x^2 y^2 < 4(x^2+y^2)");
    double z = (branch == Branch::upper) ? (x * y + std::sqrt(disc)) / 2.0
                                         : (x * y - std::sqrt(disc)) / 2.0;
    if (z <= 2.0) throw error(errc::non_hyperbolic, "resulting z <= 2");
    return {x, y, z};
}

MarkovPoint retract(const Vec3& raw) {
    Vec3 q = raw;
    for (int it = 0; it < tol::retraction_max_iter; ++it) {
        double r = markov_residual(q[0], q[1], q[2]);
        if (std::abs(r) < tol::constraint_residual) {
            MarkovPoint p = MarkovPoint::from_coords(q);
            if (!(p.x > 2 && p.y > 2 && p.z > 2))
                throw error(errc::non_hyperbolic, "retraction left the hyperbolic region");
            return p;
        }
        Vec3 g = residual_gradient(MarkovPoint::from_coords(q));
        double g2 = g.squaredNorm();
        if (g2 < 1e-14) throw error(errc::retraction_diverged, "flat constraint gradient");
        q -= (r / g2) * g;
    }
    throw error(errc::retraction_diverged, "no convergence in Newton retraction");
}

TangentFrame tangent_frame(const MarkovPoint& p) {
    Vec3 g = residual_gradient(p);
    double gn = g.norm();
    if (gn < 1e-12) throw error(errc::degenerate_constraint, "constraint gradient vanished");
    Vec3 n = g / gn;
    // fixed seed order keeps repeated calls bitwise identical
    Vec3 e1 = Vec3::UnitX() - n[0] * n;
    if (e1.norm() < 0.1) e1 = Vec3::UnitY() - n[1] * n;
    e1.normalize();
    Vec3 e2 = n.cross(e1);
    return {p, e1, e2, n};
}

NormalizeResult normalize_to_fundamental_domain(const MarkovPoint& p) {
    double a = p.x, b = p.y, c = p.z;
    int moves = 0;
    for (int it = 0; it < tol::normalization_max_iter; ++it) {
        if (a > b) std::swap(a, b);
        if (b > c) std::swap(b, c);
        if (a > b) std::swap(a, b);
        double flipped = a * b - c;
        if (c <= flipped + 1e-15) {
            if (!(a > 2.0)) throw error(errc::non_hyperbolic, "normalized trace <= 2");
            return {{a, b, c}, moves};
        }
        c = flipped;
        ++moves;
    }
    throw error(errc::normalization_stalled, "fundamental domain reduction did not terminate");
}

namespace {

// vertex payload for the Farey flip recursion
struct VertData {
    double t;
    Vec3 g;
    Mat3 H;
};

struct SlopeHash {
    size_t operator()(const Slope& s) const {
        return std::hash<std::int64_t>()(s.p * 0x9e3779b97f4a7c15ll ^ s.q);
    }
};

VertData flip(const VertData& a, const VertData& b, const VertData& c, bool second) {
    VertData n;
    n.t = a.t * b.t - c.t;
    n.g = a.t * b.g + b.t * a.g - c.g;
    if (second)
        n.H = a.t * b.H + b.t * a.H + a.g * b.g.transpose() + b.g * a.g.transpose() - c.H;
    else
        n.H = Mat3::Zero();
    return n;
}

// two Farey neighbors across edge (a,b); exactly one equals the old third vertex
std::pair<Slope, Slope> third_vertices(const Slope& a, const Slope& b) {
    return {Slope::make(a.p + b.p, a.q + b.q), Slope::make(a.p - b.p, a.q - b.q)};
}

Slope other_third(const Slope& a, const Slope& b, const Slope& c) {
    auto [c1, c2] = third_vertices(a, b);
    return c1 == c ? c2 : c1;
}

} // namespace

std::vector<GeodesicEntry> enumerate_geodesics(const MarkovPoint& p, double length_cutoff,
                                               const EnumerateOptions& opts) {
    const bool second = opts.with_hessian;
    const double trace_cutoff = 2.0 * std::cosh(length_cutoff / 2.0);

    std::unordered_map<Slope, VertData, SlopeHash> verts;
    verts.reserve(256);
    verts[{1, 0}] = {p.x, Vec3::UnitX(), Mat3::Zero()};
    verts[{0, 1}] = {p.y, Vec3::UnitY(), Mat3::Zero()};
    verts[{1, 1}] = {p.z, Vec3::UnitZ(), Mat3::Zero()};

    // reduction walk: flip any vertex whose replacement has strictly smaller
    // trace, until the triangle is locally minimal. From there every outward
    // flip increases traces, which justifies the pruning below.
    Slope tri[3] = {{1, 0}, {0, 1}, {1, 1}};
    for (int it = 0; it < tol::normalization_max_iter; ++it) {
        bool moved = false;
        for (int i = 0; i < 3 && !moved; ++i) {
            const Slope &a = tri[(i + 1) % 3], &b = tri[(i + 2) % 3], &c = tri[i];
            double tn = verts[a].t * verts[b].t - verts[c].t;
            if (tn < verts[c].t - 1e-14) {
                Slope cn = other_third(a, b, c);
                if (!verts.count(cn)) verts[cn] = flip(verts[a], verts[b], verts[c], second);
                tri[i] = cn;
                moved = true;
            }
        }
        if (!moved) break;
    }

    // outward expansion; an edge is expanded only while its immediate new
    // trace stays below the cutoff (all deeper descendants are larger)
    struct Edge {
        Slope a, b, far;
    };
    std::deque<Edge> queue;
    for (int i = 0; i < 3; ++i) queue.push_back({tri[(i + 1) % 3], tri[(i + 2) % 3], tri[i]});
    while (!queue.empty()) {
        Edge e = queue.front();
        queue.pop_front();
        double tn = verts[e.a].t * verts[e.b].t - verts[e.far].t;
        if (tn > trace_cutoff) continue;
        Slope cn = other_third(e.a, e.b, e.far);
        if (!verts.count(cn)) verts[cn] = flip(verts[e.a], verts[e.b], verts[e.far], second);
        queue.push_back({e.a, cn, e.b});
        queue.push_back({e.b, cn, e.a});
    }

    std::vector<GeodesicEntry> out;
    out.reserve(verts.size());
    for (const auto& [s, v] : verts) {
        if (v.t > trace_cutoff) continue;
        GeodesicEntry ge;
        ge.slope = s;
        ge.trace = v.t;
        ge.length = length_of_trace(v.t);
        ge.d_trace = v.g;
        double dl = dlength_dtrace(v.t);
        ge.d_length = dl * v.g;
        if (second) {
            ge.has_hessian = true;
            ge.trace_hessian = v.H;
            ge.length_hessian = d2length_dtrace2(v.t) * v.g * v.g.transpose() + dl * v.H;
        }
        out.push_back(std::move(ge));
    }
    if (out.empty()) throw error(errc::cutoff_too_small, "no geodesic below the length cutoff");
    std::sort(out.begin(), out.end(),
              [](const GeodesicEntry& l, const GeodesicEntry& r) { return slope_less(l.slope, r.slope); });
    return out;
}

Eigen::Vector2d chart_xy_gradient(const MarkovPoint& p, const GeodesicEntry& e) {
    double denom = 2 * p.z - p.x * p.y;
    if (std::abs(denom) < 1e-9 * std::max(1.0, std::abs(p.x * p.y)))
        throw error(errc::branch_singularity, "2z = xy fold; use the ambient frame");
    double dzdx = (p.y * p.z - 2 * p.x) / denom;
    double dzdy = (p.x * p.z - 2 * p.y) / denom;
    return {e.d_length[0] + e.d_length[2] * dzdx, e.d_length[1] + e.d_length[2] * dzdy};
}

SeedTriple seed_triple_for_slope(const MarkovPoint& p, const Slope& s) {
    // negative slopes: (p,q) -> (-p,q) under the involution z -> xy - z
    if (s.p < 0) {
        MarkovPoint q{p.x, p.y, p.x * p.y - p.z};
        return seed_triple_for_slope(q, Slope::make(-s.p, s.q));
    }
    if (s == Slope{1, 0}) return {p.x, p.y, p.z};
    if (s == Slope{0, 1}) return {p.y, p.x, p.z};
    if (s == Slope{1, 1}) return {p.z, p.x, p.x * p.z - p.y}; // neighbor inf, mediant (2,1)

    // Stern-Brocot descent between L=0/1 and R=1/0. Invariant: tm is the
    // trace of the current mediant, tf the trace of the far vertex of the
    // (L,R) edge, so children mediants follow from one flip each.
    Slope L{0, 1}, R{1, 0}, M{1, 1};
    double tL = p.y, tR = p.x, tM = p.z;
    for (int it = 0; it < 512; ++it) {
        if (s == M) {
            // triangle (M, R, mediant(M,R)); t(mediant) = tM*tR - tL
            return {tM, tR, tM * tR - tL};
        }
        // descend toward s: is s between L and M, or M and R? (values p/q)
        // s < M  <=>  s.p*M.q - M.p*s.q < 0
        bool left = (s.p * M.q - M.p * s.q) < 0;
        if (left) {
            double tNew = tL * tM - tR; // flip across (L,M), far = R
            R = M; tR = tM;
            M = Slope::make(L.p + R.p, L.q + R.q);
            tM = tNew;
        } else {
            double tNew = tM * tR - tL; // flip across (M,R), far = L
            L = M; tL = tM;
            M = Slope::make(L.p + R.p, L.q + R.q);
            tM = tNew;
        }
    }
    throw error(errc::precondition, "slope walk did not terminate");
}

} // namespace sysmorse
