#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <vector>

#include "sysmorse/errors.hpp"
#include "sysmorse/tolerances.hpp"

namespace sysmorse {

using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

// Free-homotopy class of a simple closed curve on the once-punctured torus,
// identified by its slope p/q. Canonical form: gcd(|p|,q)=1, q>=0, and (1,0)
// denotes the slope-infinity curve.
struct Slope {
    std::int64_t p = 1, q = 0;

    static Slope make(std::int64_t p, std::int64_t q);
    static Slope infinity() { return {1, 0}; }

    bool operator==(const Slope&) const = default;
    // mirror under the x<->y trace swap (relabelling of the two generators)
    Slope mirrored() const { return make(q, p); }
};

// total order: by rational value, with infinity largest
bool slope_less(const Slope& a, const Slope& b);

// A point of the Teichmueller space of the once-punctured torus, represented
// by the traces (x,y,z) of the slope-infinity, slope-0 and slope-1 holonomies.
// Valid points satisfy x^2+y^2+z^2 = xyz (up to tol::constraint_residual)
// with x,y,z > 2.
struct MarkovPoint {
    double x = 3, y = 3, z = 3;

    Vec3 coords() const { return {x, y, z}; }
    static MarkovPoint from_coords(const Vec3& v) { return {v[0], v[1], v[2]}; }
};

enum class Branch { lower, upper };

// One simple closed geodesic at a fixed surface: trace, hyperbolic length and
// their derivatives in the ambient (x,y,z) chart. d_length is the covector of
// the length function; trace_hessian/length_hessian are filled only when the
// enumeration is asked for second order data.
struct GeodesicEntry {
    Slope slope;
    double trace = 0;
    double length = 0;
    Vec3 d_trace = Vec3::Zero();
    Vec3 d_length = Vec3::Zero();
    bool has_hessian = false;
    Mat3 trace_hessian = Mat3::Zero();
    Mat3 length_hessian = Mat3::Zero();
};

// Orthonormal basis (ambient-Euclidean) of the tangent plane of the Markov
// variety at a point; e1, e2 are orthogonal to the constraint gradient.
struct TangentFrame {
    MarkovPoint point;
    Vec3 e1, e2;
    Vec3 normal; // unit constraint gradient

    Eigen::Vector2d to_frame(const Vec3& v) const { return {e1.dot(v), e2.dot(v)}; }
    Vec3 from_frame(const Eigen::Vector2d& c) const { return c[0] * e1 + c[1] * e2; }
};

double markov_residual(double x, double y, double z);
inline double markov_residual(const MarkovPoint& p) { return markov_residual(p.x, p.y, p.z); }

Vec3 residual_gradient(const MarkovPoint& p);
Mat3 residual_hessian(const MarkovPoint& p);

// l = 2 arccosh(t/2); throws non_hyperbolic for t <= 2
double length_of_trace(double t);
// dl/dt = 1/sqrt(t^2/4 - 1)
double dlength_dtrace(double t);
double d2length_dtrace2(double t);

// Solve the Markov relation for z given (x,y); branch picks the root.
MarkovPoint point_from_xy(double x, double y, Branch branch);

// Newton projection onto the variety along the constraint gradient.
MarkovPoint retract(const Vec3& raw);

TangentFrame tangent_frame(const MarkovPoint& p);

// Unique representative with 2 < x <= y <= z <= xy - z, reached by sorting
// and Markov moves z -> xy - z. Returns the number of moves applied.
struct NormalizeResult {
    MarkovPoint point;
    int move_count = 0;
};
NormalizeResult normalize_to_fundamental_domain(const MarkovPoint& p);

struct EnumerateOptions {
    bool with_hessian = false;
};

// All simple closed geodesics of length <= length_cutoff, each slope once,
// sorted by slope. Traces come from the Farey flip recursion
// t(new) = t(a) t(b) - t(old) seeded on the base triangle, with derivatives
// propagated through the same recursion.
std::vector<GeodesicEntry> enumerate_geodesics(const MarkovPoint& p, double length_cutoff,
                                               const EnumerateOptions& opts = {});

// Derivative of the implicit z(x,y) chart: dz/dx = (yz-2x)/(2z-xy).
// Throws branch_singularity on the fold locus 2z = xy.
Eigen::Vector2d chart_xy_gradient(const MarkovPoint& p, const GeodesicEntry& e);

// Traces of a Farey triangle with first vertex `s`: (t_s, t_neighbor,
// t_mediant). Used to re-express the surface with `s` as the slope-infinity
// curve (coordinate change by a mapping class).
struct SeedTriple {
    double t_gamma, t_neighbor, t_mediant;
};
SeedTriple seed_triple_for_slope(const MarkovPoint& p, const Slope& s);

} // namespace sysmorse
