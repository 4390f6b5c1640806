#pragma once

// Central numeric tolerances. Every hard-coded threshold used by the library
// lives here so runs are reproducible and tunable in one place.
namespace sysmorse::tol {

inline constexpr double constraint_residual = 1e-12; // |x^2+y^2+z^2-xyz| after retraction
inline constexpr int    retraction_max_iter = 50;
inline constexpr int    normalization_max_iter = 200;

inline constexpr double length_equality = 1e-9;   // ties in the length spectrum
inline constexpr double derivative_check = 1e-6;  // finite-difference acceptance
inline constexpr double lp_margin = 1e-9;         // eutacticity feasibility margin
inline constexpr double rank_rel = 1e-9;          // singular values below rel*max are zero

inline constexpr double critical_grad = 1e-10;    // tangent gradient norm at critical points
inline constexpr double degeneracy = 1e-8;        // Hessian eigenvalues below this are degenerate
inline constexpr int    newton_max_iter = 200;

inline constexpr double flow_grad_stop = 1e-9;    // flow terminal: critical
inline constexpr double flow_boundary_lmin = 1e-4; // flow terminal: boundary
inline constexpr double flow_min_step = 1e-12;
inline constexpr double flow_monotone_slack = 1e-9;
inline constexpr double orbit_match_dist = 1e-6;  // terminal "at" a critical orbit

inline constexpr double wp_shell_stop = 0.01;     // trailing-shell fraction of the running total
inline constexpr double wp_cond_max = 1e8;        // basis degeneracy in wp_gradient

} // namespace sysmorse::tol
