#pragma once

#include <optional>

#include "sysmorse/eutactic.hpp"
#include "sysmorse/syst.hpp"

namespace sysmorse {

struct CriticalPoint {
    MarkovPoint point; // fundamental-domain representative
    double T = 0;
    double grad_norm = 0;
    Eigen::Vector2d hessian_eigs{0, 0};
    int index = 0;
    std::optional<MarkovPoint> nearest_eutactic;
    double eutactic_distance = 0;
};

// Damped Newton on the tangent-frame gradient with constraint retraction.
CriticalPoint find_critical(const MarkovPoint& start, const SystParams& params);

struct DriftPoint {
    double T;
    double distance; // coordinate distance between p and p_T
    int index;
};

// For each T (decreasing), locate the critical point seeded at the eutactic
// point and report the coordinate drift.
std::vector<DriftPoint> drift_curve(const MarkovPoint& eutactic, const std::vector<double>& T_list,
                                    const SystParams& base_params = {});

// Unique zero of the linearized field Phi_T(v) = sum_i e^{-<g_i,v>/T} g_i
// over the span of the minimal gradients; returned in tangent-frame
// coordinates. The scalar function along any segment is strictly monotone,
// so Newton converges from the origin.
Eigen::Vector2d phi_zero(const MarkovPoint& eutactic, double T);

// Zero of the same field for a synthetic configuration (test hook for the
// exact T-linearity of the zero).
Eigen::VectorXd phi_zero_config(const VectorConfig& c, double T);

// Minimum tangent-gradient norm over a deterministic sample of the
// coordinate annulus between radii rho*T and r_p around the point.
double ring_regularity_scan(const MarkovPoint& eutactic, double T, double rho, double r_p,
                            int samples, const SystParams& base_params = {});

} // namespace sysmorse
