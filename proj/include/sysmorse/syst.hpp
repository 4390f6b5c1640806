#pragma once

#include <optional>
#include <vector>

#include "sysmorse/markov.hpp"

namespace sysmorse {

// Parameters of the smoothed systole family. T must lie in (0,1); tail_tol
// bounds the certified truncation error of the value (in length units).
struct SystParams {
    double T = 0.1;
    double tail_tol = 1e-9;
    double cutoff_cap = 40.0;

    void validate() const {
        if (!(T > 0.0) || !(T < 1.0)) throw error(errc::invalid_T, "need 0 < T < 1");
        if (!(tail_tol > 0.0)) throw error(errc::invalid_T, "need tail_tol > 0");
    }
};

struct SystValue {
    double value = 0;       // -T log sum exp(-l/T) over enumerated geodesics
    int count = 0;          // geodesics summed
    double cutoff_used = 0; // enumeration length cutoff
    double tail_bound = 0;  // certified bound on the truncation error of value
};

struct SystGradient {
    Vec3 ambient = Vec3::Zero();          // softmax average of the d_length covectors
    Eigen::Vector2d tangent;              // components in the tangent frame
    TangentFrame frame;
    double tail_bound = 0;                // bound on the dropped gradient mass
    SystValue value;
};

struct Systole {
    double value = 0;
    std::vector<Slope> minimizers;
};

Systole systole(const MarkovPoint& p);
double second_systole(const MarkovPoint& p);

SystValue syst_eval(const MarkovPoint& p, const SystParams& params);
SystGradient syst_grad(const MarkovPoint& p, const SystParams& params);

// Hessian of syst restricted to the Markov variety, in tangent-frame
// coordinates: softmax combination of the length Hessians, the (negative)
// covariance term scaled by 1/T, and the normal-multiplier curvature
// correction lambda * Hess(residual).
Eigen::Matrix2d syst_hessian(const MarkovPoint& p, const SystParams& params);

// sys - syst computed in a cancellation-free way:
// T log( sum_gamma exp(-(l_gamma - sys)/T) ).
double syst_gap_to_sys(const MarkovPoint& p, const SystParams& params);

// A nodal surface: s pinched nodes plus components, each either carrying no
// simple closed geodesics (a thrice-punctured sphere) or contributing its own
// syst value.
struct NodalSurface {
    int nodes = 1;
    std::vector<std::optional<double>> component_syst; // nullopt = no geodesics
};

// -T log( s + sum_i exp(-syst(X_i)/T) )
double syst_nodal_eval(const NodalSurface& n, double T);

// Eigenvalues of the boundary-chart Hessian of a nodal critical point:
// each node contributes the pair {2, 2} in the (k, k tau) directions, and
// each component contributes its own stratum spectrum.
std::vector<double> nodal_hessian_spectrum(const std::vector<std::vector<double>>& component_spectra,
                                           int nodes);

} // namespace sysmorse
