#pragma once

#include "sysmorse/markov.hpp"

namespace sysmorse {

// Weil-Petersson pairing of the two basis length gradients, reconstructed
// from truncated Riera sums. Diagonal entries are direct double-coset sums
// (every summand positive, so truncation is a lower bound); off-diagonal
// entries come from the fitted co-metric since distinct slopes on the
// once-punctured torus always intersect.
struct PairingMatrix {
    Slope a, b;
    Eigen::Matrix2d gram;       // <grad l_a, grad l_b>_WP
    Eigen::Vector2d dl_a, dl_b; // length differentials in the tangent frame
    TangentFrame frame;
    int truncation = 0;            // word-length bound
    bool monotone_lower = true;    // diagonal entries increase with truncation
    double last_shell_fraction = 0; // convergence indicator of the worst sum
};

struct RieraSum {
    double value = 0;  // <grad l, grad l>_WP, truncated from below
    double last_shell_fraction = 0;
    int shells_used = 0;
    bool converged = false;
};

// Self-pairing of the slope-infinity curve on the surface with seed traces
// (x,y,z); double cosets enumerated by word length up to `trunc`.
RieraSum riera_self_pairing(double x, double y, double z, int trunc);

// <grad l_a, grad l_b>_WP at p. For a==b this is a direct Riera sum after a
// coordinate change placing the curve at slope infinity; throws
// not_converged when the last shell still moves the total by more than 1%.
double wp_pairing(const MarkovPoint& p, const Slope& a, const Slope& b, int trunc);

PairingMatrix wp_pairing_matrix(const MarkovPoint& p, const Slope& a, const Slope& b, int trunc);

// Inverse metric on the length-differential basis, expressed in the tangent
// frame: fitted from self-pairings of short curves in three well-separated
// directions.
struct CoMetric {
    Eigen::Matrix2d G;           // co-metric in the tangent frame
    double fit_check = 0;        // relative error on a held-out direction
    double last_shell_fraction = 0;
};
CoMetric wp_co_metric(const MarkovPoint& p, int trunc);

// Raise a tangent-frame covector with the basis Gram: returns the metric
// gradient in tangent-frame coordinates.
Eigen::Vector2d wp_gradient(const MarkovPoint& p, const Eigen::Vector2d& covector,
                            const PairingMatrix& gram);

} // namespace sysmorse
