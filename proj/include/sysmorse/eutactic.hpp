#pragma once

#include <Eigen/Dense>
#include <set>
#include <vector>

#include "sysmorse/markov.hpp"

namespace sysmorse {

// Finite configuration of nonzero vectors; for surface points these are the
// minimal length differentials in tangent-frame coordinates.
struct VectorConfig {
    std::vector<Eigen::VectorXd> vectors;
    int dim = 0;

    void validate() const;
    Eigen::MatrixXd matrix() const; // rows = vectors
};

enum class EutKind { eutactic, semi_eutactic, biased };
const char* eut_kind_name(EutKind k);

struct EutClass {
    EutKind kind = EutKind::biased;
    // eutactic: strictly positive coefficients with sum_i a_i v_i = 0
    // semi_eutactic: nonnegative, not all zero, with sum_i a_i v_i = 0
    std::vector<double> coeffs;
    // biased: unit tau in span with <v_i,tau> > 0 for all i
    // semi_eutactic: supporting unit tau with min_i <v_i,tau> = 0
    Eigen::VectorXd tau;
};

enum class EutBackend { floating, exact_rational };

// Decides whether the origin lies in the relative interior, relative
// boundary, or outside of conv{v_i} within span{v_i}. The floating backend
// uses two linear programs with margin tol::lp_margin and throws
// tolerance_ambiguous when neither side certifies; the exact backend runs the
// same programs in rational arithmetic.
EutClass classify(const VectorConfig& c, EutBackend backend = EutBackend::floating);

// max over unit tau in span of min_i <v_i, tau>; negative iff eutactic,
// zero iff semi-eutactic, positive iff biased.
double minimax_score(const VectorConfig& c);

// numerical rank of the vector list
int eutactic_rank(const VectorConfig& c);

// argmax index set of <v_i, proj_span(tau)> within tolerance
std::set<int> fan_J(const VectorConfig& c, const Eigen::VectorXd& tau);

struct SemiSplit {
    std::set<int> eutactic_part; // maximal subset whose hull face contains 0
    std::set<int> biased_part;
};
SemiSplit semi_eutactic_split(const VectorConfig& c);

struct SurfaceClass {
    EutClass cls;
    int rank = 0;
    VectorConfig config; // minimal gradients in tangent-frame coordinates
};
SurfaceClass surface_classify(const MarkovPoint& p);

// true when the witness reproduces its kind within tolerance
bool verify_witness(const VectorConfig& c, const EutClass& cls, double tolerance = 1e-9);

} // namespace sysmorse
