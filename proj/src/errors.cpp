#include "sysmorse/errors.hpp"

namespace sysmorse {

const char* errc_name(errc c) {
    switch (c) {
        case errc::negative_discriminant: return "NegativeDiscriminant";
        case errc::non_hyperbolic: return "NonHyperbolic";
        case errc::cutoff_too_small: return "CutoffTooSmall";
        case errc::branch_singularity: return "BranchSingularity";
        case errc::degenerate_constraint: return "DegenerateConstraint";
        case errc::retraction_diverged: return "RetractionDiverged";
        case errc::normalization_stalled: return "NormalizationStalled";
        case errc::invalid_T: return "InvalidT";
        case errc::cutoff_cap_exceeded: return "CutoffCapExceeded";
        case errc::degenerate_input: return "DegenerateInput";
        case errc::tolerance_ambiguous: return "ToleranceAmbiguous";
        case errc::perpendicular_input: return "PerpendicularInput";
        case errc::not_semi_eutactic: return "NotSemiEutactic";
        case errc::not_eutactic: return "NotEutactic";
        case errc::no_convergence: return "NoConvergence";
        case errc::degenerate_hessian: return "DegenerateHessian";
        case errc::not_converged: return "NotConverged";
        case errc::basis_degenerate: return "BasisDegenerate";
        case errc::step_collapse: return "StepCollapse";
        case errc::insufficient_samples: return "InsufficientSamples";
        case errc::shape_mismatch: return "ShapeMismatch";
        case errc::precondition: return "PreconditionViolated";
    }
    return "UnknownError";
}

} // namespace sysmorse
