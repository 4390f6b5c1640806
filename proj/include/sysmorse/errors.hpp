#pragma once

#include <stdexcept>
#include <string>

namespace sysmorse {

// Domain failure modes surfaced by the library. CLI maps domain errors to
// exit code 2 and convergence failures to exit code 3.
enum class errc {
    negative_discriminant,
    non_hyperbolic,
    cutoff_too_small,
    branch_singularity,
    degenerate_constraint,
    retraction_diverged,
    normalization_stalled,
    invalid_T,
    cutoff_cap_exceeded,
    degenerate_input,
    tolerance_ambiguous,
    perpendicular_input,
    not_semi_eutactic,
    not_eutactic,
    no_convergence,
    degenerate_hessian,
    not_converged,
    basis_degenerate,
    step_collapse,
    insufficient_samples,
    shape_mismatch,
    precondition,
};

const char* errc_name(errc c);

class error : public std::runtime_error {
  public:
    error(errc code, const std::string& what)
        : std::runtime_error(std::string(errc_name(code)) + ": " + what), code_(code) {}
    errc code() const { return code_; }

    // true for iteration-cap style failures (CLI exit code 3)
    bool is_convergence_failure() const {
        return code_ == errc::no_convergence || code_ == errc::not_converged ||
               code_ == errc::retraction_diverged || code_ == errc::normalization_stalled ||
               code_ == errc::step_collapse;
    }

  private:
    errc code_;
};

} // namespace sysmorse
