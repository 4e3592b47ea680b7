#pragma once

#include "mln/forms.hpp"

namespace mln {

struct EigenResult {
    double eigenvalue = 0;
    Field eigenfield;      // |.|_2 = 1, single-signed (nonnegative)
    double residual = 0;   // ||A u - lambda u||_2
    int iterations = 0;
    bool converged = false;
};

struct EigenOptions {
    double rel_tol = 1e-8;
    int max_iterations = 10000;
};

// Smallest Dirichlet eigenvalue of the (switchable) mixed operator by
// locally-optimal preconditioned gradient iteration on the Rayleigh quotient.
// Deterministic start from the constant-on-domain field; preconditioner is
// the circulant inverse of the unmasked operator.
EigenResult smallest_eigenvalue(const MixedOperator& op, const EigenOptions& opts = {});

// Convenience wrappers matching the three spectra of interest.
EigenResult first_eigen_fractional(const MaskPtr& mask, const TablePtr& gag,
                                   const EigenOptions& opts = {});
EigenResult first_eigen_mixed(const MaskPtr& mask, const TablePtr& gag,
                              const EigenOptions& opts = {});
EigenResult first_eigen_local(const MaskPtr& mask, const EigenOptions& opts = {});

}  // namespace mln
