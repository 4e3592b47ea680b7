#pragma once

#include "mln/field.hpp"
#include "mln/kernels.hpp"

namespace mln {

// Discrete Dirichlet energy: sum over lattice links of (u_i - u_j)^2 h^{n-2},
// each link once.  For domain masks the links into the zero exterior are
// included (the mask is the Dirichlet condition); wholebox masks drop the
// box-boundary links (open truncation of a whole-space integrand).
double dirichlet_energy(const Field& u);

// Gagliardo seminorm squared of order s:
//   (C/2) h^{2n} sum_{z!=0} W(z) sum_x (u(x)-u(x+z))^2  +  C T sum_x u^2 h^n
// evaluated through one padded FFT convolution.  The tail term applies to
// domain masks only, matching its derivation from u == 0 outside the box.
double gagliardo_sq(const Field& u, const KernelTable& gag);

double mixed_norm_sq(const Field& u, const KernelTable& gag);

// Riesz representer of the mixed form against the lumped mass h^n:
//   <apply_mixed(u), v> h^n = a(u, v) for all admissible v.
// Requires a domain mask (the representer of the open form is not used).
Field apply_mixed(const Field& u, const KernelTable& gag);

// The same with the two parts switchable; used by the eigensolvers and the
// manufactured Pohozaev checks.
struct MixedOperator {
    MaskPtr mask;
    TablePtr gag;      // may be null when include_fractional is false
    bool include_local = true;
    bool include_fractional = true;

    Field apply(const Field& u) const;
    double energy(const Field& u) const;  // a(u,u)
    // real r2c symbol of the unmasked (translation invariant) operator on the
    // padded torus; preconditioner fodder
    std::vector<double> circulant_symbol() const;
};

// Conjugate gradients on the masked SPD operator with the circulant
// preconditioner.  Returns the iterate with relative residual <= tol (or the
// best one after maxit).
Field cg_solve(const MixedOperator& op, const std::vector<double>& symbol,
               const Field& rhs, double tol, int maxit);

}  // namespace mln
