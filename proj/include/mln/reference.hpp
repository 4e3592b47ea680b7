#pragma once

#include "mln/field.hpp"
#include "mln/kernels.hpp"

// Serial reference implementations of every nonlocal kernel as plain O(M^2)
// double sums over node pairs.  These are the ground truth the FFT paths are
// tested and benchmarked against; keep them obvious and single-threaded.
namespace mln::ref {

double dirichlet_energy(const Field& u);

double gagliardo_sq(const Field& u, const KernelTable& gag);

// D(x) = sum_y K(x-y) w(y) h^n
Field riesz_potential(const Field& w, const KernelTable& riesz);

Field apply_mixed(const Field& u, const KernelTable& gag);

double hl_pair(const Field& u, const KernelTable& riesz, double two_mu_star);

}  // namespace mln::ref
