#pragma once

#include <vector>

#include "mln/grid.hpp"

namespace mln {
struct KernelTable;
}

// Zero-padded linear convolution of a kernel table against box-shaped data,
// via FFTW r2c/c2r transforms on the doubled box.  Padding to 2m per axis
// makes the circular convolution equal to the linear one for all offsets up
// to m-1, so the lattice sums are exact.  Plans are FFTW_ESTIMATE
// (deterministic) and cached per padded size.
namespace mln::fftconv {

// call once per process before the first transform (idempotent)
void init_threads(int nthreads);

// FFT of the kernel values laid out with wraparound on the padded box;
// interleaved complex, r2c layout.
std::vector<double> kernel_spectrum(const KernelTable& table);

// (W * u)(x) = sum_y W(x - y) u(y) over lattice offsets, for x in the box.
// No h^n factor; callers attach measures.
std::vector<double> convolve(const KernelTable& table, const Grid& grid,
                             const std::vector<double>& u);

// Divide the padded transform of r by (symbol + shift) and restrict to the
// box: an approximate inverse of a translation-invariant operator, used as a
// preconditioner.  symbol is a real array over the r2c layout.
std::vector<double> solve_circulant(const Grid& grid, const std::vector<double>& symbol,
                                    double shift, const std::vector<double>& r);

// r2c complex count for the padded box of a grid
index_t padded_complex_count(const Grid& grid);

// real symbol of the 5/7-point Dirichlet stencil on the padded torus
std::vector<double> local_symbol(const Grid& grid);

}  // namespace mln::fftconv
