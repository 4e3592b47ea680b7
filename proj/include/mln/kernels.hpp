#pragma once

#include <cstdint>
#include <memory>
#include <mutex>
#include <vector>

#include "mln/grid.hpp"

namespace mln {

// Normalization constant of the fractional Laplacian,
//   C(n,s) = ( int_{R^n} (1 - cos z_1)/|z|^{n+2s} dz )^{-1},
// computed by panelled quadrature of the radially reduced integral with an
// integration-by-parts tail.  err_estimate is a relative estimate from panel
// refinement plus the tail bound.
struct FracConstant {
    int n = 0;
    double s = 0;
    double value = 0;
    double err_estimate = 0;
};

FracConstant frac_constant(int n, double s);

// Gamma-function closed form; used as an independent cross-check.
double frac_constant_closed_form(int n, double s);

// Analytic tail of the Gagliardo kernel over the exterior of a ball,
//   int_{|z|>R} |z|^{-n-2s} dz = surface(n) R^{-2s} / (2s).
double gagliardo_ball_tail(int n, double s, double R);

// Tabulated translation-invariant kernel over the offset cube
// {-(m-1)..m-1}^n * h.  kind==riesz: K = |z|^{-mu} with the z=0 entry the
// exact cell average.  kind==gagliardo: W = |z|^{-n-2s}, W(0) = 0, a
// second-order singular correction added to the 2n nearest neighbors, and an
// analytic diagonal tail T for |z| beyond the tabulated cube.
struct KernelTable {
    enum class Kind { riesz, gagliardo };

    KernelTable() = default;
    KernelTable(const KernelTable& o)
        : kind(o.kind), n(o.n), m(o.m), h(o.h), mu(o.mu), s(o.s), cns(o.cns),
          tail(o.tail), sum_w(o.sum_w), neighbor_correction(o.neighbor_correction),
          ext(o.ext), values(o.values) {}  // caches start empty
    KernelTable& operator=(const KernelTable&) = delete;

    Kind kind = Kind::riesz;
    int n = 0;
    int m = 0;
    double h = 0;
    double mu = 0;        // riesz exponent
    double s = 0;         // gagliardo order
    double cns = 0;       // C(n,s) for gagliardo tables
    double tail = 0;      // gagliardo: int over the cube complement
    double sum_w = 0;     // sum of all tabulated weights
    double neighbor_correction = 0;

    std::array<int, 3> ext{1, 1, 1};  // 2m-1 along used axes
    std::vector<double> values;       // offset cube, axis index o = z/h + (m-1)

    index_t ext_index(int ox, int oy, int oz) const {
        return ox + index_t(ext[0]) * (oy + index_t(ext[1]) * oz);
    }
    // offset components in {-(m-1) .. m-1}
    double at(int zx, int zy, int zz) const {
        return values[ext_index(zx + m - 1, (n > 1 ? zy + m - 1 : 0),
                                (n > 2 ? zz + m - 1 : 0))];
    }

    // padded-FFT spectrum (interleaved complex), built lazily
    const std::vector<double>& spectrum() const;
    // conv(W, indicator of the box): per-node weight sum, for open-form use
    const std::vector<double>& box_weight_sum(const Grid& grid) const;

    void invalidate_caches() const;  // for fault-injection tests

  private:
    mutable std::vector<double> spec_;
    mutable std::vector<double> boxsum_;
    mutable std::mutex cache_mu_;
};

using TablePtr = std::shared_ptr<const KernelTable>;

// 0 < mu < n required (local integrability).
TablePtr riesz_table(const Grid& grid, double mu);

// s in (0,1).  The table caches C(n,s) from frac_constant.
TablePtr gagliardo_table(const Grid& grid, double s);

}  // namespace mln
