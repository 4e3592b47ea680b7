#pragma once

#include <cmath>
#include <vector>

#include "mln/grid.hpp"

namespace mln {

// Nodal values over the full box; identically zero at nodes outside the
// domain (the exterior Dirichlet condition).  Every mutating helper reapplies
// the mask so the exterior-zero invariant survives arithmetic.
struct Field {
    MaskPtr mask;
    std::vector<double> v;

    Field() = default;
    explicit Field(MaskPtr m) : mask(std::move(m)), v(mask->grid.num_nodes(), 0.0) {}

    const Grid& grid() const { return mask->grid; }
    index_t size() const { return index_t(v.size()); }

    void enforce_mask() {
        const auto& in = mask->inside;
#pragma omp parallel for schedule(static)
        for (index_t i = 0; i < index_t(v.size()); ++i)
            if (!in[i]) v[i] = 0.0;
    }

    double l2_sq() const {  // |u|_2^2 = sum u^2 h^n
        double q = 0;
#pragma omp parallel for schedule(static) reduction(+ : q)
        for (index_t i = 0; i < index_t(v.size()); ++i) q += v[i] * v[i];
        return q * mask->grid.cell_volume();
    }
    double l2() const { return std::sqrt(l2_sq()); }

    double linf() const {
        double m = 0;
#pragma omp parallel for schedule(static) reduction(max : m)
        for (index_t i = 0; i < index_t(v.size()); ++i) m = std::max(m, std::abs(v[i]));
        return m;
    }

    bool all_finite() const {
        bool ok = true;
#pragma omp parallel for schedule(static) reduction(&& : ok)
        for (index_t i = 0; i < index_t(v.size()); ++i) ok = ok && std::isfinite(v[i]);
        return ok;
    }
};

// sum u_i w_i * h^n
double dot(const Field& a, const Field& b);

// a <- a + c*b
void axpy(Field& a, double c, const Field& b);

void scale(Field& a, double c);

// L^p integral: sum |u|^p h^n
double lp_integral(const Field& u, double p);

// signed power sum: integral of |u|^{p-1} u * phi would use this pointwise
void abs_project(Field& u);  // u <- |u|

}  // namespace mln
