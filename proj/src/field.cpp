#include "mln/field.hpp"

#include <stdexcept>

namespace mln {

double dot(const Field& a, const Field& b) {
    if (a.v.size() != b.v.size()) throw std::invalid_argument("dot: size mismatch");
    double q = 0;
#pragma omp parallel for schedule(static) reduction(+ : q)
    for (index_t i = 0; i < index_t(a.v.size()); ++i) q += a.v[i] * b.v[i];
    return q * a.grid().cell_volume();
}

void axpy(Field& a, double c, const Field& b) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < index_t(a.v.size()); ++i) a.v[i] += c * b.v[i];
}

void scale(Field& a, double c) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < index_t(a.v.size()); ++i) a.v[i] *= c;
}

double lp_integral(const Field& u, double p) {
    double q = 0;
#pragma omp parallel for schedule(static) reduction(+ : q)
    for (index_t i = 0; i < index_t(u.v.size()); ++i)
        q += std::pow(std::abs(u.v[i]), p);
    return q * u.grid().cell_volume();
}

void abs_project(Field& u) {
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < index_t(u.v.size()); ++i) u.v[i] = std::abs(u.v[i]);
}

}  // namespace mln
