#include "mln/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "mln/fftconv.hpp"

namespace mln {

namespace {

// Jacobi eigen-decomposition for k x k symmetric, k <= 3; returns the
// eigenvector of the smallest eigenvalue.
void smallest_eigvec(double a[3][3], int k, double out[3]) {
    double v[3][3] = {{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    for (int sweep = 0; sweep < 64; ++sweep) {
        double off = 0;
        for (int i = 0; i < k; ++i)
            for (int j = i + 1; j < k; ++j) off += a[i][j] * a[i][j];
        if (off < 1e-30) break;
        for (int p = 0; p < k; ++p)
            for (int q = p + 1; q < k; ++q) {
                if (std::abs(a[p][q]) < 1e-300) continue;
                double theta = 0.5 * (a[q][q] - a[p][p]) / a[p][q];
                double t = (theta >= 0 ? 1.0 : -1.0) /
                           (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                double c = 1.0 / std::sqrt(t * t + 1.0), s = t * c;
                for (int i = 0; i < k; ++i) {
                    double aip = a[i][p], aiq = a[i][q];
                    a[i][p] = c * aip - s * aiq;
                    a[i][q] = s * aip + c * aiq;
                }
                for (int i = 0; i < k; ++i) {
                    double api = a[p][i], aqi = a[q][i];
                    a[p][i] = c * api - s * aqi;
                    a[q][i] = s * api + c * aqi;
                }
                for (int i = 0; i < k; ++i) {
                    double vip = v[i][p], viq = v[i][q];
                    v[i][p] = c * vip - s * viq;
                    v[i][q] = s * vip + c * viq;
                }
            }
    }
    int best = 0;
    for (int i = 1; i < k; ++i)
        if (a[i][i] < a[best][best]) best = i;
    for (int i = 0; i < 3; ++i) out[i] = (i < k) ? v[i][best] : 0.0;
}

}  // namespace

EigenResult smallest_eigenvalue(const MixedOperator& op, const EigenOptions& opts) {
    const MaskPtr& mask = op.mask;
    const Grid& g = mask->grid;

    Field u(mask);
    for (index_t i = 0; i < index_t(u.v.size()); ++i) u.v[i] = mask->inside[i] ? 1.0 : 0.0;
    scale(u, 1.0 / u.l2());

    std::vector<double> symbol = op.circulant_symbol();

    Field Au = op.apply(u);
    double rho = dot(Au, u);
    Field prev(mask);
    bool have_prev = false;

    EigenResult res;
    res.eigenfield = u;
    for (int it = 1; it <= opts.max_iterations; ++it) {
        // residual r = Au - rho u
        Field r = Au;
        axpy(r, -rho, u);
        double rn = r.l2();
        res.iterations = it;
        res.eigenvalue = rho;
        if (rn <= opts.rel_tol * std::abs(rho)) {
            res.converged = true;
            res.residual = rn;
            break;
        }
        // preconditioned direction
        Field w(mask);
        w.v = fftconv::solve_circulant(g, symbol, rho, r.v);
        w.enforce_mask();

        // Rayleigh-Ritz over span{u, w, prev}
        Field* basis[3] = {&u, &w, have_prev ? &prev : nullptr};
        int k = have_prev ? 3 : 2;
        // Gram-Schmidt in the l2(h^n) inner product
        Field q1 = u;
        Field q2 = w;
        axpy(q2, -dot(q2, q1) / q1.l2_sq(), q1);
        double q2n = q2.l2();
        if (q2n < 1e-14) {  // w parallel to u; stagnate out
            res.converged = rn <= opts.rel_tol * std::abs(rho);
            res.residual = rn;
            break;
        }
        scale(q2, 1.0 / q2n);
        Field q3(mask);
        if (k == 3) {
            q3 = prev;
            axpy(q3, -dot(q3, q1), q1);
            axpy(q3, -dot(q3, q2), q2);
            double q3n = q3.l2();
            if (q3n < 1e-10)
                k = 2;
            else
                scale(q3, 1.0 / q3n);
        }
        (void)basis;
        Field Aq1 = Au;  // A q1 = A u (u normalized below each round)
        Field Aq2 = op.apply(q2);
        Field Aq3(mask);
        if (k == 3) Aq3 = op.apply(q3);
        double A3[3][3] = {{0, 0, 0}, {0, 0, 0}, {0, 0, 0}};
        A3[0][0] = dot(Aq1, q1);
        A3[0][1] = A3[1][0] = dot(Aq1, q2);
        A3[1][1] = dot(Aq2, q2);
        if (k == 3) {
            A3[0][2] = A3[2][0] = dot(Aq1, q3);
            A3[1][2] = A3[2][1] = dot(Aq2, q3);
            A3[2][2] = dot(Aq3, q3);
        }
        double c[3];
        smallest_eigvec(A3, k, c);

        prev = u;
        have_prev = true;
        Field unew(mask);
        unew.v = q1.v;
        scale(unew, c[0]);
        axpy(unew, c[1], q2);
        if (k == 3) axpy(unew, c[2], q3);
        double nn = unew.l2();
        scale(unew, 1.0 / nn);
        u = unew;

        Field Aunew(mask);
        Aunew.v = Aq1.v;
        scale(Aunew, c[0] / nn);
        axpy(Aunew, c[1] / nn, Aq2);
        if (k == 3) axpy(Aunew, c[2] / nn, Aq3);
        Au = Aunew;
        rho = dot(Au, u);
    }
    if (!res.converged) {
        Field r = Au;
        axpy(r, -rho, u);
        res.residual = r.l2();
        res.eigenvalue = rho;
    }
    // sign normalization: first eigenfunction taken nonnegative
    double mass = 0;
    for (index_t i = 0; i < index_t(u.v.size()); ++i) mass += u.v[i];
    if (mass < 0) scale(u, -1.0);
    res.eigenfield = u;
    return res;
}

EigenResult first_eigen_fractional(const MaskPtr& mask, const TablePtr& gag,
                                   const EigenOptions& opts) {
    MixedOperator op{mask, gag, false, true};
    return smallest_eigenvalue(op, opts);
}

EigenResult first_eigen_mixed(const MaskPtr& mask, const TablePtr& gag,
                              const EigenOptions& opts) {
    MixedOperator op{mask, gag, true, true};
    return smallest_eigenvalue(op, opts);
}

EigenResult first_eigen_local(const MaskPtr& mask, const EigenOptions& opts) {
    MixedOperator op{mask, TablePtr{}, true, false};
    return smallest_eigenvalue(op, opts);
}

}  // namespace mln
