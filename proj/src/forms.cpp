#include "mln/forms.hpp"

#include <stdexcept>

#include "mln/fftconv.hpp"

namespace mln {

double dirichlet_energy(const Field& u) {
    const Grid& g = u.grid();
    const auto& dims = g.dims;
    const bool open = u.mask->is_wholebox();
    const double* v = u.v.data();
    double acc = 0;
#pragma omp parallel for schedule(static) reduction(+ : acc) collapse(2)
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy) {
            double local = 0;
            for (int ix = 0; ix < dims[0]; ++ix) {
                index_t id = ix + index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
                double uc = v[id];
                // one link per axis in the +direction; exterior value 0
                if (ix + 1 < dims[0]) {
                    double d = v[id + 1] - uc;
                    local += d * d;
                } else if (!open) {
                    local += uc * uc;
                }
                if (!open && ix == 0) local += uc * uc;
                if (g.n > 1) {
                    if (iy + 1 < dims[1]) {
                        double d = v[id + dims[0]] - uc;
                        local += d * d;
                    } else if (!open) {
                        local += uc * uc;
                    }
                    if (!open && iy == 0) local += uc * uc;
                }
                if (g.n > 2) {
                    if (iz + 1 < dims[2]) {
                        double d = v[id + index_t(dims[0]) * dims[1]] - uc;
                        local += d * d;
                    } else if (!open) {
                        local += uc * uc;
                    }
                    if (!open && iz == 0) local += uc * uc;
                }
            }
            acc += local;
        }
    return acc * std::pow(g.h, g.n - 2);
}

double gagliardo_sq(const Field& u, const KernelTable& gag) {
    if (gag.kind != KernelTable::Kind::gagliardo)
        throw std::invalid_argument("gagliardo_sq: wrong kernel kind");
    const Grid& g = u.grid();
    const double hn = g.cell_volume();
    std::vector<double> conv = fftconv::convolve(gag, g, u.v);
    double q = 0, ip = 0;
#pragma omp parallel for schedule(static) reduction(+ : q, ip)
    for (index_t i = 0; i < index_t(u.v.size()); ++i) {
        q += u.v[i] * u.v[i];
        ip += u.v[i] * conv[i];
    }
    if (u.mask->is_wholebox()) {
        // open truncation: only pairs with both points in the box
        const auto& bs = gag.box_weight_sum(g);
        double qb = 0;
#pragma omp parallel for schedule(static) reduction(+ : qb)
        for (index_t i = 0; i < index_t(u.v.size()); ++i)
            qb += u.v[i] * u.v[i] * bs[i];
        return gag.cns * (hn * hn) * (qb - ip);
    }
    return gag.cns * ((hn * hn) * (gag.sum_w * q - ip) + gag.tail * q * hn);
}

double mixed_norm_sq(const Field& u, const KernelTable& gag) {
    return dirichlet_energy(u) + gagliardo_sq(u, gag);
}

namespace {

// (-Delta_h u) with exterior zeros, masked to the domain
void apply_local_stencil(const Field& u, Field& out) {
    const Grid& g = u.grid();
    const auto& dims = g.dims;
    const double inv_h2 = 1.0 / (g.h * g.h);
    const double* v = u.v.data();
    double* w = out.v.data();
#pragma omp parallel for schedule(static) collapse(2)
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy)
            for (int ix = 0; ix < dims[0]; ++ix) {
                index_t id = ix + index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
                double uc = v[id];
                double acc = 2.0 * g.n * uc;
                if (ix > 0) acc -= v[id - 1];
                if (ix + 1 < dims[0]) acc -= v[id + 1];
                if (g.n > 1) {
                    if (iy > 0) acc -= v[id - dims[0]];
                    if (iy + 1 < dims[1]) acc -= v[id + dims[0]];
                }
                if (g.n > 2) {
                    index_t st = index_t(dims[0]) * dims[1];
                    if (iz > 0) acc -= v[id - st];
                    if (iz + 1 < dims[2]) acc -= v[id + st];
                }
                w[id] += acc * inv_h2;
            }
}

void apply_fractional(const Field& u, const KernelTable& gag, Field& out) {
    const Grid& g = u.grid();
    const double hn = g.cell_volume();
    std::vector<double> conv = fftconv::convolve(gag, g, u.v);
    const double c = gag.cns;
    const double diag = hn * gag.sum_w + gag.tail;
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < index_t(u.v.size()); ++i)
        out.v[i] += c * (diag * u.v[i] - hn * conv[i]);
}

}  // namespace

Field apply_mixed(const Field& u, const KernelTable& gag) {
    if (u.mask->is_wholebox())
        throw std::invalid_argument("apply_mixed: needs a domain mask");
    Field out(u.mask);
    apply_local_stencil(u, out);
    apply_fractional(u, gag, out);
    out.enforce_mask();
    return out;
}

Field MixedOperator::apply(const Field& u) const {
    if (u.mask->is_wholebox())
        throw std::invalid_argument("MixedOperator::apply: needs a domain mask");
    Field out(u.mask);
    if (include_local) apply_local_stencil(u, out);
    if (include_fractional) {
        if (!gag) throw std::invalid_argument("MixedOperator::apply: missing gagliardo table");
        apply_fractional(u, *gag, out);
    }
    out.enforce_mask();
    return out;
}

double MixedOperator::energy(const Field& u) const {
    double e = 0;
    if (include_local) e += dirichlet_energy(u);
    if (include_fractional) e += gagliardo_sq(u, *gag);
    return e;
}

Field cg_solve(const MixedOperator& op, const std::vector<double>& symbol,
               const Field& rhs, double tol, int maxit) {
    const Grid& g = op.mask->grid;
    Field x(op.mask);
    Field r = rhs;
    auto precond = [&](const Field& f) {
        Field z(op.mask);
        z.v = fftconv::solve_circulant(g, symbol, 0.0, f.v);
        z.enforce_mask();
        return z;
    };
    Field z = precond(r);
    Field p = z;
    double rz = dot(r, z);
    double rhs_norm = rhs.l2();
    if (rhs_norm == 0) return x;
    for (int it = 0; it < maxit; ++it) {
        Field Ap = op.apply(p);
        double pAp = dot(p, Ap);
        if (!(pAp > 0)) break;
        double alpha = rz / pAp;
        axpy(x, alpha, p);
        axpy(r, -alpha, Ap);
        if (r.l2() <= tol * rhs_norm) break;
        z = precond(r);
        double rz_new = dot(r, z);
        double beta = rz_new / rz;
        rz = rz_new;
        Field pnew = z;
        axpy(pnew, beta, p);
        p = pnew;
    }
    return x;
}

std::vector<double> MixedOperator::circulant_symbol() const {
    const Grid& g = mask->grid;
    std::vector<double> sym(fftconv::padded_complex_count(g), 0.0);
    if (include_local) {
        auto loc = fftconv::local_symbol(g);
        for (index_t i = 0; i < index_t(sym.size()); ++i) sym[i] += loc[i];
    }
    if (include_fractional) {
        const auto& spec = gag->spectrum();
        const double hn = g.cell_volume();
        const double c = gag->cns;
        const double diag = hn * gag->sum_w + gag->tail;
        for (index_t i = 0; i < index_t(sym.size()); ++i)
            sym[i] += c * (diag - hn * spec[2 * i]);  // spectrum of even kernel is real
    }
    return sym;
}

}  // namespace mln
