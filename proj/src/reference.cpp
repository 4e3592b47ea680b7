#include "mln/reference.hpp"

#include <cmath>
#include <stdexcept>

namespace mln::ref {

double dirichlet_energy(const Field& u) {
    const Grid& g = u.grid();
    const auto& dims = g.dims;
    const bool open = u.mask->is_wholebox();
    double acc = 0;
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy)
            for (int ix = 0; ix < dims[0]; ++ix) {
                index_t id = ix + index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
                double uc = u.v[id];
                int pos[3] = {ix, iy, iz};
                index_t strides[3] = {1, dims[0], index_t(dims[0]) * dims[1]};
                for (int d = 0; d < g.n; ++d) {
                    if (pos[d] + 1 < dims[d]) {
                        double df = u.v[id + strides[d]] - uc;
                        acc += df * df;
                    } else if (!open) {
                        acc += uc * uc;
                    }
                    if (!open && pos[d] == 0) acc += uc * uc;
                }
            }
    return acc * std::pow(g.h, g.n - 2);
}

double gagliardo_sq(const Field& u, const KernelTable& gag) {
    const Grid& g = u.grid();
    const auto& dims = g.dims;
    const index_t N = g.num_nodes();
    const double hn = g.cell_volume();
    const bool open = u.mask->is_wholebox();
    double pair_sum = 0;
    for (index_t a = 0; a < N; ++a) {
        int ax[3];
        g.unflatten(a, ax);
        for (index_t b = 0; b < N; ++b) {
            if (a == b) continue;
            int bx[3];
            g.unflatten(b, bx);
            double w = gag.at(ax[0] - bx[0], ax[1] - bx[1], ax[2] - bx[2]);
            double d = u.v[a] - u.v[b];
            pair_sum += w * d * d;
        }
    }
    double val = 0.5 * gag.cns * pair_sum * hn * hn;
    if (!open) {
        // pairs with the zero exterior within the tabulated cube + analytic tail
        double ext_sum = 0;
        const int m = g.m;
        for (index_t a = 0; a < N; ++a) {
            if (u.v[a] == 0.0) continue;
            int ax[3];
            g.unflatten(a, ax);
            double wsum = 0;
            int zmax = m - 1;
            for (int zz = (g.n > 2 ? -zmax : 0); zz <= (g.n > 2 ? zmax : 0); ++zz)
                for (int zy = (g.n > 1 ? -zmax : 0); zy <= (g.n > 1 ? zmax : 0); ++zy)
                    for (int zx = -zmax; zx <= zmax; ++zx) {
                        int tx = ax[0] + zx, ty = ax[1] + zy, tz = ax[2] + zz;
                        bool inside_box = tx >= 0 && tx < dims[0] &&
                                          (g.n < 2 || (ty >= 0 && ty < dims[1])) &&
                                          (g.n < 3 || (tz >= 0 && tz < dims[2]));
                        if (!inside_box) wsum += gag.at(zx, zy, zz);
                    }
            ext_sum += u.v[a] * u.v[a] * (wsum * hn + gag.tail);
        }
        val += gag.cns * ext_sum * hn;
    }
    return val;
}

Field riesz_potential(const Field& w, const KernelTable& riesz) {
    const Grid& g = w.grid();
    const index_t N = g.num_nodes();
    const double hn = g.cell_volume();
    Field out(w.mask);
    for (index_t a = 0; a < N; ++a) {
        int ax[3];
        g.unflatten(a, ax);
        double acc = 0;
        for (index_t b = 0; b < N; ++b) {
            int bx[3];
            g.unflatten(b, bx);
            acc += riesz.at(ax[0] - bx[0], ax[1] - bx[1], ax[2] - bx[2]) * w.v[b];
        }
        out.v[a] = acc * hn;
    }
    out.enforce_mask();
    return out;
}

Field apply_mixed(const Field& u, const KernelTable& gag) {
    const Grid& g = u.grid();
    const auto& dims = g.dims;
    const index_t N = g.num_nodes();
    const double hn = g.cell_volume();
    Field out(u.mask);
    const double inv_h2 = 1.0 / (g.h * g.h);
    for (index_t a = 0; a < N; ++a) {
        int ax[3];
        g.unflatten(a, ax);
        // local stencil with exterior zeros
        double acc = 2.0 * g.n * u.v[a];
        index_t strides[3] = {1, dims[0], index_t(dims[0]) * dims[1]};
        for (int d = 0; d < g.n; ++d) {
            if (ax[d] > 0) acc -= u.v[a - strides[d]];
            if (ax[d] + 1 < dims[d]) acc -= u.v[a + strides[d]];
        }
        acc *= inv_h2;
        // fractional part: C (h^n sum_z W(z)(u(x) - u(x+z)) + T u(x)) over the cube
        double frac = 0;
        for (index_t b = 0; b < N; ++b) {
            if (b == a) continue;
            int bx[3];
            g.unflatten(b, bx);
            frac += gag.at(ax[0] - bx[0], ax[1] - bx[1], ax[2] - bx[2]) * (u.v[a] - u.v[b]);
        }
        // offsets leaving the box see u = 0: add u(x) * (sum over all cube
        // offsets minus those landing in the box)
        {
            const int m = g.m;
            int zmax = m - 1;
            double wsum_out = 0;
            for (int zz = (g.n > 2 ? -zmax : 0); zz <= (g.n > 2 ? zmax : 0); ++zz)
                for (int zy = (g.n > 1 ? -zmax : 0); zy <= (g.n > 1 ? zmax : 0); ++zy)
                    for (int zx = -zmax; zx <= zmax; ++zx) {
                        if (zx == 0 && zy == 0 && zz == 0) continue;
                        int tx = ax[0] + zx, ty = ax[1] + zy, tz = ax[2] + zz;
                        bool inside_box = tx >= 0 && tx < dims[0] &&
                                          (g.n < 2 || (ty >= 0 && ty < dims[1])) &&
                                          (g.n < 3 || (tz >= 0 && tz < dims[2]));
                        if (!inside_box) wsum_out += gag.at(zx, zy, zz);
                    }
            frac += wsum_out * u.v[a];
        }
        out.v[a] = acc + gag.cns * (hn * frac + gag.tail * u.v[a]);
    }
    out.enforce_mask();
    return out;
}

double hl_pair(const Field& u, const KernelTable& riesz, double two_mu_star) {
    const Grid& g = u.grid();
    const index_t N = g.num_nodes();
    const double hn = g.cell_volume();
    std::vector<double> w(N);
    for (index_t i = 0; i < N; ++i) w[i] = std::pow(std::abs(u.v[i]), two_mu_star);
    double acc = 0;
    for (index_t a = 0; a < N; ++a) {
        int ax[3];
        g.unflatten(a, ax);
        for (index_t b = 0; b < N; ++b) {
            int bx[3];
            g.unflatten(b, bx);
            acc += w[a] * riesz.at(ax[0] - bx[0], ax[1] - bx[1], ax[2] - bx[2]) * w[b];
        }
    }
    return acc * hn * hn;
}

}  // namespace mln::ref
