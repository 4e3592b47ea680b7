#include "mln/fftconv.hpp"

#include <fftw3.h>

#include <cmath>
#include <cstring>
#include <map>
#include <mutex>
#include <numbers>
#include <stdexcept>

#include "mln/kernels.hpp"

namespace mln::fftconv {

namespace {

std::mutex g_plan_mutex;
bool g_threads_ready = false;

struct PlanSet {
    fftw_plan fwd = nullptr;
    fftw_plan bwd = nullptr;
};

// plans keyed by padded dims; created once with ESTIMATE on template buffers
std::map<std::array<int, 3>, PlanSet>& plan_cache() {
    static std::map<std::array<int, 3>, PlanSet> cache;
    return cache;
}

struct Padded {
    std::array<int, 3> pdims{1, 1, 1};
    int rank = 1;
    index_t real_count() const { return index_t(pdims[0]) * pdims[1] * pdims[2]; }
    index_t cplx_count() const {
        index_t c = pdims[0] / 2 + 1;  // axis 0 is the FFTW last (fastest) dim
        return c * pdims[1] * pdims[2];
    }
};

Padded padded_dims(const Grid& grid) {
    Padded p;
    p.rank = grid.n;
    for (int d = 0; d < grid.n; ++d) p.pdims[d] = 2 * grid.m;
    return p;
}

PlanSet& get_plans(const Padded& p) {
    std::lock_guard<std::mutex> lk(g_plan_mutex);
    auto it = plan_cache().find(p.pdims);
    if (it != plan_cache().end()) return it->second;

    if (!g_threads_ready) {
        fftw_init_threads();
        fftw_plan_with_nthreads(1);
        g_threads_ready = true;
    }
    double* rbuf = fftw_alloc_real(p.real_count());
    fftw_complex* cbuf = fftw_alloc_complex(p.cplx_count());
    int nn[3];  // FFTW wants the slowest dimension first; axis 0 is fastest
    for (int d = 0; d < p.rank; ++d) nn[d] = p.pdims[p.rank - 1 - d];
    PlanSet ps;
    ps.fwd = fftw_plan_dft_r2c(p.rank, nn, rbuf, cbuf, FFTW_ESTIMATE);
    ps.bwd = fftw_plan_dft_c2r(p.rank, nn, cbuf, rbuf, FFTW_ESTIMATE);
    fftw_free(rbuf);
    fftw_free(cbuf);
    if (!ps.fwd || !ps.bwd) throw std::runtime_error("fftconv: FFTW planning failed");
    auto [pos, ok] = plan_cache().emplace(p.pdims, ps);
    return pos->second;
}

struct RealBuf {
    double* p = nullptr;
    explicit RealBuf(index_t nr) { p = fftw_alloc_real(nr); std::memset(p, 0, sizeof(double) * nr); }
    ~RealBuf() { fftw_free(p); }
};
struct CplxBuf {
    fftw_complex* p = nullptr;
    explicit CplxBuf(index_t nc) { p = fftw_alloc_complex(nc); }
    ~CplxBuf() { fftw_free(p); }
};

}  // namespace

void init_threads(int nthreads) {
    std::lock_guard<std::mutex> lk(g_plan_mutex);
    if (!g_threads_ready) {
        fftw_init_threads();
        g_threads_ready = true;
    }
    fftw_plan_with_nthreads(nthreads > 0 ? nthreads : 1);
}

index_t padded_complex_count(const Grid& grid) { return padded_dims(grid).cplx_count(); }

std::vector<double> kernel_spectrum(const KernelTable& table) {
    Grid grid;  // reconstruct the minimal grid info the layout needs
    grid.n = table.n;
    grid.m = table.m;
    grid.h = table.h;
    for (int d = 0; d < table.n; ++d) grid.dims[d] = table.m;
    Padded p = padded_dims(grid);

    RealBuf rb(p.real_count());
    CplxBuf cb(p.cplx_count());
    const int m = table.m;
    const auto& ext = table.ext;
    // wraparound layout: offset z in [-(m-1), m-1] lands at (z + P) mod P
    for (int oz = 0; oz < ext[2]; ++oz)
        for (int oy = 0; oy < ext[1]; ++oy)
            for (int ox = 0; ox < ext[0]; ++ox) {
                int zx = ox - (m - 1);
                int zy = (table.n > 1) ? oy - (m - 1) : 0;
                int zz = (table.n > 2) ? oz - (m - 1) : 0;
                index_t px = (zx + p.pdims[0]) % p.pdims[0];
                index_t py = (zy + p.pdims[1]) % p.pdims[1];
                index_t pz = (zz + p.pdims[2]) % p.pdims[2];
                index_t dst = px + index_t(p.pdims[0]) * (py + index_t(p.pdims[1]) * pz);
                rb.p[dst] = table.values[table.ext_index(ox, oy, oz)];
            }
    PlanSet& ps = get_plans(p);
    fftw_execute_dft_r2c(ps.fwd, rb.p, cb.p);
    std::vector<double> spec(2 * p.cplx_count());
    std::memcpy(spec.data(), cb.p, sizeof(double) * spec.size());
    return spec;
}

std::vector<double> convolve(const KernelTable& table, const Grid& grid,
                             const std::vector<double>& u) {
    if (grid.m != table.m || grid.n != table.n)
        throw std::invalid_argument("convolve: table/grid mismatch");
    Padded p = padded_dims(grid);
    const auto& spec = table.spectrum();

    RealBuf rb(p.real_count());
    CplxBuf cb(p.cplx_count());
    // embed the box data at [0, m)^n
    const auto& dims = grid.dims;
#pragma omp parallel for schedule(static) collapse(2)
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy) {
            index_t src = index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
            index_t dst = index_t(p.pdims[0]) * (iy + index_t(p.pdims[1]) * iz);
            std::memcpy(rb.p + dst, u.data() + src, sizeof(double) * dims[0]);
        }
    PlanSet& ps = get_plans(p);
    fftw_execute_dft_r2c(ps.fwd, rb.p, cb.p);
    const index_t nc = p.cplx_count();
    const double scale = 1.0 / double(p.real_count());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < nc; ++i) {
        double ar = cb.p[i][0], ai = cb.p[i][1];
        double br = spec[2 * i], bi = spec[2 * i + 1];
        cb.p[i][0] = (ar * br - ai * bi) * scale;
        cb.p[i][1] = (ar * bi + ai * br) * scale;
    }
    fftw_execute_dft_c2r(ps.bwd, cb.p, rb.p);
    std::vector<double> out(grid.num_nodes());
#pragma omp parallel for schedule(static) collapse(2)
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy) {
            index_t dst = index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
            index_t src = index_t(p.pdims[0]) * (iy + index_t(p.pdims[1]) * iz);
            std::memcpy(out.data() + dst, rb.p + src, sizeof(double) * dims[0]);
        }
    return out;
}

std::vector<double> local_symbol(const Grid& grid) {
    Padded p = padded_dims(grid);
    std::vector<double> sym(p.cplx_count());
    const double inv_h2 = 1.0 / (grid.h * grid.h);
    const index_t cx = p.pdims[0] / 2 + 1;
    for (index_t iz = 0; iz < p.pdims[2]; ++iz)
        for (index_t iy = 0; iy < p.pdims[1]; ++iy)
            for (index_t ix = 0; ix < cx; ++ix) {
                double v = 0;
                double sx = std::sin(std::numbers::pi * double(ix) / p.pdims[0]);
                v += 4.0 * sx * sx;
                if (grid.n > 1) {
                    double sy = std::sin(std::numbers::pi * double(iy) / p.pdims[1]);
                    v += 4.0 * sy * sy;
                }
                if (grid.n > 2) {
                    double sz = std::sin(std::numbers::pi * double(iz) / p.pdims[2]);
                    v += 4.0 * sz * sz;
                }
                sym[ix + cx * (iy + index_t(p.pdims[1]) * iz)] = v * inv_h2;
            }
    return sym;
}

std::vector<double> solve_circulant(const Grid& grid, const std::vector<double>& symbol,
                                    double shift, const std::vector<double>& r) {
    Padded p = padded_dims(grid);
    if (index_t(symbol.size()) != p.cplx_count())
        throw std::invalid_argument("solve_circulant: symbol size mismatch");
    RealBuf rb(p.real_count());
    CplxBuf cb(p.cplx_count());
    const auto& dims = grid.dims;
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy) {
            index_t src = index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
            index_t dst = index_t(p.pdims[0]) * (iy + index_t(p.pdims[1]) * iz);
            std::memcpy(rb.p + dst, r.data() + src, sizeof(double) * dims[0]);
        }
    PlanSet& ps = get_plans(p);
    fftw_execute_dft_r2c(ps.fwd, rb.p, cb.p);
    const index_t nc = p.cplx_count();
    const double scale = 1.0 / double(p.real_count());
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < nc; ++i) {
        double d = symbol[i] + shift;
        if (d <= 0) d = shift > 0 ? shift : 1.0;
        cb.p[i][0] *= scale / d;
        cb.p[i][1] *= scale / d;
    }
    fftw_execute_dft_c2r(ps.bwd, cb.p, rb.p);
    std::vector<double> out(grid.num_nodes());
    for (int iz = 0; iz < dims[2]; ++iz)
        for (int iy = 0; iy < dims[1]; ++iy) {
            index_t dst = index_t(dims[0]) * (iy + index_t(dims[1]) * iz);
            index_t src = index_t(p.pdims[0]) * (iy + index_t(p.pdims[1]) * iz);
            std::memcpy(out.data() + dst, rb.p + src, sizeof(double) * dims[0]);
        }
    return out;
}

}  // namespace mln::fftconv
