#include "mln/kernels.hpp"

#include <cmath>
#include <map>
#include <numbers>
#include <stdexcept>
#include <utility>

#include <omp.h>

#include "mln/fftconv.hpp"
#include "mln/quad.hpp"

namespace mln {

namespace {

// direction-averaged cosine over S^{n-1}: psi_1 = cos r, psi_2 = J0(r),
// psi_3 = sin(r)/r; one_minus_psi is evaluated via series for small r.
double one_minus_psi(int n, double r) {
    if (n == 1) {
        double t = std::sin(0.5 * r);
        return 2.0 * t * t;
    }
    if (n == 3) {
        if (r < 0.1) {
            double r2 = r * r;
            return r2 / 6.0 * (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0)));
        }
        return 1.0 - std::sin(r) / r;
    }
    // n == 2
    if (r < 0.1) {
        double q = 0.25 * r * r;  // J0 = sum (-q)^k/(k!)^2
        return q * (1.0 - q / 4.0 * (1.0 - q / 9.0 * (1.0 - q / 16.0)));
    }
    return 1.0 - std::cyl_bessel_j(0.0, r);
}

// psi itself for the oscillatory outer part
double psi(int n, double r) { return 1.0 - one_minus_psi(n, r); }

// (1 - psi_n(r)) / r^2 by series; stable limit c_n at r -> 0
double one_minus_psi_over_r2(int n, double r) {
    double r2 = r * r;
    if (n == 1) {  // (1-cos r)/r^2
        return 0.5 * (1.0 - r2 / 12.0 * (1.0 - r2 / 30.0 * (1.0 - r2 / 56.0)));
    }
    if (n == 3) {
        return (1.0 - r2 / 20.0 * (1.0 - r2 / 42.0 * (1.0 - r2 / 72.0))) / 6.0;
    }
    double q = 0.25 * r2;
    return 0.25 * (1.0 - q / 4.0 * (1.0 - q / 9.0 * (1.0 - q / 16.0)));
}

struct OuterTail {
    double value;
    double bound;
};

// int_R^inf trig(r + phase) r^{-q} dr by repeated integration by parts
// (depth 4), with the crude bound int r^{-q} on the remainder.
OuterTail osc_tail(bool is_sin, double phase, double q, double R, int depth = 4) {
    if (depth == 0) return {0.0, std::pow(R, 1.0 - q) / (q - 1.0)};
    if (is_sin) {
        OuterTail inner = osc_tail(false, phase, q + 1.0, R, depth - 1);
        return {std::cos(R + phase) * std::pow(R, -q) - q * inner.value, q * inner.bound};
    }
    OuterTail inner = osc_tail(true, phase, q + 1.0, R, depth - 1);
    return {-std::sin(R + phase) * std::pow(R, -q) + q * inner.value, q * inner.bound};
}

// int_R^inf psi_n(r) r^{-1-2s} dr via the oscillatory asymptotics of psi_n.
OuterTail outer_tail(int n, double s, double R) {
    if (n == 1) return osc_tail(false, 0.0, 1.0 + 2.0 * s, R);
    if (n == 3) return osc_tail(true, 0.0, 2.0 + 2.0 * s, R);
    // n == 2: J0(r) = sqrt(2/(pi r)) [P cos(r-pi/4) - Q sin(r-pi/4)],
    //         P = 1 - 9/(128 r^2) + ..., Q = -1/(8r) + ...
    const double c = std::sqrt(2.0 / std::numbers::pi);
    const double phi = -std::numbers::pi / 4.0;
    OuterTail t1 = osc_tail(false, phi, 1.5 + 2.0 * s, R);
    OuterTail t2 = osc_tail(true, phi, 2.5 + 2.0 * s, R);
    OuterTail t3 = osc_tail(false, phi, 3.5 + 2.0 * s, R);
    OuterTail out;
    out.value = c * (t1.value + 0.125 * t2.value - (9.0 / 128.0) * t3.value);
    out.bound = c * (t1.bound + 0.125 * t2.bound + (9.0 / 128.0) * t3.bound) +
                0.06 * std::pow(R, -2.5 - 2.0 * s);  // dropped Hankel terms
    return out;
}

// radial integral int_0^inf (1 - psi_n(r)) r^{-1-2s} dr at a given panel
// refinement level
double radial_integral(int n, double s, int level, double* tail_bound) {
    // inner (0,1]: substitute r = e^t; integrand decays like e^{(2-2s)t}.
    // For small r evaluate (1-psi) r^{-2s} as (2-2s)-exponential times the
    // stable series of (1-psi)/r^2 (the naive product overflows for s near 1).
    double tmin = -42.0 / (2.0 - 2.0 * s);
    int inner_panels = std::min(int((0.0 - tmin) * 2) * level + 8, 20000);
    double inner = quad::gl_panels(
        [&](double t) {
            double r = std::exp(t);
            if (t < -2.0)
                return std::exp((2.0 - 2.0 * s) * t) * one_minus_psi_over_r2(n, r);
            return one_minus_psi(n, r) * std::exp(-2.0 * s * t);
        },
        tmin, 0.0, inner_panels);

    // outer [1,inf): the 1-term integrates to 1/(2s); the oscillatory psi
    // term is quadrature up to R plus the integration-by-parts tail
    double R = (n == 2) ? 4.0e4 : 2.0e4;
    double one_part = 1.0 / (2.0 * s);
    int outer_panels = int((R - 1.0) / 1.2) * level;
    double psi_part = quad::gl_panels([&](double r) { return psi(n, r) * std::pow(r, -1.0 - 2.0 * s); },
                                      1.0, R, outer_panels);
    OuterTail t = outer_tail(n, s, R);
    if (tail_bound) *tail_bound = t.bound;
    return inner + one_part - psi_part - t.value;
}

}  // namespace

FracConstant frac_constant(int n, double s) {
    if (n < 1 || n > 3) throw std::invalid_argument("frac_constant: n must be 1..3");
    if (!(s > 0.0 && s < 1.0))
        throw std::invalid_argument("frac_constant: s must lie in (0,1)");

    static std::mutex cache_mu;
    static std::map<std::pair<int, long long>, FracConstant> cache;
    const auto key = std::make_pair(n, (long long)std::llround(s * 1e12));
    {
        std::lock_guard<std::mutex> lk(cache_mu);
        auto it = cache.find(key);
        if (it != cache.end()) return it->second;
    }

    double tb1 = 0, tb2 = 0;
    double i1 = radial_integral(n, s, 1, &tb1);
    double i2 = radial_integral(n, s, 2, &tb2);
    double integral = quad::unit_sphere_area(n) * i2;
    FracConstant fc;
    fc.n = n;
    fc.s = s;
    fc.value = 1.0 / integral;
    fc.err_estimate = std::abs(i2 - i1) / std::abs(i2) + tb2 / std::abs(i2) + 1e-12;
    if (!(fc.value > 0) || !std::isfinite(fc.value))
        throw std::runtime_error("frac_constant: quadrature failed to converge");
    {
        std::lock_guard<std::mutex> lk(cache_mu);
        cache.emplace(key, fc);
    }
    return fc;
}

double frac_constant_closed_form(int n, double s) {
    return s * std::pow(4.0, s) * std::tgamma(0.5 * n + s) /
           (std::pow(std::numbers::pi, 0.5 * n) * std::tgamma(1.0 - s));
}

double gagliardo_ball_tail(int n, double s, double R) {
    return quad::unit_sphere_area(n) * std::pow(R, -2.0 * s) / (2.0 * s);
}

const std::vector<double>& KernelTable::spectrum() const {
    std::lock_guard<std::mutex> lk(cache_mu_);
    if (spec_.empty()) spec_ = fftconv::kernel_spectrum(*this);
    return spec_;
}

const std::vector<double>& KernelTable::box_weight_sum(const Grid& grid) const {
    {
        std::lock_guard<std::mutex> lk(cache_mu_);
        if (!boxsum_.empty()) return boxsum_;
    }
    std::vector<double> ones(grid.num_nodes(), 1.0);
    std::vector<double> bs = fftconv::convolve(*this, grid, ones);
    std::lock_guard<std::mutex> lk(cache_mu_);
    if (boxsum_.empty()) boxsum_ = std::move(bs);
    return boxsum_;
}

void KernelTable::invalidate_caches() const {
    std::lock_guard<std::mutex> lk(cache_mu_);
    spec_.clear();
    boxsum_.clear();
}

namespace {

std::shared_ptr<KernelTable> make_table(const Grid& grid) {
    auto t = std::make_shared<KernelTable>();
    t->n = grid.n;
    t->m = grid.m;
    t->h = grid.h;
    for (int d = 0; d < grid.n; ++d) t->ext[d] = 2 * grid.m - 1;
    t->values.assign(index_t(t->ext[0]) * t->ext[1] * t->ext[2], 0.0);
    return t;
}

}  // namespace

TablePtr riesz_table(const Grid& grid, double mu) {
    if (!(mu > 0.0 && mu < grid.n))
        throw std::invalid_argument("riesz_table: need 0 < mu < n (kernel not integrable)");
    auto t = make_table(grid);
    t->kind = KernelTable::Kind::riesz;
    t->mu = mu;
    const int m = grid.m, n = grid.n;
    const double h = grid.h;
    const double k0 = std::pow(h, -mu) * quad::unit_cell_power_integral(n, mu);
    const index_t total = index_t(t->ext[0]) * t->ext[1] * t->ext[2];
    double sw = 0.0;
    std::vector<double>& v = t->values;
    const auto ext = t->ext;
#pragma omp parallel for schedule(static) reduction(+ : sw)
    for (index_t id = 0; id < total; ++id) {
        int ox = int(id % ext[0]);
        int oy = int((id / ext[0]) % ext[1]);
        int oz = int(id / (index_t(ext[0]) * ext[1]));
        double zx = (ox - (m - 1)) * h;
        double zy = (n > 1 ? (oy - (m - 1)) * h : 0.0);
        double zz = (n > 2 ? (oz - (m - 1)) * h : 0.0);
        double r2 = zx * zx + zy * zy + zz * zz;
        double val = (r2 == 0.0) ? k0 : std::pow(r2, -0.5 * mu);
        v[id] = val;
        sw += val;
    }
    t->sum_w = sw;
    return t;
}

TablePtr gagliardo_table(const Grid& grid, double s) {
    FracConstant fc = frac_constant(grid.n, s);  // validates s
    auto t = make_table(grid);
    t->kind = KernelTable::Kind::gagliardo;
    t->s = s;
    t->cns = fc.value;
    const int m = grid.m, n = grid.n;
    const double h = grid.h;
    const double p = double(n) + 2.0 * s;

    const index_t total = index_t(t->ext[0]) * t->ext[1] * t->ext[2];
    std::vector<double>& v = t->values;
    const auto ext = t->ext;
    double sw = 0.0, m2 = 0.0;
#pragma omp parallel for schedule(static) reduction(+ : sw, m2)
    for (index_t id = 0; id < total; ++id) {
        int ox = int(id % ext[0]);
        int oy = int((id / ext[0]) % ext[1]);
        int oz = int(id / (index_t(ext[0]) * ext[1]));
        double zx = (ox - (m - 1)) * h;
        double zy = (n > 1 ? (oy - (m - 1)) * h : 0.0);
        double zz = (n > 2 ? (oz - (m - 1)) * h : 0.0);
        double r2 = zx * zx + zy * zy + zz * zz;
        if (r2 == 0.0) {
            v[id] = 0.0;
            continue;
        }
        double val = std::pow(r2, -0.5 * p);
        v[id] = val;
        sw += val;
        m2 += r2 * val;
    }

    // second-order singular correction: match the second moment of the
    // discrete measure over the tabulated cube [-a,a]^n, a = (m-1/2)h, to the
    // continuum one; the deficit (missing diagonal cell plus midpoint bias)
    // goes onto the 2n nearest neighbors.
    const double a = (m - 0.5) * h;
    const double cellvol = grid.cell_volume();
    const double mom_cont =
        std::pow(2.0 * a, 2.0 - 2.0 * s) * quad::unit_cell_power_integral(n, p - 2.0) / n;
    const double mom_disc = m2 * cellvol / n;
    const double dw = (mom_cont - mom_disc) / (2.0 * std::pow(h, n + 2.0));
    t->neighbor_correction = dw;
    for (int d = 0; d < n; ++d) {
        int o[3] = {m - 1, (n > 1 ? m - 1 : 0), (n > 2 ? m - 1 : 0)};
        o[d] = m - 2;
        v[t->ext_index(o[0], o[1], o[2])] += dw;
        o[d] = m;
        v[t->ext_index(o[0], o[1], o[2])] += dw;
    }
    t->sum_w = sw + 2.0 * n * dw;

    // analytic tail over the cube complement: ball complement minus the
    // (cube minus ball) sliver, both at radius a
    const double sliver =
        std::pow(2.0 * a, -2.0 * s) * quad::unit_cell_power_remainder(n, p);
    t->tail = gagliardo_ball_tail(n, s, a) - sliver;
    return t;
}

}  // namespace mln
