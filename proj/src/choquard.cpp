#include "mln/choquard.hpp"

#include <cmath>
#include <stdexcept>

#include "mln/fftconv.hpp"
#include "mln/forms.hpp"

namespace mln {

Exponents compute_exponents(int n, double mu) {
    if (n < 3) throw std::invalid_argument("compute_exponents: need n >= 3");
    if (!(mu > 0.0 && mu < n))
        throw std::invalid_argument("compute_exponents: need 0 < mu < n");
    Exponents e;
    e.two_star = 2.0 * n / (n - 2.0);
    e.two_mu_star = (2.0 * n - mu) / (n - 2.0);
    return e;
}

Field riesz_potential(const Field& w, const KernelTable& riesz) {
    if (riesz.kind != KernelTable::Kind::riesz)
        throw std::invalid_argument("riesz_potential: wrong kernel kind");
    const Grid& g = w.grid();
    Field out(w.mask);
    out.v = fftconv::convolve(riesz, g, w.v);
    const double hn = g.cell_volume();
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < index_t(out.v.size()); ++i) out.v[i] *= hn;
    out.enforce_mask();
    return out;
}

double hl_pair(const Field& u, const KernelTable& riesz, double two_mu_star) {
    Field w(u.mask);
#pragma omp parallel for schedule(static)
    for (index_t i = 0; i < index_t(u.v.size()); ++i)
        w.v[i] = std::pow(std::abs(u.v[i]), two_mu_star);
    Field d = riesz_potential(w, riesz);
    return dot(w, d);
}

double hl_norm(const Field& u, const KernelTable& riesz, double two_mu_star) {
    return std::pow(hl_pair(u, riesz, two_mu_star), 1.0 / (2.0 * two_mu_star));
}

double bubble_value(const Bubble& b, int n, const double x[3]) {
    const double c = std::pow(double(n) * (n - 2.0), 0.25 * (n - 2.0));
    double y2 = 0;
    for (int d = 0; d < n; ++d) {
        double y = (x[d] - b.x0[d]) / b.t;
        y2 += y * y;
    }
    double core = std::pow(b.t, 0.5 * (2.0 - n)) * c * std::pow(1.0 + y2, -0.5 * (n - 2.0));
    if (b.variant != BubbleVariant::v_eps) return core;
    // radial quintic cutoff: 1 on r <= delta_c, 0 at r >= domain_radius
    double r = 0;
    for (int d = 0; d < n; ++d) r += (x[d] - b.x0[d]) * (x[d] - b.x0[d]);
    r = std::sqrt(r);
    if (r <= b.cutoff_radius) return core;
    if (r >= b.domain_radius) return 0.0;
    double q = (r - b.cutoff_radius) / (b.domain_radius - b.cutoff_radius);
    double sm = q * q * q * (10.0 + q * (-15.0 + 6.0 * q));  // C^2 smoothstep
    return core * (1.0 - sm);
}

Field bubble_field(const Bubble& b, const MaskPtr& mask) {
    if (!(b.t > 0)) throw std::invalid_argument("bubble_field: scale must be positive");
    if (b.variant == BubbleVariant::v_eps &&
        !(b.cutoff_radius > 0 && b.domain_radius > b.cutoff_radius))
        throw std::invalid_argument("bubble_field: v_eps needs 0 < delta_c < domain radius");
    const Grid& g = mask->grid;
    Field f(mask);
#pragma omp parallel for schedule(static)
    for (index_t id = 0; id < g.num_nodes(); ++id) {
        double x[3];
        g.node_coords(id, x);
        f.v[id] = bubble_value(b, g.n, x);
    }
    f.enforce_mask();
    return f;
}

namespace {

struct QuotientParts {
    double dirichlet;
    double hl_sq;  // ||V||_HL^2
    double pair;
    double l2star;  // |V|_{2*}^{2*2mu*}
};

QuotientParts bubble_quotient_parts(int n, double mu, int m, double L, const Bubble& b) {
    Grid g = build_grid(n, L, m);
    MaskPtr wb = wholebox_mask(g);
    Field V = bubble_field(b, wb);
    TablePtr rt = riesz_table(g, mu);
    Exponents ex = compute_exponents(n, mu);
    QuotientParts q;
    q.dirichlet = dirichlet_energy(V);
    q.pair = hl_pair(V, *rt, ex.two_mu_star);
    q.hl_sq = std::pow(q.pair, 1.0 / ex.two_mu_star);
    q.l2star = std::pow(lp_integral(V, ex.two_star), 2.0 * ex.two_mu_star / ex.two_star);
    return q;
}

// Richardson in 1/L on three box sizes, then one Aitken step
double extrapolate_L(const std::vector<double>& f, double* err, bool* monotone) {
    double e1 = 2.0 * f[1] - f[0];
    double e2 = 2.0 * f[2] - f[1];
    if (err) *err = std::abs(e2 - e1);
    if (monotone)
        *monotone = (f[1] - f[0]) * (f[2] - f[1]) > 0 || std::abs(f[2] - f[1]) < 1e-12;
    return e2;
}

}  // namespace

HlsEstimate hls_constant_estimate(int n, double mu, int m, double L0, bool invariance_checks) {
    if (n < 3) throw std::invalid_argument("hls_constant_estimate: need n >= 3");
    HlsEstimate est;
    est.box_L = {L0, 2 * L0, 4 * L0};
    Bubble b;  // V, t = 1, centered
    auto quotient_seq = [&](int mm, const Bubble& bb) {
        std::vector<double> qs;
        for (double L : est.box_L) {
            QuotientParts p = bubble_quotient_parts(n, mu, mm, L, bb);
            qs.push_back(p.dirichlet / p.hl_sq);
        }
        return qs;
    };
    est.quotient_fine = quotient_seq(m, b);
    est.quotient_coarse = quotient_seq(m / 2, b);
    double errf = 0, errc = 0;
    bool monf = true, monc = true;
    double qf = extrapolate_L(est.quotient_fine, &errf, &monf);
    double qc = extrapolate_L(est.quotient_coarse, &errc, &monc);
    est.value = (4.0 * qf - qc) / 3.0;  // h^2 Richardson
    est.err_estimate = errf + std::abs(qf - qc) / 3.0;
    est.monotone = monf && monc;

    if (invariance_checks) {
        Bubble b2 = b;
        b2.t = 2.0;
        double q2 = extrapolate_L(quotient_seq(m, b2), nullptr, nullptr);
        est.scale_invariance_dev = std::abs(q2 - qf) / qf;
        Bubble b3 = b;
        b3.x0 = {0.5, 0, 0};
        double q3 = extrapolate_L(quotient_seq(m, b3), nullptr, nullptr);
        est.translation_invariance_dev = std::abs(q3 - qf) / qf;
    }
    return est;
}

double hls_riesz_constant_estimate(int n, double mu, int m, double L0) {
    std::vector<double> ratios;
    Bubble b;
    for (double L : {L0, 2 * L0, 4 * L0}) {
        QuotientParts p = bubble_quotient_parts(n, mu, m, L, b);
        ratios.push_back(p.pair / p.l2star);
    }
    return extrapolate_L(ratios, nullptr, nullptr);
}

}  // namespace mln
