#include "mln/verify.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "mln/reference.hpp"

namespace mln {

namespace {

// multilinear interpolation of box data at an arbitrary point; exterior is 0
double interp(const Field& f, const double x[3]) {
    const Grid& g = f.grid();
    double w[3][2];
    int base[3] = {0, 0, 0};
    for (int d = 0; d < g.n; ++d) {
        double t = (x[d] + g.L) / g.h - 0.5;  // node index coordinate
        double fl = std::floor(t);
        base[d] = int(fl);
        double frac = t - fl;
        w[d][0] = 1.0 - frac;
        w[d][1] = frac;
    }
    double acc = 0;
    int corners = 1 << g.n;
    for (int c = 0; c < corners; ++c) {
        double wt = 1.0;
        int ix[3] = {0, 0, 0};
        bool ok = true;
        for (int d = 0; d < g.n; ++d) {
            int bit = (c >> d) & 1;
            ix[d] = base[d] + bit;
            wt *= w[d][bit];
            if (ix[d] < 0 || ix[d] >= g.dims[d]) ok = false;
        }
        if (!ok || wt == 0.0) continue;
        acc += wt * f.v[g.flatten(ix)];
    }
    return acc;
}

}  // namespace

PohozaevTerms pohozaev_terms(const Problem& pb, const Field& u, double lambda,
                             const BoundaryPatches& patches,
                             const PohozaevOptions& opts) {
    const Grid& g = pb.mask->grid;
    const int n = g.n;
    const double s = pb.gag ? pb.gag->s : 0.0;
    PohozaevTerms t;

    if (opts.include_choquard) {
        double pair = hl_pair(u, *pb.riesz, pb.exps.two_mu_star);
        t.A = (pb.mu - 2.0 * n) / (2.0 * pb.exps.two_mu_star) * pair;
    }
    t.B = -(lambda * n / (pb.p + 1.0)) * lp_integral(u, pb.p + 1.0);
    t.C1 = 0.5 * (2.0 - n) * dirichlet_energy(u);
    if (opts.include_fractional) {
        double gsq = gagliardo_sq(u, *pb.gag);
        t.C2 = 0.5 * (2.0 * s - n) * gsq;
    }

    // boundary terms: du/dnu by one-sided 3-point differencing through
    // interior probes only (the masked Dirichlet boundary carries an O(h)
    // offset, so the boundary value is never pinned); (u/delta^s) by the
    // two-offset power fit at tau = 2h, 4h extrapolated linearly to tau -> 0.
    const double h = g.h;
    const double tau0 = 1.5 * h;
    double d1 = 0, d2 = 0;
    const double gs = std::tgamma(1.0 + s);
    for (std::size_t i = 0; i < patches.points.size(); ++i) {
        const auto& xp = patches.points[i];
        const auto& nu = patches.normals[i];
        double nx = 0;
        for (int d = 0; d < 3; ++d) nx += nu[d] * xp[d];

        double p1[3], p2[3], p3[3];
        for (int d = 0; d < 3; ++d) {
            p1[d] = xp[d] - tau0 * nu[d];
            p2[d] = xp[d] - 2.0 * tau0 * nu[d];
            p3[d] = xp[d] - 3.0 * tau0 * nu[d];
        }
        // check the probes stay inside the domain
        if (signed_distance(pb.mask->shape, p3, n) > -1e-12)
            throw std::invalid_argument(
                "pohozaev_terms: probe point leaves the domain; refine the grid");
        double u1 = interp(u, p1), u2 = interp(u, p2), u3 = interp(u, p3);
        // derivative at tau = 0 of the quadratic through the three probes
        double dn = -(-2.5 * u1 + 4.0 * u2 - 1.5 * u3) / tau0;
        d1 += dn * dn * nx * patches.areas[i];

        if (opts.include_fractional) {
            double q1[3], q2[3];
            for (int d = 0; d < 3; ++d) {
                q1[d] = xp[d] - 2.0 * h * nu[d];
                q2[d] = xp[d] - 4.0 * h * nu[d];
            }
            if (signed_distance(pb.mask->shape, q2, n) > -1e-12)
                throw std::invalid_argument(
                    "pohozaev_terms: trace probe leaves the domain; refine the grid");
            double r1 = interp(u, q1) / std::pow(2.0 * h, s);
            double r2 = interp(u, q2) / std::pow(4.0 * h, s);
            double trace = 2.0 * r1 - r2;
            d2 += trace * trace * nx * patches.areas[i];
        }
    }
    t.D1 = -0.5 * d1;
    t.D2 = opts.include_fractional ? -0.5 * gs * gs * d2 : 0.0;

    t.residual = (t.A + t.B) - (t.C1 + t.C2 + t.D1 + t.D2);
    t.max_term = std::max({std::abs(t.A), std::abs(t.B), std::abs(t.C1), std::abs(t.C2),
                           std::abs(t.D1), std::abs(t.D2)});
    t.rel_residual = (t.max_term > 0) ? std::abs(t.residual) / t.max_term : 0.0;
    return t;
}

NonexistenceCheck nonexistence_criterion(int n, double p, double lambda) {
    if (n < 3 || !(p >= 1.0))
        throw std::invalid_argument("nonexistence_criterion: need n >= 3, p >= 1");
    NonexistenceCheck c;
    c.coefficient = n * (1.0 / (p + 1.0) - 0.5) + 1.0;
    c.criterion = (-lambda * c.coefficient >= 0.0);
    double pcrit = double(n + 2) / double(n - 2);
    c.corollary = (p >= pcrit && lambda >= 0.0) || (p < pcrit && lambda <= 0.0);
    return c;
}

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    double target) {
    SlopeFit f;
    f.x = x;
    f.y = y;
    f.target = target;
    std::vector<double> lx, ly;
    for (std::size_t i = 0; i < x.size(); ++i) {
        if (x[i] > 0 && y[i] > 0) {
            lx.push_back(std::log(x[i]));
            ly.push_back(std::log(y[i]));
        }
    }
    std::size_t k = lx.size();
    if (k < 2) return f;
    double sx = 0, sy = 0, sxx = 0, sxy = 0, syy = 0;
    for (std::size_t i = 0; i < k; ++i) {
        sx += lx[i];
        sy += ly[i];
        sxx += lx[i] * lx[i];
        sxy += lx[i] * ly[i];
        syy += ly[i] * ly[i];
    }
    double den = k * sxx - sx * sx;
    f.slope = (k * sxy - sx * sy) / den;
    f.intercept = (sy - f.slope * sx) / k;
    double ss_tot = syy - sy * sy / k;
    double ss_res = 0;
    for (std::size_t i = 0; i < k; ++i) {
        double e = ly[i] - (f.intercept + f.slope * lx[i]);
        ss_res += e * e;
    }
    f.r_squared = (ss_tot > 0) ? 1.0 - ss_res / ss_tot : 1.0;
    f.rel_deviation = (target != 0) ? std::abs(f.slope - target) / std::abs(target) : 0.0;
    double xmin = *std::min_element(x.begin(), x.end());
    double xmax = *std::max_element(x.begin(), x.end());
    f.spans_decade = (xmax >= 10.0 * xmin);
    f.valid = (k >= 4) && f.spans_decade;
    return f;
}

namespace {

// C^3 compact polynomial bump (1 - |x/r|^2)^4 on |x| < r
double poly_bump(const double x[3], int n, double r) {
    double q = 0;
    for (int d = 0; d < n; ++d) q += x[d] * x[d];
    q /= r * r;
    if (q >= 1.0) return 0.0;
    double w = 1.0 - q;
    return w * w * w * w;
}

}  // namespace

ScalingExperiment scaling_experiment(int n, double s, double mu, int m, double L,
                                     double bump_radius, const std::vector<double>& ks) {
    for (double k : ks)
        if (k < 1.0)
            throw std::invalid_argument("scaling_experiment: k >= 1 keeps the support inside");
    Grid g = build_grid(n, L, m);
    if (!(bump_radius < L - 3 * g.h))
        throw std::invalid_argument("scaling_experiment: bump support escapes the box");
    // compact support: a ball domain mask keeps the exact (closed) forms
    Shape dom;
    dom.kind = ShapeKind::ball;
    dom.r = 0.5 * (bump_radius + L - 2.0 * g.h);
    MaskPtr wb = build_domain(dom, g);
    TablePtr gag = gagliardo_table(g, s);
    TablePtr rt = riesz_table(g, mu);
    Exponents ex = compute_exponents(n, mu);

    ScalingExperiment out;
    out.s = s;
    for (double k : ks) {
        Field u(wb);
        const double amp = std::pow(k, 0.5 * (n - 2.0));
#pragma omp parallel for schedule(static)
        for (index_t id = 0; id < g.num_nodes(); ++id) {
            double x[3];
            g.node_coords(id, x);
            double xk[3];
            for (int d = 0; d < 3; ++d) xk[d] = k * x[d];
            u.v[id] = amp * poly_bump(xk, n, bump_radius);
        }
        ScalingRow row;
        row.k = k;
        double hl2 = std::pow(hl_pair(u, *rt, ex.two_mu_star), 1.0 / ex.two_mu_star);
        row.local_quotient = dirichlet_energy(u) / hl2;
        row.frac_quotient = gagliardo_sq(u, *gag) / hl2;
        row.total = row.local_quotient + row.frac_quotient;
        out.rows.push_back(row);
    }
    const ScalingRow& base = out.rows.front();
    for (const auto& row : out.rows) {
        out.max_local_dev = std::max(out.max_local_dev,
                                     std::abs(row.local_quotient / base.local_quotient - 1.0));
        double expected = base.frac_quotient * std::pow(row.k / base.k, 2.0 * s - 2.0);
        out.max_frac_scaling_dev =
            std::max(out.max_frac_scaling_dev, std::abs(row.frac_quotient / expected - 1.0));
    }
    return out;
}

BubbleLimitExperiment bubble_limit_experiment(int n, double s, double mu, int m,
                                              double L0, const std::vector<double>& ts) {
    (void)mu;
    BubbleLimitExperiment out;
    out.s = s;
    const double Ls[3] = {L0, 2 * L0, 4 * L0};
    const int ms[2] = {m, m / 2};
    // dir[m][L][t], one table build per (L, m); trailing entry is the t = 1
    // Dirichlet reference for ||U||^2
    std::vector<double> dir[2][3], gag[2][3];
    for (int im = 0; im < 2; ++im)
        for (int iL = 0; iL < 3; ++iL) {
            Grid g = build_grid(n, Ls[iL], ms[im]);
            MaskPtr wb = wholebox_mask(g);
            TablePtr tab = gagliardo_table(g, s);
            for (double t : ts) {
                Bubble b;
                b.t = t;
                Field V = bubble_field(b, wb);
                dir[im][iL].push_back(dirichlet_energy(V));
                gag[im][iL].push_back(gagliardo_sq(V, *tab));
            }
            Bubble b1;
            Field V1 = bubble_field(b1, wb);
            dir[im][iL].push_back(dirichlet_energy(V1));
        }
    auto extrapolate = [&](std::vector<double>* perL_fine, std::vector<double>* perL_coarse,
                           std::size_t idx) {
        double fine = 2.0 * perL_fine[2][idx] - perL_fine[1][idx];
        double coarse = 2.0 * perL_coarse[2][idx] - perL_coarse[1][idx];
        return (4.0 * fine - coarse) / 3.0;
    };
    std::vector<double> gsq;
    for (std::size_t i = 0; i < ts.size(); ++i) {
        BubbleLimitRow row;
        row.t = ts[i];
        row.dirichlet = extrapolate(dir[0], dir[1], i);
        row.gagliardo = extrapolate(gag[0], gag[1], i);
        row.g_sq = row.dirichlet + row.gagliardo;
        out.rows.push_back(row);
        gsq.push_back(row.g_sq);
    }
    out.u_norm_sq = extrapolate(dir[0], dir[1], ts.size());  // the trailing t=1 entry
    // least-squares fit of G^2 = a + b tau, tau = t^{2-2s}
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t k = ts.size();
        for (std::size_t i = 0; i < k; ++i) {
            double tau = std::pow(ts[i], 2.0 - 2.0 * s);
            sx += tau;
            sy += gsq[i];
            sxx += tau * tau;
            sxy += tau * gsq[i];
        }
        double den = k * sxx - sx * sx;
        out.fitted_coefficient = (k * sxy - sx * sy) / den;
        out.fitted_intercept = (sy - out.fitted_coefficient * sx) / k;
    }
    std::vector<double> diffs;
    for (double v : gsq) diffs.push_back(v - out.u_norm_sq);
    out.exponent_fit = fit_loglog(ts, diffs, 2.0 - 2.0 * s);
    double tmin_gsq = gsq.back();
    for (std::size_t i = 0; i < ts.size(); ++i)
        if (ts[i] == *std::min_element(ts.begin(), ts.end())) tmin_gsq = gsq[i];
    out.limit_gap = std::abs(tmin_gsq - out.u_norm_sq) / out.u_norm_sq;
    return out;
}

double nu_sn(int n, double s) { return std::min(double(n) - 2.0, 2.0 - 2.0 * s); }

Lemma45Experiment lemma45_asymptotics(const Problem& pb, double s, int m,
                                      const std::vector<double>& eps_list,
                                      double s_hat, double c_hat) {
    const Grid& gfine = pb.mask->grid;
    if (gfine.m != m)
        throw std::invalid_argument("lemma45_asymptotics: problem grid must match m");
    if (eps_list.size() < 2)
        throw std::invalid_argument("lemma45_asymptotics: need several eps values");
    double emax = *std::max_element(eps_list.begin(), eps_list.end());
    double emin = *std::min_element(eps_list.begin(), eps_list.end());
    double r_in = pb.mask->shape.r;
    double delta_c = 0.5 * r_in;
    if (emax > delta_c / 4.0 + 1e-12)
        throw std::invalid_argument("lemma45_asymptotics: eps exceeds delta_c / 4");
    if (emin < 4.0 * gfine.h - 1e-12)
        throw std::invalid_argument("lemma45_asymptotics: eps below 4h is unresolved");

    // coarse twin for h-extrapolation
    Grid gco = build_grid(gfine.n, gfine.L, m / 2);
    MaskPtr mco = build_domain(pb.mask->shape, gco);
    TablePtr gag_f = (std::abs(s - pb.gag->s) < 1e-14) ? pb.gag : gagliardo_table(gfine, s);
    TablePtr gag_c = gagliardo_table(gco, s);

    Lemma45Experiment out;
    out.eps = eps_list;
    out.nu_sn = nu_sn(gfine.n, s);
    for (double eps : eps_list) {
        Bubble b;
        b.variant = BubbleVariant::v_eps;
        b.t = eps;
        b.x0 = pb.mask->shape.center;
        b.cutoff_radius = delta_c;
        b.domain_radius = r_in;
        Field vf = bubble_field(b, pb.mask);
        Field vc = bubble_field(b, mco);
        auto rich = [](double fine, double coarse) { return (4.0 * fine - coarse) / 3.0; };
        out.norm_sq.push_back(rich(dirichlet_energy(vf), dirichlet_energy(vc)));
        out.gag_sq.push_back(rich(gagliardo_sq(vf, *gag_f), gagliardo_sq(vc, *gag_c)));
        out.lp.push_back(
            rich(lp_integral(vf, pb.p + 1.0), lp_integral(vc, pb.p + 1.0)));
    }

    // (i): consecutive differences of the norm against the smaller eps
    std::vector<double> dx, dy;
    for (std::size_t i = 0; i + 1 < eps_list.size(); ++i) {
        dx.push_back(eps_list[i]);  // eps sorted decreasing by convention
        dy.push_back(std::abs(out.norm_sq[i] - out.norm_sq[i + 1]));
    }
    out.fit_norm = fit_loglog(dx, dy, double(gfine.n) - 2.0);
    out.fit_gag = fit_loglog(eps_list, out.gag_sq, 2.0 * out.nu_sn);
    double p = pb.p;
    out.fit_lp = fit_loglog(eps_list, out.lp,
                            double(gfine.n) - (gfine.n - 2.0) * (p + 1.0) / 2.0);

    // extrapolated limit of ||v_eps||^2 via LS fit a + b eps^{n-2}
    {
        double sx = 0, sy = 0, sxx = 0, sxy = 0;
        std::size_t k = eps_list.size();
        for (std::size_t i = 0; i < k; ++i) {
            double t = std::pow(eps_list[i], double(gfine.n) - 2.0);
            sx += t;
            sy += out.norm_sq[i];
            sxx += t * t;
            sxy += t * out.norm_sq[i];
        }
        double den = k * sxx - sx * sx;
        double bcoef = (k * sxy - sx * sy) / den;
        out.extrapolated_norm_limit = (sy - bcoef * sx) / k;
    }
    if (s_hat > 0 && c_hat > 0) {
        const int n = gfine.n;
        out.predicted_norm_limit =
            std::pow(c_hat, (n - 2.0) / (2.0 * n - pb.mu) * 0.5 * n) *
            std::pow(s_hat, 0.5 * n);
        out.limit_consistency =
            std::abs(out.extrapolated_norm_limit - out.predicted_norm_limit) /
            out.predicted_norm_limit;
    }
    return out;
}

namespace {

Field random_field(const MaskPtr& mask, std::mt19937_64& rng) {
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(mask);
    for (index_t i = 0; i < index_t(f.v.size()); ++i)
        f.v[i] = mask->inside[i] ? dist(rng) : 0.0;
    return f;
}

void add_entry(OracleReport& rep, const std::string& name, double dev, double tol) {
    OracleReport::Entry e;
    e.name = name;
    e.max_deviation = dev;
    e.tolerance = tol;
    e.pass = dev <= tol;
    rep.entries.push_back(e);
    rep.all_pass = rep.all_pass && e.pass;
}

}  // namespace

OracleReport oracle_suite(unsigned seed) {
    OracleReport rep;
    rep.seed = seed;
    std::mt19937_64 rng(seed);

    for (int n = 1; n <= 3; ++n) {
        Grid g = build_grid(n, 1.0, 8);
        Shape ball;
        ball.kind = ShapeKind::ball;
        ball.r = 0.45;
        MaskPtr mask = build_domain(ball, g);
        double s = 0.5 + 0.1 * n;
        double mu = 0.4 * n;
        TablePtr gag = gagliardo_table(g, s);
        TablePtr rt = riesz_table(g, mu);
        std::string tag = "n=" + std::to_string(n);

        // kernel symmetry oracle
        double sym_dev = 0;
        for (int zz = (n > 2 ? -(g.m - 1) : 0); zz <= (n > 2 ? g.m - 1 : 0); ++zz)
            for (int zy = (n > 1 ? -(g.m - 1) : 0); zy <= (n > 1 ? g.m - 1 : 0); ++zy)
                for (int zx = -(g.m - 1); zx <= g.m - 1; ++zx) {
                    sym_dev = std::max(sym_dev, std::abs(gag->at(zx, zy, zz) -
                                                         gag->at(-zx, -zy, -zz)));
                    sym_dev = std::max(sym_dev, std::abs(rt->at(zx, zy, zz) -
                                                         rt->at(-zx, -zy, -zz)));
                }
        add_entry(rep, "kernel evenness " + tag, sym_dev, 0.0);

        Field u = random_field(mask, rng);
        Field v = random_field(mask, rng);

        // FFT vs direct double sums
        {
            double a = gagliardo_sq(u, *gag);
            double b = ref::gagliardo_sq(u, *gag);
            add_entry(rep, "gagliardo fft vs direct " + tag, std::abs(a - b), 1e-10);
        }
        {
            Field w = u;
            abs_project(w);
            Field a = riesz_potential(w, *rt);
            Field b = ref::riesz_potential(w, *rt);
            double dev = 0;
            for (index_t i = 0; i < index_t(a.v.size()); ++i)
                dev = std::max(dev, std::abs(a.v[i] - b.v[i]));
            add_entry(rep, "riesz fft vs direct " + tag, dev, 1e-10);
        }
        {
            Field a = apply_mixed(u, *gag);
            Field b = ref::apply_mixed(u, *gag);
            double dev = 0;
            for (index_t i = 0; i < index_t(a.v.size()); ++i)
                dev = std::max(dev, std::abs(a.v[i] - b.v[i]));
            add_entry(rep, "operator fft vs direct " + tag, dev, 1e-9 / (g.h * g.h));
        }
        // form/operator consistency and adjointness
        {
            double lhs = dot(apply_mixed(u, *gag), u);
            double rhs = mixed_norm_sq(u, *gag);
            add_entry(rep, "form vs operator " + tag,
                      std::abs(lhs - rhs) / std::abs(rhs), 1e-11);
            double uv = dot(apply_mixed(u, *gag), v);
            double vu = dot(apply_mixed(v, *gag), u);
            add_entry(rep, "operator adjointness " + tag,
                      std::abs(uv - vu) / std::max(std::abs(uv), 1.0), 1e-11);
        }
        // gradient vs central differences (n = 3 only; Choquard needs n >= 3)
        if (n == 3) {
            Problem pb;
            pb.mask = mask;
            pb.gag = gag;
            pb.riesz = rt;
            pb.mu = mu;
            pb.p = 2.0;
            pb.exps = compute_exponents(n, mu);
            Field up = u;
            abs_project(up);
            Field grad = grad_energy(pb, up, 0.7);
            double eps = 1e-5;
            double dev = 0;
            for (int trial = 0; trial < 3; ++trial) {
                Field phi = random_field(mask, rng);
                Field upl = up, umi = up;
                axpy(upl, eps, phi);
                axpy(umi, -eps, phi);
                double jp = energy(pb, upl, 0.7).J;
                double jm = energy(pb, umi, 0.7).J;
                double fd = (jp - jm) / (2.0 * eps);
                double an = dot(grad, phi);
                dev = std::max(dev, std::abs(fd - an) / std::max(std::abs(an), 1e-12));
            }
            add_entry(rep, "gradient vs fd " + tag, dev, 1e-6);
        }
    }
    return rep;
}

}  // namespace mln
