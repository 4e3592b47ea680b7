// mlnlab: experiment driver for the mixed local-nonlocal Choquard laboratory.
//
// subcommands: eig quotient-scan mountain-pass pohozaev scaling bubble-limit
//              lemma45 hls-constant oracles
// exit codes:  0 all asserted invariants pass, 1 an invariant failed,
//              2 config validation error

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <random>
#include <string>

#include <CLI11.hpp>
#include <json.hpp>

#include "mln/choquard.hpp"
#include "mln/config.hpp"
#include "mln/fftconv.hpp"
#include "mln/forms.hpp"
#include "mln/report.hpp"
#include "mln/spectral.hpp"
#include "mln/variational.hpp"
#include "mln/verify.hpp"

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

struct Cli {
    std::string config_path;
    std::string outdir = "runs";
    long seed = 1;
    int jobs = 0;
    int m_override = 0;
};

struct RunContext {
    mln::Config cfg;
    std::string name;
    fs::path dir;
    json manifest;
    json report;
    mln::CsvWriter csv{""};
    std::vector<std::string> failures;

    void require(bool ok, const std::string& what) {
        if (!ok) failures.push_back(what);
        report["assertions"][what] = ok;
    }
};

[[noreturn]] void config_fail(const std::string& msg, int line) {
    std::fprintf(stderr, "config error: line %d: %s\n", line, msg.c_str());
    std::exit(2);
}

int geti(const mln::Config& c, const std::string& key) {
    double v = c.number(key);
    int i = int(v);
    if (double(i) != v) config_fail("expected an integer for " + key, c.line_of(key));
    return i;
}

mln::Grid make_grid(const mln::Config& cfg, int m_override) {
    int n = geti(cfg, "params.n");
    if (n < 1 || n > 3) config_fail("params.n must be 1, 2 or 3", cfg.line_of("params.n"));
    double L = cfg.number("grid.L");
    int m = m_override > 0 ? m_override : geti(cfg, "grid.m");
    if (m < 4 || m % 2) config_fail("grid.m must be even and >= 4", cfg.line_of("grid.m"));
    if (!(L > 0)) config_fail("grid.L must be positive", cfg.line_of("grid.L"));
    return mln::build_grid(n, L, m);
}

double get_s(const mln::Config& cfg) {
    double s = cfg.number("params.s");
    if (!(s > 0.0 && s < 1.0))
        config_fail("params.s must lie in the interval (0,1)", cfg.line_of("params.s"));
    return s;
}

double get_mu(const mln::Config& cfg, int n) {
    double mu = cfg.number("params.mu");
    if (!(mu > 0.0 && mu < n))
        config_fail("params.mu must lie in (0, n)", cfg.line_of("params.mu"));
    return mu;
}

double get_p(const mln::Config& cfg, int n) {
    double p = cfg.number_or("params.p", 1.0);
    double pmax = (n > 2) ? 2.0 * n / (n - 2.0) - 1.0 : 1e9;
    if (!(p >= 1.0 && p < pmax))
        config_fail("params.p must lie in [1, 2*-1)", cfg.has("params.p") ? cfg.line_of("params.p") : 0);
    return p;
}

mln::MaskPtr make_domain(const mln::Config& cfg, const mln::Grid& grid) {
    mln::Shape sh;
    std::string kind = cfg.str("domain.kind");
    if (kind == "ball")
        sh.kind = mln::ShapeKind::ball;
    else if (kind == "box")
        sh.kind = mln::ShapeKind::box;
    else if (kind == "ellipsoid")
        sh.kind = mln::ShapeKind::ellipsoid;
    else
        config_fail("domain.kind must be ball, box or ellipsoid", cfg.line_of("domain.kind"));
    if (sh.kind == mln::ShapeKind::ellipsoid) {
        auto ax = cfg.at("domain.axes").as_array();
        for (std::size_t d = 0; d < ax.size() && d < 3; ++d) sh.axes[d] = ax[d];
    } else {
        sh.r = cfg.number(sh.kind == mln::ShapeKind::ball ? "domain.r" : "domain.a");
    }
    if (cfg.has("domain.center")) {
        auto c = cfg.at("domain.center").as_array();
        for (std::size_t d = 0; d < c.size() && d < 3; ++d) sh.center[d] = c[d];
    }
    try {
        return mln::build_domain(sh, grid);
    } catch (const std::exception& e) {
        config_fail(e.what(), cfg.line_of("domain.kind"));
    }
}

json eigen_json(const mln::EigenResult& r) {
    return json{{"eigenvalue", r.eigenvalue},
                {"residual", r.residual},
                {"iterations", r.iterations},
                {"converged", r.converged}};
}

// ----------------------------------------------------------------- commands

void cmd_eig(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    double s = get_s(rc.cfg);
    mln::MaskPtr mask = make_domain(rc.cfg, g);
    mln::TablePtr gag = mln::gagliardo_table(g, s);

    mln::EigenResult local = mln::first_eigen_local(mask);
    mln::EigenResult frac = mln::first_eigen_fractional(mask, gag);
    mln::EigenResult mixed = mln::first_eigen_mixed(mask, gag);

    rc.csv.header({"spectrum", "eigenvalue", "residual", "iterations"});
    auto row = [&](const char* nm, const mln::EigenResult& r) {
        rc.csv.row({nm, mln::CsvWriter::num(r.eigenvalue), mln::CsvWriter::num(r.residual),
                    std::to_string(r.iterations)});
    };
    row("local", local);
    row("fractional", frac);
    row("mixed", mixed);

    rc.report["lambda_1_loc"] = eigen_json(local);
    rc.report["lambda_1_s"] = eigen_json(frac);
    rc.report["lambda_1"] = eigen_json(mixed);

    rc.require(local.converged && frac.converged && mixed.converged, "eigensolves converged");
    rc.require(mixed.eigenvalue >= local.eigenvalue + frac.eigenvalue,
               "superadditivity lambda_1 >= lambda_1_loc + lambda_1_s");
    rc.require(mixed.eigenvalue > frac.eigenvalue, "ordering lambda_1 > lambda_1_s");
    double mn = 1e300, mx = -1e300;
    for (mln::index_t i = 0; i < mln::index_t(mixed.eigenfield.v.size()); ++i)
        if (mask->inside[i]) {
            mn = std::min(mn, mixed.eigenfield.v[i]);
            mx = std::max(mx, mixed.eigenfield.v[i]);
        }
    rc.require(mn > 0 && mx > 0, "first eigenfield single-signed");
}

void cmd_oracles(RunContext& rc, const Cli& cli) {
    mln::OracleReport rep = mln::oracle_suite(unsigned(cli.seed));
    rc.csv.header({"oracle", "max_deviation", "tolerance", "pass"});
    for (const auto& e : rep.entries)
        rc.csv.row({e.name, mln::CsvWriter::num(e.max_deviation),
                    mln::CsvWriter::num(e.tolerance), e.pass ? "1" : "0"});
    rc.report["all_pass"] = rep.all_pass;
    rc.require(rep.all_pass, "all oracles pass");
}

void cmd_hls(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    double mu = get_mu(rc.cfg, g.n);
    if (g.n < 3) config_fail("hls-constant requires n = 3", rc.cfg.line_of("params.n"));
    double L0 = rc.cfg.number_or("hls.L0", 4.0);
    bool inv = rc.cfg.has("hls.invariance_checks") && rc.cfg.at("hls.invariance_checks").as_bool();
    mln::HlsEstimate est = mln::hls_constant_estimate(g.n, mu, g.m, L0, inv);
    rc.csv.header({"L", "quotient_fine", "quotient_coarse"});
    for (std::size_t i = 0; i < est.box_L.size(); ++i)
        rc.csv.row({mln::CsvWriter::num(est.box_L[i]), mln::CsvWriter::num(est.quotient_fine[i]),
                    mln::CsvWriter::num(est.quotient_coarse[i])});
    rc.report["s_hat"] = est.value;
    rc.report["err_estimate"] = est.err_estimate;
    rc.report["extrapolation_monotone"] = est.monotone;
    if (!est.monotone) rc.report["warning"] = "non-monotone truncation extrapolation";
    if (inv) {
        double tol = rc.cfg.number_or("hls.invariance_tol", 0.01);
        rc.report["scale_invariance_dev"] = est.scale_invariance_dev;
        rc.report["translation_invariance_dev"] = est.translation_invariance_dev;
        rc.require(est.scale_invariance_dev <= tol, "bubble quotient scale invariance");
        rc.require(est.translation_invariance_dev <= tol, "bubble quotient translation invariance");
    }
    rc.require(est.value > 0, "positive sharp-constant estimate");
}

void cmd_scaling(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    if (g.n < 3) config_fail("scaling requires n = 3 (HL norm)", rc.cfg.line_of("params.n"));
    double s = get_s(rc.cfg);
    double mu = get_mu(rc.cfg, g.n);
    std::vector<double> ks = rc.cfg.array_or("scaling.k", {1, 2, 4});
    double br = rc.cfg.number_or("scaling.bump_radius", 0.5 * g.L);
    auto ex = mln::scaling_experiment(g.n, s, mu, g.m, g.L, br, ks);
    rc.csv.header({"k", "local_quotient", "frac_quotient", "total"});
    for (const auto& r : ex.rows)
        rc.csv.row({mln::CsvWriter::num(r.k), mln::CsvWriter::num(r.local_quotient),
                    mln::CsvWriter::num(r.frac_quotient), mln::CsvWriter::num(r.total)});
    double tol_loc = rc.cfg.number_or("scaling.local_tol", 0.02);
    double tol_frac = rc.cfg.number_or("scaling.frac_tol", 0.03);
    rc.report["max_local_dev"] = ex.max_local_dev;
    rc.report["max_frac_scaling_dev"] = ex.max_frac_scaling_dev;
    rc.report["tolerances"] = {{"local", tol_loc}, {"frac", tol_frac}};
    rc.require(ex.max_local_dev <= tol_loc, "local quotient k-invariant");
    rc.require(ex.max_frac_scaling_dev <= tol_frac, "fractional quotient scales as k^{2s-2}");
    bool decreasing = true;
    for (std::size_t i = 1; i < ex.rows.size(); ++i)
        decreasing = decreasing && (ex.rows[i].total <= ex.rows[i - 1].total);
    rc.require(decreasing, "total quotient decreases toward the local quotient");
}

void cmd_bubble_limit(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    if (g.n < 3) config_fail("bubble-limit requires n = 3", rc.cfg.line_of("params.n"));
    double s = get_s(rc.cfg);
    double mu = get_mu(rc.cfg, g.n);
    double L0 = rc.cfg.number_or("bubble.L0", 4.0);
    std::vector<double> ts = rc.cfg.array_or("bubble.t", {1.0, 0.5, 0.25, 0.125});
    auto ex = mln::bubble_limit_experiment(g.n, s, mu, g.m, L0, ts);
    rc.csv.header({"t", "g_sq", "dirichlet", "gagliardo", "g_sq_minus_unorm"});
    for (const auto& r : ex.rows)
        rc.csv.row({mln::CsvWriter::num(r.t), mln::CsvWriter::num(r.g_sq),
                    mln::CsvWriter::num(r.dirichlet), mln::CsvWriter::num(r.gagliardo),
                    mln::CsvWriter::num(r.g_sq - ex.u_norm_sq)});
    double tol_exp = rc.cfg.number_or("bubble.exponent_tol", 0.10);
    double tol_lim = rc.cfg.number_or("bubble.limit_tol", 0.05);
    rc.report["u_norm_sq"] = ex.u_norm_sq;
    rc.report["fitted_exponent"] = ex.exponent_fit.slope;
    rc.report["target_exponent"] = 2.0 - 2.0 * s;
    rc.report["exponent_rel_deviation"] = ex.exponent_fit.rel_deviation;
    rc.report["fit_r_squared"] = ex.exponent_fit.r_squared;
    rc.report["limit_gap"] = ex.limit_gap;
    rc.report["fitted_intercept"] = ex.fitted_intercept;
    rc.report["fitted_coefficient"] = ex.fitted_coefficient;
    rc.require(ex.exponent_fit.rel_deviation <= tol_exp, "G^2 - ||U||^2 scales as t^{2-2s}");
    rc.require(ex.limit_gap <= tol_lim, "G^2 at smallest t near ||U||^2");
}

void cmd_lemma45(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    if (g.n < 3) config_fail("lemma45 requires n = 3", rc.cfg.line_of("params.n"));
    double s = get_s(rc.cfg);
    double mu = get_mu(rc.cfg, g.n);
    double p = get_p(rc.cfg, g.n);
    mln::MaskPtr mask = make_domain(rc.cfg, g);
    mln::Problem pb = mln::Problem::make(mask, s, mu, p);
    std::vector<double> eps = rc.cfg.array_or("lemma45.eps", {});
    if (eps.empty()) {
        double emax = 0.5 * mask->shape.r / 4.0;
        double emin = 4.0 * g.h;
        int count = 5;
        for (int i = 0; i < count; ++i)
            eps.push_back(emax * std::pow(emin / emax, double(i) / (count - 1)));
    }
    double s_hat = rc.cfg.number_or("lemma45.s_hat", 0.0);
    double c_hat = rc.cfg.number_or("lemma45.c_hat", 0.0);
    if (s_hat <= 0) {
        mln::HlsEstimate est = mln::hls_constant_estimate(g.n, mu, std::min(g.m, 64), 4.0);
        s_hat = est.value;
        c_hat = mln::hls_riesz_constant_estimate(g.n, mu, std::min(g.m, 64), 4.0);
    }
    auto ex = mln::lemma45_asymptotics(pb, s, g.m, eps, s_hat, c_hat);
    rc.csv.header({"eps", "norm_sq", "gag_sq", "lp"});
    for (std::size_t i = 0; i < ex.eps.size(); ++i)
        rc.csv.row({mln::CsvWriter::num(ex.eps[i]), mln::CsvWriter::num(ex.norm_sq[i]),
                    mln::CsvWriter::num(ex.gag_sq[i]), mln::CsvWriter::num(ex.lp[i])});
    double tol = rc.cfg.number_or("lemma45.fit_tol", 0.15);
    double r2min = rc.cfg.number_or("lemma45.r2_min", 0.98);
    auto put_fit = [&](const char* nm, const mln::SlopeFit& f) {
        rc.report[nm] = {{"slope", f.slope},        {"target", f.target},
                         {"rel_deviation", f.rel_deviation}, {"r_squared", f.r_squared},
                         {"spans_decade", f.spans_decade},   {"valid", f.valid}};
    };
    put_fit("fit_norm", ex.fit_norm);
    put_fit("fit_gag", ex.fit_gag);
    put_fit("fit_lp", ex.fit_lp);
    rc.report["nu_sn"] = ex.nu_sn;
    rc.report["extrapolated_norm_limit"] = ex.extrapolated_norm_limit;
    rc.report["predicted_norm_limit"] = ex.predicted_norm_limit;
    rc.report["limit_consistency"] = ex.limit_consistency;
    rc.require(ex.fit_norm.rel_deviation <= tol && ex.fit_norm.r_squared >= r2min,
               "norm-deficit order n-2");
    rc.require(ex.fit_gag.rel_deviation <= tol && ex.fit_gag.r_squared >= r2min,
               "seminorm order 2 nu_sn");
    rc.require(ex.fit_lp.rel_deviation <= tol && ex.fit_lp.r_squared >= r2min,
               "subcritical term order n-(n-2)(p+1)/2");
}

void cmd_quotient_scan(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    if (g.n < 3) config_fail("quotient-scan requires n = 3", rc.cfg.line_of("params.n"));
    double s = get_s(rc.cfg);
    double mu = get_mu(rc.cfg, g.n);
    mln::MaskPtr mask = make_domain(rc.cfg, g);
    mln::Problem pb = mln::Problem::make(mask, s, mu, 1.0);

    mln::EigenResult frac = mln::first_eigen_fractional(mask, pb.gag);
    mln::EigenResult mixed = mln::first_eigen_mixed(mask, pb.gag);

    int points = int(rc.cfg.number_or("scan.points", 12));
    double max_rel = rc.cfg.number_or("scan.max_rel", 1.5);
    std::vector<double> lambdas;
    for (int i = 1; i <= points; ++i)
        lambdas.push_back(mixed.eigenvalue * max_rel * double(i) / points);

    mln::QuotientOptions qo;
    qo.max_iterations = int(rc.cfg.number_or("scan.max_iterations", 3000));
    mln::ScanResult sc = mln::lambda_star_scan(pb, lambdas, frac.eigenvalue,
                                               mixed.eigenvalue, mixed.eigenfield, qo);

    rc.csv.header({"lambda", "S", "converged", "iterations", "l2_sq"});
    for (const auto& r : sc.rows)
        rc.csv.row({mln::CsvWriter::num(r.lambda), mln::CsvWriter::num(r.S),
                    r.converged ? "1" : "0", std::to_string(r.iterations),
                    mln::CsvWriter::num(r.l2_sq)});
    rc.report["lambda_1_s"] = frac.eigenvalue;
    rc.report["lambda_1"] = mixed.eigenvalue;
    rc.report["plateau_value"] = sc.plateau_value;
    rc.report["plateau_scatter"] = sc.plateau_scatter;
    rc.report["plateau_tol"] = sc.plateau_tol;
    rc.report["lambda_hat_star"] = sc.lambda_hat_star;

    rc.require(sc.monotone, "S(lambda) non-increasing");
    // sign change behaviour: S positive iff lambda < lambda_1, one-step slack
    double step = lambdas.size() > 1 ? lambdas[1] - lambdas[0] : 0.0;
    bool sign_ok = true;
    for (const auto& r : sc.rows) {
        if (r.lambda < mixed.eigenvalue - step && r.S <= 0) sign_ok = false;
        if (r.lambda > mixed.eigenvalue + step && r.S >= 0) sign_ok = false;
    }
    rc.require(sign_ok, "S positive iff lambda < lambda_1 (one grid step)");
}

mln::MountainPassResult run_mountain_pass(RunContext& rc, const Cli& cli, mln::Problem& pb,
                                          double lambda, double* s_hat_out) {
    const mln::Grid& g = pb.mask->grid;
    double s_hat = rc.cfg.number_or("mp.s_hat", 0.0);
    if (s_hat <= 0) {
        mln::HlsEstimate est = mln::hls_constant_estimate(g.n, pb.mu, std::min(g.m, 64), 4.0);
        s_hat = est.value;
    }
    if (s_hat_out) *s_hat_out = s_hat;
    mln::MountainPassOptions mo;
    mo.s_hat = s_hat;
    mo.max_iterations = int(rc.cfg.number_or("mp.max_iterations", 2000));
    (void)cli;
    return mln::mountain_pass_solve(pb, lambda, mo);
}

double weak_form_residual(mln::Problem& pb, const mln::Field& u, double lambda,
                          unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    mln::Field grad = mln::grad_energy(pb, u, lambda);
    double worst = 0;
    for (int t = 0; t < 10; ++t) {
        mln::Field phi(pb.mask);
        for (mln::index_t i = 0; i < mln::index_t(phi.v.size()); ++i)
            phi.v[i] = pb.mask->inside[i] ? dist(rng) : 0.0;
        double lhs = mln::dot(grad, phi);
        double scale = std::abs(mln::dot(mln::apply_mixed(u, *pb.gag), phi)) + 1e-30;
        worst = std::max(worst, std::abs(lhs) / scale);
    }
    return worst;
}

void cmd_mountain_pass(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    if (g.n < 3) config_fail("mountain-pass requires n = 3", rc.cfg.line_of("params.n"));
    double s = get_s(rc.cfg);
    double mu = get_mu(rc.cfg, g.n);
    double p = get_p(rc.cfg, g.n);
    if (!(p > 1.0)) config_fail("mountain-pass needs p > 1", rc.cfg.line_of("params.p"));
    double lambda = rc.cfg.number("params.lambda");
    mln::MaskPtr mask = make_domain(rc.cfg, g);
    mln::Problem pb = mln::Problem::make(mask, s, mu, p);

    double s_hat = 0;
    mln::MountainPassResult res = run_mountain_pass(rc, cli, pb, lambda, &s_hat);

    rc.csv.header({"quantity", "value"});
    rc.csv.row({"level", mln::CsvWriter::num(res.level)});
    rc.csv.row({"threshold", mln::CsvWriter::num(res.threshold)});
    rc.csv.row({"grad_norm", mln::CsvWriter::num(res.grad_norm)});
    rc.csv.row({"iterations", std::to_string(res.iterations)});
    rc.csv.row({"min_inside", mln::CsvWriter::num(res.min_inside)});
    rc.csv.row({"effective_volume", mln::CsvWriter::num(res.effective_volume)});

    rc.report["s_hat"] = s_hat;
    rc.report["level"] = res.level;
    rc.report["threshold"] = res.threshold;
    rc.report["below_threshold"] = res.below_threshold;
    rc.report["converged"] = res.converged;
    rc.report["trivial_collapse"] = res.trivial_collapse;
    rc.report["min_inside"] = res.min_inside;

    bool expect_collapse =
        rc.cfg.has("mp.expect_collapse") && rc.cfg.at("mp.expect_collapse").as_bool();
    if (expect_collapse) {
        rc.require(res.trivial_collapse, "solver reports trivial collapse");
    } else {
        double wf = weak_form_residual(pb, res.solution, lambda, unsigned(cli.seed));
        rc.report["weak_form_residual"] = wf;
        rc.require(res.converged, "solver converged");
        rc.require(res.min_inside > 0, "solution positive inside");
        rc.require(res.below_threshold, "level below the compactness threshold");
        rc.require(wf <= rc.cfg.number_or("mp.weak_form_tol", 1e-5), "weak form residual");
    }
}

void cmd_pohozaev(RunContext& rc, const Cli& cli) {
    mln::Grid g = make_grid(rc.cfg, cli.m_override);
    if (g.n < 3) config_fail("pohozaev requires n = 3", rc.cfg.line_of("params.n"));
    double s = get_s(rc.cfg);
    double mu = get_mu(rc.cfg, g.n);
    double p = get_p(rc.cfg, g.n);
    double lambda = rc.cfg.number("params.lambda");
    mln::MaskPtr mask = make_domain(rc.cfg, g);
    mln::Problem pb = mln::Problem::make(mask, s, mu, p);

    mln::MountainPassResult res = run_mountain_pass(rc, cli, pb, lambda, nullptr);
    int patch_res = int(rc.cfg.number_or("pohozaev.patches", 2048));
    mln::BoundaryPatches patches = mln::boundary_patches(*mask, patch_res);
    mln::StarShapedness ss = mln::is_strictly_star_shaped(patches);
    mln::PohozaevTerms t = mln::pohozaev_terms(pb, res.solution, lambda, patches);

    rc.csv.header({"term", "value"});
    rc.csv.row({"A", mln::CsvWriter::num(t.A)});
    rc.csv.row({"B", mln::CsvWriter::num(t.B)});
    rc.csv.row({"C1", mln::CsvWriter::num(t.C1)});
    rc.csv.row({"C2", mln::CsvWriter::num(t.C2)});
    rc.csv.row({"D1", mln::CsvWriter::num(t.D1)});
    rc.csv.row({"D2", mln::CsvWriter::num(t.D2)});
    rc.csv.row({"residual", mln::CsvWriter::num(t.residual)});
    rc.csv.row({"rel_residual", mln::CsvWriter::num(t.rel_residual)});

    rc.report["terms"] = {{"A", t.A}, {"B", t.B},   {"C1", t.C1},
                          {"C2", t.C2}, {"D1", t.D1}, {"D2", t.D2}};
    rc.report["rel_residual"] = t.rel_residual;
    rc.report["strictly_star_shaped"] = ss.strictly_star_shaped;
    rc.report["min_nu_dot_x"] = ss.min_nu_dot_x;
    rc.report["solver_converged"] = res.converged;

    rc.require(std::isfinite(t.residual), "all terms finite");
    if (ss.strictly_star_shaped)
        rc.require(t.D1 <= 0 && t.D2 <= 0, "boundary terms nonpositive on star-shaped domain");
    double tol = rc.cfg.number_or("pohozaev.rel_tol", 0.10);
    rc.require(t.rel_residual <= tol, "relative residual within tolerance");
}

void run_command(const std::string& cmd, RunContext& rc, const Cli& cli) {
    if (cmd == "eig")
        cmd_eig(rc, cli);
    else if (cmd == "oracles")
        cmd_oracles(rc, cli);
    else if (cmd == "hls-constant")
        cmd_hls(rc, cli);
    else if (cmd == "scaling")
        cmd_scaling(rc, cli);
    else if (cmd == "bubble-limit")
        cmd_bubble_limit(rc, cli);
    else if (cmd == "lemma45")
        cmd_lemma45(rc, cli);
    else if (cmd == "quotient-scan")
        cmd_quotient_scan(rc, cli);
    else if (cmd == "mountain-pass")
        cmd_mountain_pass(rc, cli);
    else if (cmd == "pohozaev")
        cmd_pohozaev(rc, cli);
    else
        throw std::runtime_error("unknown subcommand: " + cmd);
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"mixed local-nonlocal Choquard laboratory"};
    app.require_subcommand(1);
    Cli cli;
    std::vector<CLI::App*> subs;
    for (const char* name : {"eig", "quotient-scan", "mountain-pass", "pohozaev", "scaling",
                             "bubble-limit", "lemma45", "hls-constant", "oracles"}) {
        CLI::App* sub = app.add_subcommand(name);
        sub->add_option("--config", cli.config_path);
        sub->add_option("--outdir", cli.outdir);
        sub->add_option("--seed", cli.seed);
        sub->add_option("--jobs", cli.jobs);
        sub->add_option("--m-override", cli.m_override);
        subs.push_back(sub);
    }
    CLI11_PARSE(app, argc, argv);
    std::string cmd = app.get_subcommands().front()->get_name();

    int jobs = cli.jobs > 0 ? cli.jobs : omp_get_max_threads();
    omp_set_num_threads(jobs);
    mln::fftconv::init_threads(jobs);

    RunContext rc;
    try {
        rc.cfg = cli.config_path.empty() ? mln::Config{} : mln::Config::parse_file(cli.config_path);
    } catch (const mln::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "%s\n", e.what());
        return 2;
    }
    rc.name = rc.cfg.has("name") ? rc.cfg.str("name") : cmd;
    rc.dir = fs::path(cli.outdir) / rc.name;
    fs::create_directories(rc.dir);
    rc.csv = mln::CsvWriter((rc.dir / "result.csv").string());

    auto t0 = std::chrono::steady_clock::now();
    try {
        run_command(cmd, rc, cli);
    } catch (const mln::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::invalid_argument& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    }
    double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();

    // manifest: config verbatim plus the run envelope
    json cfgj = json::object();
    for (const auto& [k, v] : rc.cfg.items()) {
        json jv;
        std::visit(
            [&](const auto& x) {
                using T = std::decay_t<decltype(x)>;
                if constexpr (std::is_same_v<T, std::vector<double>>)
                    jv = x;
                else
                    jv = x;
            },
            v.data);
        cfgj[k] = jv;
    }
    rc.manifest["config"] = cfgj;
    rc.manifest["subcommand"] = cmd;
    rc.manifest["seed"] = cli.seed;
    rc.manifest["jobs"] = jobs;
    rc.manifest["m_override"] = cli.m_override;
    rc.manifest["build"] = mln::git_describe();
    rc.manifest["wall_time_seconds"] = wall;

    mln::write_json((rc.dir / "manifest.json").string(), rc.manifest);
    mln::write_json((rc.dir / "report.json").string(), rc.report);
    rc.csv.write();

    if (!rc.failures.empty()) {
        for (const auto& f : rc.failures)
            std::fprintf(stderr, "invariant failed: %s\n", f.c_str());
        return 1;
    }
    std::printf("%s: ok (%.1fs)\n", cmd.c_str(), wall);
    return 0;
}
