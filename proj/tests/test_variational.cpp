#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "mln/fftconv.hpp"
#include "mln/spectral.hpp"
#include "mln/variational.hpp"

using namespace mln;

namespace {

MaskPtr ball3d(double r, int m) {
    Grid g = build_grid(3, 1.0, m);
    Shape b;
    b.kind = ShapeKind::ball;
    b.r = r;
    return build_domain(b, g);
}

Field random_field(const MaskPtr& mask, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(mask);
    for (index_t i = 0; i < index_t(f.v.size()); ++i)
        f.v[i] = mask->inside[i] ? dist(rng) : 0.0;
    return f;
}

}  // namespace

TEST_CASE("energy breakdown: zero field, the defining identity, sign flips") {
    MaskPtr mask = ball3d(0.45, 8);
    Problem pb = Problem::make(mask, 0.5, 1.0, 1.0);
    Field z(mask);
    CHECK(energy(pb, z, 0.7).J == 0.0);

    Field u = random_field(mask, 2);
    for (double p : {1.0, 3.0}) {
        Problem pbp = Problem::make(mask, 0.5, 1.0, p);
        EnergyBreakdown e = energy(pbp, u, 0.9);
        double recon = 0.5 * e.g_sq - e.hl / (2.0 * pbp.exps.two_mu_star) -
                       0.9 * e.lp / (p + 1.0);
        double scale = std::max({std::abs(e.g_sq), std::abs(e.hl), std::abs(e.lp), 1e-30});
        CHECK(std::abs(e.J - recon) <= 1e-12 * scale);
        Field mu_ = u;
        mln::scale(mu_, -1.0);
        CHECK(energy(pbp, mu_, 0.9).J == doctest::Approx(e.J).epsilon(1e-13));
    }
    CHECK_THROWS(energy(Problem::make(mask, 0.5, 1.0, 5.0), u, 1.0));  // p >= 2*-1
}

TEST_CASE("mountain-pass geometry of the fiber map") {
    MaskPtr mask = ball3d(0.45, 8);
    Problem pb = Problem::make(mask, 0.5, 1.0, 2.0);
    Field u = random_field(mask, 7);
    abs_project(u);
    auto J_at = [&](double t) {
        Field tu = u;
        scale(tu, t);
        return energy(pb, tu, 1.0).J;
    };
    CHECK(J_at(1e-3) > 0.0);
    CHECK(J_at(1e3) < 0.0);
}

TEST_CASE("gradient matches central differences") {
    MaskPtr mask = ball3d(0.45, 8);
    for (double p : {1.0, 2.0}) {
        Problem pb = Problem::make(mask, 0.5, 1.0, p);
        double lambda = p == 1.0 ? 0.5 : 1.0;
        Field u = random_field(mask, 40);
        Field z(mask);
        Field gz = grad_energy(pb, z, lambda);
        CHECK(gz.linf() == 0.0);
        Field g = grad_energy(pb, u, lambda);
        const double eps = 1e-5;
        for (unsigned t = 0; t < 10; ++t) {
            Field phi = random_field(mask, 50 + t);
            Field up = u, um = u;
            axpy(up, eps, phi);
            axpy(um, -eps, phi);
            double fd = (energy(pb, up, lambda).J - energy(pb, um, lambda).J) / (2 * eps);
            double an = dot(g, phi);
            CHECK(fd == doctest::Approx(an).epsilon(1e-6));
        }
    }
}

TEST_CASE("fibering maximizer: covariance, stationarity, large-lambda collapse") {
    MaskPtr mask = ball3d(0.45, 8);
    Problem pb = Problem::make(mask, 0.5, 1.0, 2.0);
    Field u = random_field(mask, 9);
    abs_project(u);
    FiberResult f = fibering_max(pb, u, 1.0);
    CHECK(f.t_star > 0);
    CHECK(f.stationarity <= 1e-10 * mixed_norm_sq(u, *pb.gag));
    Field cu = u;
    scale(cu, 2.0);
    FiberResult f2 = fibering_max(pb, cu, 1.0);
    CHECK(f2.t_star == doctest::Approx(f.t_star / 2.0).epsilon(1e-8));
    // s_{lambda,eps} -> 0 as lambda -> infinity
    FiberResult fbig = fibering_max(pb, u, 1e4);
    CHECK(fbig.t_star < f.t_star);
    Field z(mask);
    CHECK_THROWS(fibering_max(pb, z, 1.0));
}

TEST_CASE("quotient minimization: multiplier identity and rescaled weak form") {
    MaskPtr mask = ball3d(0.6, 16);
    Problem pb = Problem::make(mask, 0.5, 1.0, 1.0);
    EigenResult em = first_eigen_mixed(mask, pb.gag);
    double lambda = 0.8 * em.eigenvalue;
    QuotientOptions qo;
    qo.max_iterations = 2500;
    qo.warm_start = &em.eigenfield;
    QuotientResult qr = quotient_minimize(pb, lambda, qo);
    CHECK(hl_norm(qr.minimizer, *pb.riesz, pb.exps.two_mu_star) ==
          doctest::Approx(1.0).epsilon(1e-10));
    CHECK(qr.S == doctest::Approx(mixed_norm_sq(qr.minimizer, *pb.gag) -
                                  lambda * qr.minimizer.l2_sq())
                      .epsilon(1e-10));
    // nu = P_lambda(psi) at the minimizer
    CHECK(qr.multiplier == doctest::Approx(qr.S).epsilon(1e-4));

    // u = S^{(n-2)/(2n+4-2mu)} psi satisfies the weak form
    double expo = (3.0 - 2.0) / (2.0 * 3 + 4.0 - 2.0 * 1.0);
    Field u = qr.minimizer;
    scale(u, std::pow(qr.S, expo));
    Field g = grad_energy(pb, u, lambda);
    Field Lu = apply_mixed(u, *pb.gag);
    double worst = 0;
    for (unsigned t = 0; t < 10; ++t) {
        Field phi = random_field(mask, 70 + t);
        worst = std::max(worst, std::abs(dot(g, phi)) /
                                    (std::abs(dot(Lu, phi)) + 1e-30));
    }
    CHECK(worst <= 2e-4);  // weak-form residual of the rescaled minimizer
}

TEST_CASE("P_lambda affinity and scan monotonicity on a small problem") {
    MaskPtr mask = ball3d(0.6, 16);
    Problem pb = Problem::make(mask, 0.5, 1.0, 1.0);
    EigenResult ef = first_eigen_fractional(mask, pb.gag);
    EigenResult em = first_eigen_mixed(mask, pb.gag);
    Field u = random_field(mask, 3);
    double p0 = mixed_norm_sq(u, *pb.gag);
    double lam = 1.7;
    CHECK(p0 - lam * u.l2_sq() ==
          doctest::Approx(mixed_norm_sq(u, *pb.gag) - lam * u.l2_sq()).epsilon(1e-15));

    std::vector<double> lambdas;
    for (int i = 1; i <= 6; ++i) lambdas.push_back(em.eigenvalue * 1.5 * i / 6.0);
    QuotientOptions qo;
    qo.max_iterations = 1200;
    ScanResult sc = lambda_star_scan(pb, lambdas, ef.eigenvalue, em.eigenvalue,
                                     em.eigenfield, qo);
    CHECK(sc.monotone);
    CHECK(sc.rows.back().S < 0.0);            // past lambda_1
    CHECK(sc.rows.front().S > 0.0);           // small lambda
    CHECK(sc.plateau_value > 0.0);
    CHECK(sc.lambda_hat_star >= ef.eigenvalue - sc.plateau_tol);
    CHECK(sc.lambda_hat_star < em.eigenvalue);
}

TEST_CASE("nonexistence shadow: S negative above lambda_1") {
    MaskPtr mask = ball3d(0.6, 16);
    Problem pb = Problem::make(mask, 0.5, 1.0, 1.0);
    EigenResult em = first_eigen_mixed(mask, pb.gag);
    QuotientOptions qo;
    qo.max_iterations = 1500;
    qo.warm_start = &em.eigenfield;
    QuotientResult qr = quotient_minimize(pb, 1.2 * em.eigenvalue, qo);
    CHECK(qr.S < 0.0);
}

TEST_CASE("mountain-pass threshold arithmetic") {
    // n=3, mu=1: coefficient (n+2-mu)/(4n-2mu) = 4/10, exponent 5/4
    CHECK(mountain_pass_threshold(3, 1.0, 1.0) == doctest::Approx(0.4).epsilon(1e-14));
    CHECK(mountain_pass_threshold(3, 1.0, 2.0) ==
          doctest::Approx(0.4 * std::pow(2.0, 1.25)).epsilon(1e-14));
}

TEST_CASE("mountain-pass solve finds a positive solution in the large-lambda regime") {
    MaskPtr mask = ball3d(0.8, 24);
    Problem pb = Problem::make(mask, 0.5, 1.0, 2.0);
    MountainPassOptions mo;
    mo.s_hat = 4.53;
    mo.max_iterations = 1500;
    MountainPassResult r = mountain_pass_solve(pb, 30.0, mo);
    CHECK(r.converged);
    CHECK_FALSE(r.trivial_collapse);
    CHECK(r.min_inside > 0);
    CHECK(r.level > 0);
    CHECK(r.level < r.threshold);
    CHECK(r.grad_norm <= 1e-6 * r.solution.l2());
    // mountain-pass geometry along the ray through the solution
    Field dir = r.solution;
    scale(dir, 1.0 / dir.l2());
    auto J_at = [&](double t) {
        Field tu = dir;
        scale(tu, t);
        return energy(pb, tu, 30.0).J;
    };
    CHECK(J_at(0.05) > 0.0);
    CHECK(J_at(50.0) < 0.0);
}
