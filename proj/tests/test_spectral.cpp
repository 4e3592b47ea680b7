#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "mln/fftconv.hpp"
#include "mln/spectral.hpp"

using namespace mln;

namespace {
MaskPtr ball2d(double r, int m) {
    Grid g = build_grid(2, 1.0, m);
    Shape b;
    b.kind = ShapeKind::ball;
    b.r = r;
    return build_domain(b, g);
}
}  // namespace

TEST_CASE("fractional eigenvalue: domain monotonicity, positivity, residual") {
    MaskPtr small = ball2d(0.6, 48);
    MaskPtr large = ball2d(0.8, 48);
    TablePtr gag_s = gagliardo_table(small->grid, 0.5);
    EigenResult rs = first_eigen_fractional(small, gag_s);
    EigenResult rl = first_eigen_fractional(large, gag_s);
    CHECK(rs.converged);
    CHECK(rl.converged);
    CHECK(rs.eigenvalue > rl.eigenvalue);  // smaller domain, larger eigenvalue
    CHECK(rs.residual <= 1e-8 * rs.eigenvalue);

    // eigenfield positivity: min/max over inside nodes > 0
    double mn = 1e300, mx = -1e300;
    for (index_t i = 0; i < index_t(rs.eigenfield.v.size()); ++i)
        if (small->inside[i]) {
            mn = std::min(mn, rs.eigenfield.v[i]);
            mx = std::max(mx, rs.eigenfield.v[i]);
        }
    CHECK(mn > 0);
    CHECK(mn / mx > 0);
    CHECK(rs.eigenfield.l2() == doctest::Approx(1.0).epsilon(1e-10));
}

TEST_CASE("fractional eigenvalue scaling lambda_{1,s}(r) r^{2s} roughly constant") {
    const double s = 0.5;
    const int m = 64;
    auto lam = [&](double r) {
        MaskPtr mask = ball2d(r, m);
        TablePtr gag = gagliardo_table(mask->grid, s);
        return first_eigen_fractional(mask, gag).eigenvalue;
    };
    double a = lam(0.5) * std::pow(0.5, 2.0 * s);
    double b = lam(0.8) * std::pow(0.8, 2.0 * s);
    CHECK(std::abs(a - b) / b < 0.05);
}

TEST_CASE("mixed eigenvalue: superadditivity, ordering, Lagrange residual") {
    MaskPtr mask = ball2d(0.7, 48);
    TablePtr gag = gagliardo_table(mask->grid, 0.5);
    EigenResult loc = first_eigen_local(mask);
    EigenResult frac = first_eigen_fractional(mask, gag);
    EigenResult mixed = first_eigen_mixed(mask, gag);
    CHECK(loc.converged);
    CHECK(frac.converged);
    CHECK(mixed.converged);
    CHECK(mixed.eigenvalue >= loc.eigenvalue + frac.eigenvalue);
    CHECK(mixed.eigenvalue > frac.eigenvalue);
    // Lagrange condition through the operator
    MixedOperator op{mask, gag, true, true};
    Field r = op.apply(mixed.eigenfield);
    axpy(r, -mixed.eigenvalue, mixed.eigenfield);
    CHECK(r.l2() <= 1e-8 * mixed.eigenvalue);
}

TEST_CASE("Rayleigh consistency at the returned eigenfield") {
    MaskPtr mask = ball2d(0.7, 32);
    TablePtr gag = gagliardo_table(mask->grid, 0.4);
    for (int which = 0; which < 3; ++which) {
        MixedOperator op{mask, gag, which != 1, which != 0};
        EigenResult r = smallest_eigenvalue(op);
        double rq = op.energy(r.eigenfield) / r.eigenfield.l2_sq();
        CHECK(r.eigenvalue == doctest::Approx(rq).epsilon(1e-10));
    }
}

TEST_CASE("refinement stability of the eigenvalues (n = 2)") {
    auto lam_at = [&](int m) {
        MaskPtr mask = ball2d(0.7, m);
        TablePtr gag = gagliardo_table(mask->grid, 0.5);
        return first_eigen_mixed(mask, gag).eigenvalue;
    };
    double l32 = lam_at(32), l64 = lam_at(64);
    CHECK(std::abs(l32 - l64) / l64 <= 0.05);
}
