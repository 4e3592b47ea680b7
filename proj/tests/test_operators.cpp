#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "mln/fftconv.hpp"
#include "mln/forms.hpp"
#include "mln/reference.hpp"

using namespace mln;

namespace {

Field random_field(const MaskPtr& mask, unsigned seed) {
    std::mt19937_64 rng(seed);
    std::uniform_real_distribution<double> dist(-1.0, 1.0);
    Field f(mask);
    for (index_t i = 0; i < index_t(f.v.size()); ++i)
        f.v[i] = mask->inside[i] ? dist(rng) : 0.0;
    return f;
}

MaskPtr small_ball(int n, int m, double r = 0.45) {
    Grid g = build_grid(n, 1.0, m);
    Shape b;
    b.kind = ShapeKind::ball;
    b.r = r;
    return build_domain(b, g);
}

}  // namespace

TEST_CASE("dirichlet energy: zero field and single spike") {
    Grid g = build_grid(1, 1.0, 8);
    Shape bx;
    bx.kind = ShapeKind::box;
    bx.r = 0.45;
    MaskPtr mask = build_domain(bx, g);
    Field z(mask);
    CHECK(dirichlet_energy(z) == 0.0);
    Field spike(mask);
    spike.v[4] = 1.0;
    spike.enforce_mask();
    REQUIRE(spike.v[4] == 1.0);
    // two links of slope 1/h: 2 (1/0.25)^2 0.25 = 8
    CHECK(dirichlet_energy(spike) == doctest::Approx(8.0).epsilon(1e-14));
    CHECK(ref::dirichlet_energy(spike) == doctest::Approx(8.0).epsilon(1e-14));
}

TEST_CASE("dirichlet energy of the interval eigenfunction converges") {
    // u = sin(pi x / a) on the box (-a, a) has -u'' = (pi/a)^2 u
    const double a = 0.75;
    Grid g = build_grid(1, 1.0, 128);
    Shape bx;
    bx.kind = ShapeKind::box;
    bx.r = a;
    MaskPtr mask = build_domain(bx, g);
    Field u(mask);
    for (index_t i = 0; i < g.num_nodes(); ++i) {
        double x[3];
        g.node_coords(i, x);
        u.v[i] = mask->inside[i] ? std::sin(std::numbers::pi * x[0] / a) : 0.0;
    }
    double target = std::pow(std::numbers::pi / a, 2.0) * u.l2_sq();
    CHECK(dirichlet_energy(u) == doctest::Approx(target).epsilon(0.02));
}

TEST_CASE("gagliardo_sq matches the direct double sum (1D spike)") {
    Grid g = build_grid(1, 1.0, 8);
    Shape bx;
    bx.kind = ShapeKind::box;
    bx.r = 0.45;
    MaskPtr mask = build_domain(bx, g);
    TablePtr w = gagliardo_table(g, 0.5);
    Field z(mask);
    CHECK(gagliardo_sq(z, *w) == 0.0);
    Field spike(mask);
    spike.v[3] = 1.0;
    spike.enforce_mask();
    CHECK(gagliardo_sq(spike, *w) ==
          doctest::Approx(ref::gagliardo_sq(spike, *w)).epsilon(1e-10));
}

TEST_CASE("FFT path equals the direct double sum on 8^n grids") {
    for (int n = 1; n <= 3; ++n) {
        MaskPtr mask = small_ball(n, 8);
        const Grid& g = mask->grid;
        TablePtr w = gagliardo_table(g, 0.3 + 0.15 * n);
        Field u = random_field(mask, 100 + n);
        CHECK(std::abs(gagliardo_sq(u, *w) - ref::gagliardo_sq(u, *w)) < 1e-10);
        Field a = apply_mixed(u, *w);
        Field b = ref::apply_mixed(u, *w);
        for (index_t i = 0; i < index_t(a.v.size()); ++i)
            CHECK(std::abs(a.v[i] - b.v[i]) < 1e-10 / (g.h * g.h));
    }
}

TEST_CASE("mixed norm is the sum of its parts and dominates both") {
    MaskPtr mask = small_ball(3, 16, 0.6);
    TablePtr w = gagliardo_table(mask->grid, 0.5);
    Field z(mask);
    CHECK(mixed_norm_sq(z, *w) == 0.0);
    Field u = random_field(mask, 5);
    double d = dirichlet_energy(u), s = gagliardo_sq(u, *w), m = mixed_norm_sq(u, *w);
    CHECK(m == doctest::Approx(d + s).epsilon(1e-12));
    CHECK(m >= d);
    CHECK(m >= s);
    CHECK(s > 0);
}

TEST_CASE("operator is the Riesz representer of the form") {
    MaskPtr mask = small_ball(3, 8);
    TablePtr w = gagliardo_table(mask->grid, 0.55);
    Field z(mask);
    Field Az = apply_mixed(z, *w);
    CHECK(Az.linf() == 0.0);
    for (unsigned seed = 0; seed < 20; ++seed) {
        Field u = random_field(mask, 200 + seed);
        Field v = random_field(mask, 300 + seed);
        double uv = dot(apply_mixed(u, *w), v);
        double vu = dot(u, apply_mixed(v, *w));
        CHECK(uv == doctest::Approx(vu).epsilon(1e-11));
        // polarization gives an independent route to a(u,v)
        Field upv = u, umv = u;
        axpy(upv, 1.0, v);
        axpy(umv, -1.0, v);
        double form = 0.25 * (mixed_norm_sq(upv, *w) - mixed_norm_sq(umv, *w));
        CHECK(uv == doctest::Approx(form).epsilon(1e-10));
        CHECK(dot(apply_mixed(u, *w), u) ==
              doctest::Approx(mixed_norm_sq(u, *w)).epsilon(1e-11));
        CHECK(mixed_norm_sq(u, *w) > 0);
    }
}

TEST_CASE("exterior zeros survive the operator and fields stay finite") {
    MaskPtr mask = small_ball(2, 12, 0.55);
    TablePtr w = gagliardo_table(mask->grid, 0.5);
    Field u = random_field(mask, 17);
    Field Au = apply_mixed(u, *w);
    CHECK(Au.all_finite());
    double outside_max = 0;
    for (index_t i = 0; i < index_t(Au.v.size()); ++i)
        if (!mask->inside[i]) outside_max = std::max(outside_max, std::abs(Au.v[i]));
    CHECK(outside_max == 0.0);
}

TEST_CASE("gagliardo scaling law k^{2s-2} on a refined 3D grid") {
    // u_k(x) = k^{(n-2)/2} u(kx), compact bump; continuum identity
    // [u_k]^2 = k^{2s-2} [u]^2
    const int m = 64;
    const double s = 0.5;
    Grid g = build_grid(3, 1.0, m);
    Shape b;
    b.kind = ShapeKind::ball;
    b.r = 0.92;
    MaskPtr mask = build_domain(b, g);
    TablePtr w = gagliardo_table(g, s);
    auto bump = [&](double k) {
        Field u(mask);
        for (index_t i = 0; i < g.num_nodes(); ++i) {
            double x[3];
            g.node_coords(i, x);
            double q = k * k * (x[0] * x[0] + x[1] * x[1] + x[2] * x[2]) / (0.81);
            double val = q < 1.0 ? std::pow(1.0 - q, 4.0) : 0.0;
            u.v[i] = mask->inside[i] ? std::sqrt(k) * val : 0.0;
        }
        return u;
    };
    double g1 = gagliardo_sq(bump(1.0), *w);
    double g2 = gagliardo_sq(bump(2.0), *w);
    CHECK(g2 / g1 == doctest::Approx(std::pow(2.0, 2.0 * s - 2.0)).epsilon(0.02));
}

TEST_CASE("gagliardo_sq is continuous in s") {
    MaskPtr mask = small_ball(2, 24, 0.6);
    const Grid& g = mask->grid;
    Field u(mask);
    for (index_t i = 0; i < g.num_nodes(); ++i) {
        double x[3];
        g.node_coords(i, x);
        double r2 = x[0] * x[0] + x[1] * x[1];
        u.v[i] = mask->inside[i] ? std::exp(-8.0 * r2) : 0.0;
    }
    for (double s : {0.3, 0.5, 0.7}) {
        double a = gagliardo_sq(u, *gagliardo_table(g, s));
        double b = gagliardo_sq(u, *gagliardo_table(g, s + 1e-3));
        CHECK(std::abs(b - a) <= 0.01 * a);
    }
}
