#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <numbers>

#include "mln/grid.hpp"
#include "mln/quad.hpp"

using namespace mln;

TEST_CASE("build_grid spacing and preconditions") {
    CHECK(build_grid(1, 1.0, 8).h == doctest::Approx(0.25).epsilon(1e-15));
    CHECK(build_grid(3, 2.0, 16).h == doctest::Approx(0.25).epsilon(1e-15));
    CHECK_THROWS(build_grid(3, 1.0, 5));   // odd m
    CHECK_THROWS(build_grid(4, 1.0, 8));   // n > 3
    CHECK_THROWS(build_grid(2, -1.0, 8));
    CHECK_THROWS(build_grid(2, 1.0, 2));
    Grid g = build_grid(2, 1.0, 8);
    CHECK(g.m * g.h == doctest::Approx(2.0 * g.L).epsilon(1e-15));
    CHECK(g.coord(0) == doctest::Approx(-1.0 + 0.5 * g.h));
}

TEST_CASE("build_domain ball delta and clearance") {
    Grid g = build_grid(3, 1.0, 32);
    Shape ball;
    ball.kind = ShapeKind::ball;
    ball.r = 0.8;
    MaskPtr mask = build_domain(ball, g);
    // center node sits at h*sqrt(3)/2 from the origin
    int ic[3] = {16, 16, 16};
    index_t id = g.flatten(ic);
    double xc = std::sqrt(3.0) * 0.5 * g.h;
    CHECK(mask->inside[id]);
    CHECK(mask->delta[id] == doctest::Approx(0.8 - xc).epsilon(1e-13));

    Shape tight = ball;
    tight.r = 0.99;  // clearance 0.01 < 2h
    CHECK_THROWS(build_domain(tight, g));
}

TEST_CASE("build_domain box inside count vs direct enumeration") {
    Grid g = build_grid(2, 1.0, 16);
    Shape box;
    box.kind = ShapeKind::box;
    box.r = 0.5;
    MaskPtr mask = build_domain(box, g);
    index_t expect = 0;
    for (index_t id = 0; id < g.num_nodes(); ++id) {
        double x[3];
        g.node_coords(id, x);
        if (std::max(std::abs(x[0]), std::abs(x[1])) < 0.5) ++expect;
    }
    CHECK(mask->inside_count == expect);
    CHECK(mask->inside_count > 0);
}

TEST_CASE("domain reflection symmetry for centrally symmetric shapes") {
    Grid g = build_grid(2, 1.0, 24);
    for (ShapeKind kind : {ShapeKind::ball, ShapeKind::box}) {
        Shape s;
        s.kind = kind;
        s.r = 0.6;
        MaskPtr mask = build_domain(s, g);
        for (index_t id = 0; id < g.num_nodes(); ++id) {
            int ix[3];
            g.unflatten(id, ix);
            int rx[3] = {g.m - 1 - ix[0], g.m - 1 - ix[1], 0};
            CHECK(mask->inside[id] == mask->inside[g.flatten(rx)]);
        }
    }
}

TEST_CASE("ball delta is exactly r - |x| at every inside node") {
    Grid g = build_grid(2, 1.0, 20);
    Shape s;
    s.kind = ShapeKind::ball;
    s.r = 0.55;
    MaskPtr mask = build_domain(s, g);
    for (index_t id = 0; id < g.num_nodes(); ++id) {
        if (!mask->inside[id]) continue;
        double x[3];
        g.node_coords(id, x);
        double rr = std::hypot(x[0], x[1]);
        CHECK(mask->delta[id] == doctest::Approx(0.55 - rr).epsilon(1e-13));
        CHECK(mask->delta[id] > 0);
    }
}

TEST_CASE("boundary patches: sphere area, radial normals") {
    Grid g = build_grid(3, 2.0, 16);
    Shape s;
    s.kind = ShapeKind::ball;
    s.r = 1.0;
    MaskPtr mask = build_domain(s, g);
    BoundaryPatches bp = boundary_patches(*mask, 2048);
    CHECK(bp.total_area() == doctest::Approx(4.0 * std::numbers::pi).epsilon(1e-3));
    for (std::size_t i = 0; i < bp.points.size(); ++i) {
        double nn = 0, nx = 0;
        for (int d = 0; d < 3; ++d) {
            nn += bp.normals[i][d] * bp.normals[i][d];
            nx += bp.normals[i][d] * bp.points[i][d];
        }
        CHECK(std::abs(std::sqrt(nn) - 1.0) < 1e-12);
        CHECK(nx == doctest::Approx(1.0).epsilon(1e-12));  // nu.x = r on the sphere
    }
}

TEST_CASE("boundary patches: ellipse perimeter vs adaptive arc-length") {
    Grid g = build_grid(2, 2.0, 32);
    Shape s;
    s.kind = ShapeKind::ellipsoid;
    s.axes = {1.0, 0.5, 0.0};
    MaskPtr mask = build_domain(s, g);
    BoundaryPatches bp = boundary_patches(*mask, 4096);
    // independent oracle: high-resolution arc length quadrature
    double arc = quad::gl_panels(
        [&](double t) {
            double dx = -1.0 * std::sin(t), dy = 0.5 * std::cos(t);
            return std::sqrt(dx * dx + dy * dy);
        },
        0.0, 2.0 * std::numbers::pi, 4096);
    CHECK(bp.total_area() == doctest::Approx(arc).epsilon(1e-6));
}

TEST_CASE("patch quadrature converges under refinement") {
    // patch areas are near-exact by construction (per-patch Gauss), so the
    // refinement property is exercised on a smooth non-constant integrand
    Grid g = build_grid(2, 2.0, 32);
    Shape s;
    s.kind = ShapeKind::ellipsoid;
    s.axes = {1.0, 0.55, 0.0};
    MaskPtr mask = build_domain(s, g);
    CHECK(std::abs(boundary_patches(*mask, 64).total_area() -
                   boundary_patches(*mask, 1024).total_area()) < 1e-10);
    auto integral = [&](int K) {
        BoundaryPatches bp = boundary_patches(*mask, K);
        double acc = 0;
        for (std::size_t i = 0; i < bp.points.size(); ++i)
            acc += bp.points[i][0] * bp.points[i][0] * bp.areas[i];
        return acc;
    };
    double exact = quad::gl_panels(
        [&](double t) {
            double dx = -1.0 * std::sin(t), dy = 0.55 * std::cos(t);
            double x = std::cos(t);
            return x * x * std::sqrt(dx * dx + dy * dy);
        },
        0.0, 2.0 * std::numbers::pi, 8192);
    double e1 = std::abs(integral(64) - exact);
    double e2 = std::abs(integral(128) - exact);
    CHECK(e2 * 2.0 <= e1 + 1e-14);
}

TEST_CASE("star-shapedness classification") {
    Grid g = build_grid(3, 2.0, 16);
    Shape ball;
    ball.kind = ShapeKind::ball;
    ball.r = 1.0;
    auto bp = boundary_patches(*build_domain(ball, g), 2048);
    auto ss = is_strictly_star_shaped(bp);
    CHECK(ss.strictly_star_shaped);
    CHECK(ss.min_nu_dot_x == doctest::Approx(1.0).epsilon(1e-12));

    Shape off;
    off.kind = ShapeKind::ball;
    off.r = 0.5;
    off.center = {0.6, 0.0, 0.0};
    auto bp2 = boundary_patches(*build_domain(off, g), 2048);
    auto ss2 = is_strictly_star_shaped(bp2);
    CHECK_FALSE(ss2.strictly_star_shaped);  // |center| > r: some nu.x < 0
    CHECK(ss2.min_nu_dot_x < 0);

    Shape box;
    box.kind = ShapeKind::box;
    box.r = 0.5;
    auto bp3 = boundary_patches(*build_domain(box, g), 2048);
    auto ss3 = is_strictly_star_shaped(bp3);
    CHECK(ss3.strictly_star_shaped);
    CHECK(ss3.min_nu_dot_x == doctest::Approx(0.5).epsilon(1e-12));
}
