#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <string>
#include <vector>

namespace mln {

using index_t = std::int64_t;

// Uniform cell-centered tensor grid on [-L,L]^n.  Node i along an axis sits
// at x = -L + (i + 1/2) h with h = 2L/m, so no node lies on a box face.
struct Grid {
    int n = 0;        // spatial dimension, 1..3
    double L = 0;     // box half-width
    int m = 0;        // nodes per axis (even)
    double h = 0;     // spacing, 2L/m

    std::array<int, 3> dims{1, 1, 1};  // m along the first n axes, 1 beyond

    index_t num_nodes() const { return index_t(dims[0]) * dims[1] * dims[2]; }

    double coord(int i) const { return -L + (i + 0.5) * h; }

    void unflatten(index_t id, int ix[3]) const {
        ix[0] = int(id % dims[0]);
        ix[1] = int((id / dims[0]) % dims[1]);
        ix[2] = int(id / (index_t(dims[0]) * dims[1]));
    }
    index_t flatten(const int ix[3]) const {
        return ix[0] + index_t(dims[0]) * (ix[1] + index_t(dims[1]) * ix[2]);
    }
    void node_coords(index_t id, double x[3]) const {
        int ix[3];
        unflatten(id, ix);
        for (int d = 0; d < 3; ++d) x[d] = (d < n) ? coord(ix[d]) : 0.0;
    }
    double cell_volume() const {
        double v = 1;
        for (int d = 0; d < n; ++d) v *= h;
        return v;
    }
};

// build_grid: n in {1,2,3}, m >= 4 even, L > 0.  Throws std::invalid_argument.
Grid build_grid(int n, double L, int m);

enum class ShapeKind { ball, box, ellipsoid, wholebox };

struct Shape {
    ShapeKind kind = ShapeKind::ball;
    double r = 0;                       // ball radius / box half-width a
    std::array<double, 3> axes{0, 0, 0};   // ellipsoid semi-axes
    std::array<double, 3> center{0, 0, 0};
};

// Indicator of the computational domain plus the exact boundary distance at
// inside nodes.  kind == wholebox marks fields living on the whole box with
// open (restriction) truncation semantics instead of extension by zero; the
// quadratic forms check this flag.
struct DomainMask {
    Grid grid;
    Shape shape;
    std::vector<std::uint8_t> inside;  // one per node
    std::vector<double> delta;         // dist(x, boundary); 0 at outside nodes
    index_t inside_count = 0;

    bool is_wholebox() const { return shape.kind == ShapeKind::wholebox; }
};

using MaskPtr = std::shared_ptr<const DomainMask>;

// Analytic signed distance (< 0 inside).  Used by build_domain and tests.
double signed_distance(const Shape& s, const double x[3], int n);

// build_domain: shape must clear every box face by >= 2h.  Throws on
// violation or on empty interior.
MaskPtr build_domain(const Shape& shape, const Grid& grid);

// All-inside mask for whole-space experiments (open truncation).
MaskPtr wholebox_mask(const Grid& grid);

// Surface quadrature from the analytic parametrization: points on the
// boundary, exact unit outward normals, and patch areas.
struct BoundaryPatches {
    std::vector<std::array<double, 3>> points;
    std::vector<std::array<double, 3>> normals;
    std::vector<double> areas;
    double total_area() const;
};

// resolution: number of patches (per parametrization; the constructor may
// round up to fill the product structure).  Ball/box/ellipsoid only.
BoundaryPatches boundary_patches(const DomainMask& mask, int resolution);

struct StarShapedness {
    bool strictly_star_shaped = false;
    double min_nu_dot_x = 0;
};

StarShapedness is_strictly_star_shaped(const BoundaryPatches& patches);

}  // namespace mln
