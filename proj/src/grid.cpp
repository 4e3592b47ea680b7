#include "mln/grid.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>

namespace mln {

Grid build_grid(int n, double L, int m) {
    if (n < 1 || n > 3) throw std::invalid_argument("build_grid: n must be 1, 2 or 3");
    if (m < 4) throw std::invalid_argument("build_grid: m must be >= 4");
    if (m % 2 != 0) throw std::invalid_argument("build_grid: m must be even");
    if (!(L > 0)) throw std::invalid_argument("build_grid: L must be positive");
    Grid g;
    g.n = n;
    g.L = L;
    g.m = m;
    g.h = 2.0 * L / m;
    for (int d = 0; d < n; ++d) g.dims[d] = m;
    return g;
}

double signed_distance(const Shape& s, const double x[3], int n) {
    double y[3];
    for (int d = 0; d < n; ++d) y[d] = x[d] - s.center[d];
    switch (s.kind) {
        case ShapeKind::ball: {
            double r2 = 0;
            for (int d = 0; d < n; ++d) r2 += y[d] * y[d];
            return std::sqrt(r2) - s.r;
        }
        case ShapeKind::box: {
            double mx = 0;
            for (int d = 0; d < n; ++d) mx = std::max(mx, std::abs(y[d]));
            return mx - s.r;
        }
        case ShapeKind::ellipsoid: {
            // exact distance only on the axes; use the level-set value scaled
            // by the gradient as a distance estimate, refined by projection
            double f = 0, g2 = 0;
            for (int d = 0; d < n; ++d) {
                double a = s.axes[d];
                f += y[d] * y[d] / (a * a);
                g2 += 4.0 * y[d] * y[d] / (a * a * a * a);
            }
            double lvl = f - 1.0;
            double gn = std::sqrt(std::max(g2, 1e-300));
            return lvl / gn;  // first-order distance, sign exact
        }
        case ShapeKind::wholebox:
            return -1.0;
    }
    return 0.0;
}

// Exact distance to an ellipse/ellipsoid boundary by Newton on the projection
// parameter.  Needed because delta enters the Pohozaev trace with power s.
static double ellipsoid_distance(const Shape& s, const double x[3], int n) {
    double y[3];
    for (int d = 0; d < n; ++d) y[d] = std::abs(x[d] - s.center[d]);
    // minimize |y - p| over p on the ellipsoid: p_d = a_d^2 y_d/(t + a_d^2)
    // with t the root of sum (a_d y_d / (t + a_d^2))^2 = 1.
    double f0 = 0;
    for (int d = 0; d < n; ++d) f0 += (y[d] / s.axes[d]) * (y[d] / s.axes[d]);
    double amax = 0;
    for (int d = 0; d < n; ++d) amax = std::max(amax, s.axes[d]);
    double t = (f0 > 1.0 ? 0.0 : -1e-12);
    // bracket then bisect+newton on g(t) = sum (a_d y_d/(t+a_d^2))^2 - 1
    auto g = [&](double tt) {
        double v = 0;
        for (int d = 0; d < n; ++d) {
            double q = s.axes[d] * y[d] / (tt + s.axes[d] * s.axes[d]);
            v += q * q;
        }
        return v - 1.0;
    };
    double amin = amax;
    for (int d = 0; d < n; ++d) amin = std::min(amin, s.axes[d]);
    double lo = -amin * amin * (1.0 - 1e-12), hi = amax * (std::sqrt(f0) + 1.0) * amax;
    if (g(lo) < 0) lo = -amin * amin + 1e-300;
    for (int it = 0; it < 200; ++it) {
        t = 0.5 * (lo + hi);
        double gt = g(t);
        if (gt > 0)
            lo = t;
        else
            hi = t;
        if (hi - lo < 1e-15 * (1.0 + std::abs(t))) break;
    }
    double dist2 = 0;
    for (int d = 0; d < n; ++d) {
        double pd = s.axes[d] * s.axes[d] * y[d] / (t + s.axes[d] * s.axes[d]);
        dist2 += (y[d] - pd) * (y[d] - pd);
    }
    return std::sqrt(dist2);
}

MaskPtr build_domain(const Shape& shape, const Grid& grid) {
    if (shape.kind == ShapeKind::wholebox) return wholebox_mask(grid);
    // clearance: boundary must stay >= 2h away from every box face
    double reach = 0;
    switch (shape.kind) {
        case ShapeKind::ball:
        case ShapeKind::box:
            reach = shape.r;
            break;
        case ShapeKind::ellipsoid:
            for (int d = 0; d < grid.n; ++d) reach = std::max(reach, shape.axes[d]);
            break;
        default:
            break;
    }
    for (int d = 0; d < grid.n; ++d) {
        double margin = grid.L - (std::abs(shape.center[d]) + reach);
        if (margin < 2.0 * grid.h)
            throw std::invalid_argument(
                "build_domain: shape clears a box face by less than 2h; enlarge the box");
    }

    auto mask = std::make_shared<DomainMask>();
    mask->grid = grid;
    mask->shape = shape;
    const index_t N = grid.num_nodes();
    mask->inside.assign(N, 0);
    mask->delta.assign(N, 0.0);
    index_t count = 0;
    for (index_t id = 0; id < N; ++id) {
        double x[3];
        grid.node_coords(id, x);
        double sd = signed_distance(shape, x, grid.n);
        if (sd < 0) {
            mask->inside[id] = 1;
            ++count;
            if (shape.kind == ShapeKind::ellipsoid)
                mask->delta[id] = ellipsoid_distance(shape, x, grid.n);
            else
                mask->delta[id] = -sd;
        }
    }
    if (count == 0) throw std::invalid_argument("build_domain: empty interior");
    mask->inside_count = count;
    return mask;
}

MaskPtr wholebox_mask(const Grid& grid) {
    auto mask = std::make_shared<DomainMask>();
    mask->grid = grid;
    mask->shape.kind = ShapeKind::wholebox;
    const index_t N = grid.num_nodes();
    mask->inside.assign(N, 1);
    mask->delta.assign(N, 0.0);
    for (index_t id = 0; id < N; ++id) {
        double x[3];
        grid.node_coords(id, x);
        double d = grid.L;
        for (int k = 0; k < grid.n; ++k) d = std::min(d, grid.L - std::abs(x[k]));
        mask->delta[id] = d;
    }
    mask->inside_count = N;
    return mask;
}

double BoundaryPatches::total_area() const {
    double a = 0;
    for (double v : areas) a += v;
    return a;
}

static void push_patch(BoundaryPatches& bp, const std::array<double, 3>& p,
                       const std::array<double, 3>& nu, double area) {
    bp.points.push_back(p);
    bp.normals.push_back(nu);
    bp.areas.push_back(area);
}

BoundaryPatches boundary_patches(const DomainMask& mask, int resolution) {
    const Shape& s = mask.shape;
    const int n = mask.grid.n;
    BoundaryPatches bp;
    constexpr double pi = std::numbers::pi;

    auto ell_axes = [&](int d) {
        return s.kind == ShapeKind::ellipsoid ? s.axes[d] : s.r;
    };

    switch (s.kind) {
        case ShapeKind::ball:
        case ShapeKind::ellipsoid: {
            if (n == 1) {
                double a = ell_axes(0);
                push_patch(bp, {s.center[0] - a, 0, 0}, {-1, 0, 0}, 1.0);
                push_patch(bp, {s.center[0] + a, 0, 0}, {1, 0, 0}, 1.0);
            } else if (n == 2) {
                int K = std::max(resolution, 8);
                double a = ell_axes(0), b = ell_axes(1);
                for (int k = 0; k < K; ++k) {
                    // midpoint rule in the parameter; area = arclength element
                    double t0 = 2 * pi * k / K, t1 = 2 * pi * (k + 1) / K;
                    double tm = 0.5 * (t0 + t1);
                    double px = a * std::cos(tm), py = b * std::sin(tm);
                    // arclength by 4-point Gauss on [t0,t1]
                    static const double gx[4] = {-0.8611363115940526, -0.3399810435848563,
                                                 0.3399810435848563, 0.8611363115940526};
                    static const double gw[4] = {0.3478548451374538, 0.6521451548625461,
                                                 0.6521451548625461, 0.3478548451374538};
                    double len = 0;
                    for (int q = 0; q < 4; ++q) {
                        double t = 0.5 * (t0 + t1) + 0.5 * (t1 - t0) * gx[q];
                        double dx = -a * std::sin(t), dy = b * std::cos(t);
                        len += gw[q] * std::sqrt(dx * dx + dy * dy);
                    }
                    len *= 0.5 * (t1 - t0);
                    double nx = px / (a * a), ny = py / (b * b);
                    double nn = std::sqrt(nx * nx + ny * ny);
                    push_patch(bp, {s.center[0] + px, s.center[1] + py, 0},
                               {nx / nn, ny / nn, 0}, len);
                }
            } else {
                // n = 3: latitude bands uniform in z = cos(theta), uniform phi.
                // For the sphere this is an equal-area decomposition; for the
                // ellipsoid areas carry the parametric Jacobian (Gauss in band).
                int K = std::max(int(std::sqrt(double(resolution))), 4);
                int Kphi = 2 * K, Kz = std::max(resolution / Kphi, 2);
                double a = ell_axes(0), b = ell_axes(1), c = ell_axes(2);
                for (int iz = 0; iz < Kz; ++iz) {
                    double z0 = -1.0 + 2.0 * iz / Kz, z1 = -1.0 + 2.0 * (iz + 1) / Kz;
                    double zm = 0.5 * (z0 + z1);
                    for (int ip = 0; ip < Kphi; ++ip) {
                        double p0 = 2 * pi * ip / Kphi, p1 = 2 * pi * (ip + 1) / Kphi;
                        double pm = 0.5 * (p0 + p1);
                        double st = std::sqrt(std::max(0.0, 1.0 - zm * zm));
                        double ux = st * std::cos(pm), uy = st * std::sin(pm), uz = zm;
                        double px = a * ux, py = b * uy, pz = c * uz;
                        // surface element of (a u1, b u2, c u3) over the unit
                        // sphere: dS = sqrt(sum (bc u1)^2 ...) dOmega
                        double j = std::sqrt((b * c * ux) * (b * c * ux) +
                                             (a * c * uy) * (a * c * uy) +
                                             (a * b * uz) * (a * b * uz));
                        double dOm = (z1 - z0) * (p1 - p0);
                        double nx = px / (a * a), ny = py / (b * b), nz = pz / (c * c);
                        double nn = std::sqrt(nx * nx + ny * ny + nz * nz);
                        push_patch(bp,
                                   {s.center[0] + px, s.center[1] + py, s.center[2] + pz},
                                   {nx / nn, ny / nn, nz / nn}, j * dOm);
                    }
                }
            }
            break;
        }
        case ShapeKind::box: {
            double a = s.r;
            if (n == 1) {
                push_patch(bp, {s.center[0] - a, 0, 0}, {-1, 0, 0}, 1.0);
                push_patch(bp, {s.center[0] + a, 0, 0}, {1, 0, 0}, 1.0);
            } else if (n == 2) {
                int K = std::max(resolution / 4, 2);
                for (int face = 0; face < 4; ++face) {
                    int axis = face / 2;
                    double sign = (face % 2) ? 1.0 : -1.0;
                    for (int k = 0; k < K; ++k) {
                        double t = -a + (k + 0.5) * (2 * a / K);
                        std::array<double, 3> p{s.center[0], s.center[1], 0};
                        std::array<double, 3> nu{0, 0, 0};
                        p[axis] += sign * a;
                        p[1 - axis] += t;
                        nu[axis] = sign;
                        push_patch(bp, p, nu, 2 * a / K);
                    }
                }
            } else {
                int K = std::max(int(std::sqrt(resolution / 6.0)), 2);
                for (int face = 0; face < 6; ++face) {
                    int axis = face / 2;
                    double sign = (face % 2) ? 1.0 : -1.0;
                    int a1 = (axis + 1) % 3, a2 = (axis + 2) % 3;
                    for (int i = 0; i < K; ++i)
                        for (int j = 0; j < K; ++j) {
                            double t1 = -a + (i + 0.5) * (2 * a / K);
                            double t2 = -a + (j + 0.5) * (2 * a / K);
                            std::array<double, 3> p{s.center[0], s.center[1], s.center[2]};
                            std::array<double, 3> nu{0, 0, 0};
                            p[axis] += sign * a;
                            p[a1] += t1;
                            p[a2] += t2;
                            nu[axis] = sign;
                            push_patch(bp, p, nu, (2 * a / K) * (2 * a / K));
                        }
                }
            }
            break;
        }
        case ShapeKind::wholebox:
            throw std::invalid_argument("boundary_patches: no analytic boundary for wholebox");
    }
    return bp;
}

StarShapedness is_strictly_star_shaped(const BoundaryPatches& patches) {
    StarShapedness r;
    if (patches.points.empty()) return r;
    double mn = 1e300;
    for (std::size_t i = 0; i < patches.points.size(); ++i) {
        double d = 0;
        for (int k = 0; k < 3; ++k) d += patches.normals[i][k] * patches.points[i][k];
        mn = std::min(mn, d);
    }
    r.min_nu_dot_x = mn;
    r.strictly_star_shaped = mn > 0;
    return r;
}

}  // namespace mln
