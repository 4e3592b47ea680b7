#include "mln/quad.hpp"

#include <numbers>
#include <stdexcept>

namespace mln::quad {

namespace {
const double kGx[8] = {0.0950125098376374, 0.2816035507792589, 0.4580167776572274,
                       0.6178762444026438, 0.7554044083550030, 0.8656312023878318,
                       0.9445750230732326, 0.9894009349916499};
const double kGw[8] = {0.1894506104550685, 0.1826034150449236, 0.1691565193950025,
                       0.1495959888165767, 0.1246289712555339, 0.0951585116824928,
                       0.0622535239386479, 0.0271524594117541};
}  // namespace

double gl16(const std::function<double(double)>& f, double a, double b) {
    double c = 0.5 * (a + b), r = 0.5 * (b - a);
    double s = 0;
    for (int i = 0; i < 8; ++i)
        s += kGw[i] * (f(c - r * kGx[i]) + f(c + r * kGx[i]));
    return s * r;
}

double gl_panels(const std::function<double(double)>& f, double a, double b, int panels) {
    double s = 0, w = (b - a) / panels;
    for (int k = 0; k < panels; ++k) s += gl16(f, a + k * w, a + (k + 1) * w);
    return s;
}

double unit_sphere_area(int n) {
    switch (n) {
        case 1: return 2.0;
        case 2: return 2.0 * std::numbers::pi;
        case 3: return 4.0 * std::numbers::pi;
    }
    throw std::invalid_argument("unit_sphere_area: n must be 1..3");
}

// int over [-1/2,1/2]^n minus the inscribed ball B_{1/2} of |z|^{-mu},
// reduced to a smooth wedge/face integral (radial integration done exactly).
double unit_cell_power_remainder(int n, double mu) {
    const double R = 0.5;
    if (n == 1) return 0.0;
    if (n == 2) {
        // 8 x wedge theta in [0, pi/4], r from R to R/cos(theta)
        auto f = [&](double th) {
            double rmax = R / std::cos(th);
            if (std::abs(mu - 2.0) < 1e-14) return std::log(rmax / R);
            return (std::pow(rmax, 2.0 - mu) - std::pow(R, 2.0 - mu)) / (2.0 - mu);
        };
        return 8.0 * gl_panels(f, 0.0, std::numbers::pi / 4.0, 8);
    }
    // n == 3: sum over faces of int_face [|x|^{3-mu} - R^{3-mu}]/(3-mu)
    //         * (R/|x|^3) dA, with x = (a,b,R) on a face
    auto face = [&](double a, double b) {
        double r = std::sqrt(a * a + b * b + R * R);
        double radial;
        if (std::abs(mu - 3.0) < 1e-14)
            radial = std::log(r / R);
        else
            radial = (std::pow(r, 3.0 - mu) - std::pow(R, 3.0 - mu)) / (3.0 - mu);
        return radial * (R / (r * r * r));
    };
    auto outer = [&](double a) {
        return gl_panels([&](double b) { return face(a, b); }, -R, R, 6);
    };
    return 6.0 * gl_panels(outer, -R, R, 6);
}

// int over [-1/2,1/2]^n of |z|^{-mu}: inscribed-ball part analytic plus the
// cube-minus-ball remainder.
double unit_cell_power_integral(int n, double mu) {
    if (!(mu < n)) throw std::invalid_argument("unit_cell_power_integral: need mu < n");
    const double R = 0.5;
    double ball = unit_sphere_area(n) * std::pow(R, n - mu) / (n - mu);
    return ball + unit_cell_power_remainder(n, mu);
}

double gagliardo_cell_moment(int n, double s) {
    // exponent 2-n-2s corresponds to mu = n+2s-2 < n since s < 1
    return unit_cell_power_integral(n, n + 2.0 * s - 2.0) / n;
}

}  // namespace mln::quad
