#pragma once

#include <cmath>
#include <functional>

namespace mln::quad {

// 16-point Gauss-Legendre on [a,b].
double gl16(const std::function<double(double)>& f, double a, double b);

// Panelled GL with uniform panels.
double gl_panels(const std::function<double(double)>& f, double a, double b, int panels);

// avg over [-1/2,1/2]^n of |z|^{-mu}, mu < n.  Singular cell average used for
// the Riesz diagonal and the Gagliardo near-diagonal moment.
double unit_cell_power_integral(int n, double mu);

// int over [-1/2,1/2]^n minus the inscribed ball of |z|^{-mu}; regular for
// any mu, zero for n = 1.
double unit_cell_power_remainder(int n, double mu);

// second-moment constant kappa(n,s) = (1/n) * int_{[-1/2,1/2]^n} |z|^{2-n-2s} dz
double gagliardo_cell_moment(int n, double s);

// surface area of the unit sphere S^{n-1}
double unit_sphere_area(int n);

}  // namespace mln::quad
