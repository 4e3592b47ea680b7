#pragma once

#include <optional>

#include "mln/field.hpp"
#include "mln/kernels.hpp"

namespace mln {

// Critical exponents 2* = 2n/(n-2) and the upper-critical Hartree exponent
// 2mu* = (2n - mu)/(n - 2); n >= 3 required.
struct Exponents {
    double two_star = 0;
    double two_mu_star = 0;
};
Exponents compute_exponents(int n, double mu);

// D(x) = sum_y K(x-y) w(y) h^n via padded FFT, restricted to inside nodes.
Field riesz_potential(const Field& w, const KernelTable& riesz);

// ||u||_HL = ( sum_x |u|^{2mu*} D[|u|^{2mu*}] h^n )^{1/(2*2mu*)}
double hl_pair(const Field& u, const KernelTable& riesz, double two_mu_star);
double hl_norm(const Field& u, const KernelTable& riesz, double two_mu_star);

// Aubin-Talenti-type bubble V(x) = [n(n-2)]^{(n-2)/4} (1+|x|^2)^{-(n-2)/2};
// U uses the same normalization so U == V.  variants:
//   V      : V_{t,x0}(x) = t^{(2-n)/2} V((x-x0)/t)
//   V_eps  : eps^{(2-n)/2} V(x/eps)                (pure rescale, t := eps)
//   v_eps  : eta(x) V_eps(x), eta a radial C^2 cutoff, 1 on |x-c| <= delta_c,
//            0 outside the domain ball
enum class BubbleVariant { V, V_eps, v_eps };

struct Bubble {
    BubbleVariant variant = BubbleVariant::V;
    double t = 1.0;  // scale (or eps)
    std::array<double, 3> x0{0, 0, 0};
    double cutoff_radius = 0;  // delta_c, v_eps only
    double domain_radius = 0;  // outer radius of the cutoff blend, v_eps only
};

double bubble_value(const Bubble& b, int n, const double x[3]);

// Evaluate at nodes; masked = true clips to the domain mask (and is required
// for v_eps); masked = false needs a wholebox mask.
Field bubble_field(const Bubble& b, const MaskPtr& mask);

// Sharp-constant estimator for the whole-space quotient
//   ||grad V||^2 / ||V||_HL^2
// by open-box truncation on boxes L, 2L, 4L at fixed m (plus m/2 for the h
// extrapolation), Richardson-extrapolated in 1/L and h^2.
struct HlsEstimate {
    double value = 0;       // extrapolated quotient
    double err_estimate = 0;
    bool monotone = true;   // extrapolation diagnostics
    std::vector<double> box_L;
    std::vector<double> quotient_fine;    // at m
    std::vector<double> quotient_coarse;  // at m/2
    double scale_invariance_dev = 0;      // |q(V_{t=2}) - q(V)|/q, extrapolated
    double translation_invariance_dev = 0;
};

HlsEstimate hls_constant_estimate(int n, double mu, int m, double L0 = 4.0,
                                  bool invariance_checks = false);

// C(n,mu) estimator: the diagonal HLS constant realized by the bubble,
//   C = pair(V) / |V|_{2*}^{2*2mu*}, same truncation protocol.
double hls_riesz_constant_estimate(int n, double mu, int m, double L0 = 4.0);

}  // namespace mln
