#pragma once

#include <string>
#include <vector>

#include "mln/choquard.hpp"
#include "mln/forms.hpp"

namespace mln {

// Problem data shared by the energy machinery: tables plus (n, s, mu, p).
// The p-power term is evaluated through |u|^{p-1} u (C^1 on sign changes);
// on the nonnegative iterates the solvers work with this agrees with u^p.
struct Problem {
    MaskPtr mask;
    TablePtr gag;    // gagliardo(s) table, carries C(n,s)
    TablePtr riesz;  // |z|^{-mu} table
    double mu = 0;
    double p = 1;
    Exponents exps;

    static Problem make(const MaskPtr& mask, double s, double mu, double p);
};

struct EnergyBreakdown {
    double g_sq = 0;      // G(u)^2
    double hl = 0;        // ||u||_HL^{2*2mu*} (the raw double integral)
    double lp = 0;        // int |u|^{p+1}
    double J = 0;         // g_sq/2 - hl/(2*2mu*) - lambda lp/(p+1)
    double grad_norm = 0; // filled by callers that computed the gradient
};

EnergyBreakdown energy(const Problem& pb, const Field& u, double lambda);

// nodal gradient g with <g, phi> h^n = J'(u)[phi]
Field grad_energy(const Problem& pb, const Field& u, double lambda);

// unique maximizer of t -> J(t u) along a ray (p > 1 superlinear geometry);
// safeguarded Newton.  Returns t* and J(t* u).
struct FiberResult {
    double t_star = 0;
    double J_at_t = 0;
    double stationarity = 0;  // |d/dt J(t u)| at t*
};
FiberResult fibering_max(const Problem& pb, const Field& u, double lambda);

// Constrained minimization of P_lambda(u) = G(u)^2 - lambda |u|_2^2 over
// { ||u||_HL = 1 } by projected gradient descent with backtracking,
// absolute-value projection and HL renormalization each iterate.
struct QuotientResult {
    double lambda = 0;
    double S = 0;               // P_lambda at the best iterate
    Field minimizer;            // ||.||_HL = 1
    bool converged = false;     // KKT residual below tolerance
    int iterations = 0;
    double kkt_residual = 0;
    double multiplier = 0;      // nu estimate; equals S at a true minimizer
    double l2_sq = 0;           // |minimizer|_2^2
    std::vector<double> history;
};

struct QuotientOptions {
    int max_iterations = 4000;
    double kkt_tol = 1e-6;
    double stagnation_tol = 1e-9;  // relative P decrease over a 20-sweep window
    const Field* warm_start = nullptr;
};

QuotientResult quotient_minimize(const Problem& pb, double lambda,
                                 const QuotientOptions& opts = {});

// S_{H,L}(lambda) scan over an increasing lambda grid with warm starts;
// detects the departure point lambda_hat from the small-lambda plateau.
struct ScanRow {
    double lambda = 0;
    double S = 0;
    bool converged = false;
    int iterations = 0;
    double l2_sq = 0;
};
struct ScanResult {
    std::vector<ScanRow> rows;
    double plateau_value = 0;     // S at lambda -> 0+
    double plateau_scatter = 0;   // max |S - plateau| over lambda <= lambda_1s
    double plateau_tol = 0;       // detection threshold used
    double lambda_hat_star = 0;   // first grid lambda below plateau - tol
    double lambda_1s = 0;
    double lambda_1 = 0;
    bool monotone = true;         // S non-increasing across the scan
};

// eigen_start: the normalized lambda_1 eigenfield; each lambda is solved both
// from the warm-start chain (tracks the concentrated branch) and from the
// eigenfield (finds the delocalized branch past lambda_1), keeping the lower.
ScanResult lambda_star_scan(const Problem& pb, const std::vector<double>& lambdas,
                            double lambda_1s, double lambda_1,
                            const Field& eigen_start,
                            const QuotientOptions& opts = {});

// Nehari-reduced mountain-pass solve for p > 1: minimize J(t*(u) u) over
// directions by projected gradient with a fibering rescale each step.
struct MountainPassResult {
    Field solution;          // the rescaled critical point candidate
    double level = 0;        // J at the solution
    double threshold = 0;    // (n+2-mu)/(4n-2mu) * S_hat^{(2n-mu)/(n+2-mu)}
    bool below_threshold = false;
    bool converged = false;
    bool trivial_collapse = false;
    int iterations = 0;
    double grad_norm = 0;
    double weak_form_residual = 0;  // filled by verify helpers
    double min_inside = 0;          // positivity check
    double effective_volume = 0;    // |u|_2^2 / ||u||_inf^2, collapse metric
};

struct MountainPassOptions {
    int max_iterations = 2000;
    double grad_tol = 1e-6;          // ||grad J||_2 <= tol ||u||_2
    double s_hat = 0;                // HLS constant estimate for the threshold
    double collapse_cells = 2.5;     // collapse when vol_eff <= (c h)^n
    const Field* start = nullptr;    // default: v_eps with eps = 4h
};

MountainPassResult mountain_pass_solve(const Problem& pb, double lambda,
                                       const MountainPassOptions& opts = {});

// threshold value (n+2-mu)/(4n-2mu) * S^{(2n-mu)/(n+2-mu)}
double mountain_pass_threshold(int n, double mu, double s_hat);

}  // namespace mln
