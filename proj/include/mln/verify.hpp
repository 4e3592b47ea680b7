#pragma once

#include <string>
#include <vector>

#include "mln/grid.hpp"
#include "mln/variational.hpp"

namespace mln {

// Term-by-term transcription of the Pohozaev identity for the mixed problem.
// residual = (A + B) - (C1 + C2 + D1 + D2); relative against the largest
// term magnitude.
struct PohozaevTerms {
    double A = 0;   // (mu-2n)/(2*2mu*) * double integral
    double B = 0;   // -(lambda n/(p+1)) int |u|^{p+1}
    double C1 = 0;  // (2-n)/2 int |grad u|^2
    double C2 = 0;  // (2s-n)/2 int u (-Delta)^s u   (= gagliardo_sq by the form identity)
    double D1 = 0;  // -1/2 oint (du/dnu)^2 nu.x dsigma
    double D2 = 0;  // -Gamma(1+s)^2/2 oint (u/delta^s)^2 nu.x dsigma
    double residual = 0;
    double rel_residual = 0;
    double max_term = 0;
};

struct PohozaevOptions {
    bool include_choquard = true;    // A term
    bool include_fractional = true;  // C2 and D2 terms
};

PohozaevTerms pohozaev_terms(const Problem& pb, const Field& u, double lambda,
                             const BoundaryPatches& patches,
                             const PohozaevOptions& opts = {});

// Theorem-1.4 regime test: -lambda (n (1/(p+1) - 1/2) + 1) >= 0, plus the
// corollary form (p >= (n+2)/(n-2) and lambda >= 0) or (p < crit and
// lambda <= 0).
struct NonexistenceCheck {
    bool criterion = false;  // exact inequality
    bool corollary = false;
    double coefficient = 0;  // n (1/(p+1) - 1/2) + 1
};
NonexistenceCheck nonexistence_criterion(int n, double p, double lambda);

// log-log least-squares slope with R^2; validity tracks the sample-count and
// decade-span requirements.
struct SlopeFit {
    std::vector<double> x;    // abscissae (eps or t)
    std::vector<double> y;    // positive values
    double slope = 0;
    double intercept = 0;     // log-log intercept
    double r_squared = 0;
    double target = 0;
    double rel_deviation = 0; // |slope - target| / |target|
    bool spans_decade = false;
    bool valid = false;       // >= 4 samples and >= one decade
};

SlopeFit fit_loglog(const std::vector<double>& x, const std::vector<double>& y,
                    double target);

// Rescaling mechanism behind the equality of sharp constants: per k, the
// quotient split of u_k(x) = k^{(n-2)/2} u(kx) for a polynomial bump u with
// supp u in B_r.
struct ScalingRow {
    double k = 0;
    double local_quotient = 0;  // ||grad u_k||^2 / ||u_k||_HL^2
    double frac_quotient = 0;   // [u_k]_s^2 / ||u_k||_HL^2
    double total = 0;
};
struct ScalingExperiment {
    std::vector<ScalingRow> rows;
    double max_local_dev = 0;        // max_k |local(k)/local(1) - 1|
    double max_frac_scaling_dev = 0; // max_k |frac(k)/(frac(1) k^{2s-2}) - 1|
    double s = 0;
};

ScalingExperiment scaling_experiment(int n, double s, double mu, int m, double L,
                                     double bump_radius, const std::vector<double>& ks);

// G(V_t)^2 against a + b t^{2-2s}; open-box truncation on the L, 2L, 4L
// protocol with h-extrapolation.
struct BubbleLimitRow {
    double t = 0;
    double g_sq = 0;       // extrapolated G(V_t)^2
    double dirichlet = 0;
    double gagliardo = 0;
};
struct BubbleLimitExperiment {
    std::vector<BubbleLimitRow> rows;
    double u_norm_sq = 0;       // extrapolated ||U||^2 = ||grad V||^2
    double fitted_intercept = 0;  // a in a + b tau, tau = t^{2-2s}
    double fitted_coefficient = 0;
    SlopeFit exponent_fit;        // of G^2 - ||U||^2 vs t, target 2-2s
    double limit_gap = 0;         // |G^2(t_min) - ||U||^2| / ||U||^2
    double s = 0;
};

BubbleLimitExperiment bubble_limit_experiment(int n, double s, double mu, int m,
                                              double L0, const std::vector<double>& ts);

// Concentration orders of the cutoff bubble family; three fits as specified:
// (i) consecutive differences of ||v_eps||^2 vs eps (target n-2),
// (ii) [v_eps]_s^2 vs eps (target 2 nu_{s,n}),
// (iii) int |v_eps|^{p+1} vs eps (target n - (n-2)(p+1)/2).
struct Lemma45Experiment {
    std::vector<double> eps;
    std::vector<double> norm_sq;     // ||v_eps||^2 (h-extrapolated)
    std::vector<double> gag_sq;      // [v_eps]_s^2
    std::vector<double> lp;          // int |v_eps|^{p+1}
    SlopeFit fit_norm;   // (i)
    SlopeFit fit_gag;    // (ii)
    SlopeFit fit_lp;     // (iii)
    double nu_sn = 0;
    double extrapolated_norm_limit = 0;  // a from ||v_eps||^2 = a + b eps^{n-2}
    double predicted_norm_limit = 0;     // C(n,mu)^{(n-2)/(2n-mu) * n/2} S_hat^{n/2}
    double limit_consistency = 0;        // relative gap of the two
};

double nu_sn(int n, double s);

Lemma45Experiment lemma45_asymptotics(const Problem& pb, double s, int m,
                                      const std::vector<double>& eps_list,
                                      double s_hat, double c_hat);

// Brute-force comparison suite on seeded random fields over 8^n grids.
struct OracleReport {
    struct Entry {
        std::string name;
        double max_deviation = 0;
        double tolerance = 0;
        bool pass = false;
    };
    std::vector<Entry> entries;
    bool all_pass = true;
    unsigned seed = 0;
};

OracleReport oracle_suite(unsigned seed);

}  // namespace mln
