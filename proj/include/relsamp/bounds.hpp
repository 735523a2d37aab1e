#ifndef RELSAMP_BOUNDS_HPP
#define RELSAMP_BOUNDS_HPP

#include <string>
#include <vector>

namespace relsamp {

// All logarithms are natural. Tails are reported without clipping above
// their trivial caps so the slack stays visible.

/// Parameters shared by the closed-form bounds. Not every operation reads
/// every field.
struct BoundParams {
    double R = 2.0;
    int d = 1;
    long long r = 0;
    double nu = 0.25;
    double delta = 1e-3;
    double epsilon = 0.1;
    double alpha = 0.5;
    double N = 2.0;
    double N0 = 1.0;
    double a = 1.5;
    double t = 0.0;
    double sigma2 = 0.0;
    double B = 1.0;
};

// Plancherel-Polya constant e^{d pi}.
double kappa(int d);

// Matrix Bernstein tail N exp(-(t^2/2) / (sigma2 + B t / 3)), clipped to [0, N].
double tropp_tail(double N, double sigma2, double B, double t);

// N exp(-nu^2 r / (R^d (1 + nu/3))).
double prop1_tail(double N, double r, double R, int d, double nu);

struct SampleCountTerms {
    double main_term = 0.0;     // R^d (1+nu/3)/nu^2 log(2 R^d / eps)
    double covering_term = 0.0; // R^d / (3 log 3 - 2) log(2 (R+2)^d / eps)
    bool covering_dominates = false;
    long long required = 0; // ceil(max of the two)
};

// Throws std::invalid_argument unless 0 < nu < 1/2, 0 < eps < 1, R >= 2.
SampleCountTerms sample_count_terms(double R, int d, double nu, double epsilon);

// ceil(R^d (1+nu/3)/nu^2 log(2 R^d / eps)); same preconditions.
long long required_samples(double R, int d, double nu, double epsilon);

// (r/R^d)(1/2 - delta - nu - 12 delta kappa); may be negative.
double constant_A_main(double r, double R, int d, double delta, double nu);

// (r/R^d)(alpha - alpha delta/(1-alpha) - nu) - 2 kappa N0 delta/(1-alpha).
// Throws std::invalid_argument unless 0 < alpha < 1 and delta < 1 - alpha.
double constant_A_general(double r, double R, int d, double alpha, double delta, double nu, double N0);

// Smallest r making constant_A_general positive; +inf when no r does.
double positivity_threshold_r(double R, int d, double alpha, double delta, double nu, double N0);

// (R+2)^d exp(-r (a log(a R^d) - (a - R^{-d}))). Throws unless a > R^{-d}.
double covering_tail(double R, int d, double r, double a);

// 1 - R^d exp(-nu^2 r/(R^d(1+nu/3))) - (R+2)^d exp(-(r/R^d)(3 log 3 - 2)).
double theorem_probability(double R, int d, double r, double nu);

struct HypothesisReport {
    double delta_threshold = 0.0; // 1 / (2 (1 + 12 kappa))
    double nu_threshold = 0.0;    // 1/2 - delta (1 + 12 kappa)
    bool delta_ok = false;
    bool nu_ok = false;
    bool ok() const { return delta_ok && nu_ok; }
};

HypothesisReport hypothesis_check(double delta, double nu, int d);

// 2 pi sqrt(2R) e^{-pi R}: below this the concentration class is empty
// (to leading order).
double delta_feasible(double R);

struct BoundRow {
    std::string name;
    double value = 0.0;
    std::string status;
};

// Everything relevant to one (R, d, r, nu, delta, epsilon) setting, with
// p.r <= 0 meaning "use required_samples".
std::vector<BoundRow> bound_table(const BoundParams& p);

} // namespace relsamp

#endif
