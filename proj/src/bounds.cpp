#include "relsamp/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace relsamp {

namespace {

constexpr double kPi = std::numbers::pi;

double vol(double R, int d) { return std::pow(R, d); }

// 3 log 3 - 2, the covering exponent at a = 3 R^{-d}.
const double kCoverRate = 3.0 * std::log(3.0) - 2.0;

} // namespace

double kappa(int d) { return std::exp(d * kPi); }

double tropp_tail(double N, double sigma2, double B, double t) {
    if (t <= 0.0) return N;
    const double v = N * std::exp(-(0.5 * t * t) / (sigma2 + B * t / 3.0));
    return std::clamp(v, 0.0, N);
}

double prop1_tail(double N, double r, double R, int d, double nu) {
    return N * std::exp(-nu * nu * r / (vol(R, d) * (1.0 + nu / 3.0)));
}

SampleCountTerms sample_count_terms(double R, int d, double nu, double epsilon) {
    if (!(nu > 0.0 && nu < 0.5)) throw std::invalid_argument("required_samples: nu must lie in (0, 1/2)");
    if (!(epsilon > 0.0 && epsilon < 1.0)) throw std::invalid_argument("required_samples: epsilon must lie in (0, 1)");
    if (!(R >= 2.0)) throw std::invalid_argument("required_samples: R must be >= 2");
    const double V = vol(R, d);
    SampleCountTerms out;
    out.main_term = V * (1.0 + nu / 3.0) / (nu * nu) * std::log(2.0 * V / epsilon);
    out.covering_term = V / kCoverRate * std::log(2.0 * vol(R + 2.0, d) / epsilon);
    out.covering_dominates = out.covering_term > out.main_term;
    out.required = static_cast<long long>(std::ceil(std::max(out.main_term, out.covering_term)));
    return out;
}

long long required_samples(double R, int d, double nu, double epsilon) {
    const auto terms = sample_count_terms(R, d, nu, epsilon);
    return static_cast<long long>(std::ceil(terms.main_term));
}

double constant_A_main(double r, double R, int d, double delta, double nu) {
    return r / vol(R, d) * (0.5 - delta - nu - 12.0 * delta * kappa(d));
}

double constant_A_general(double r, double R, int d, double alpha, double delta, double nu, double N0) {
    if (!(alpha > 0.0 && alpha < 1.0)) throw std::invalid_argument("constant_A_general: alpha must lie in (0,1)");
    if (!(delta < 1.0 - alpha)) throw std::invalid_argument("constant_A_general: need delta < 1 - alpha");
    const double q = delta / (1.0 - alpha);
    return r / vol(R, d) * (alpha - alpha * q - nu) - 2.0 * kappa(d) * N0 * q;
}

double positivity_threshold_r(double R, int d, double alpha, double delta, double nu, double N0) {
    const double q = delta / (1.0 - alpha);
    const double rate = alpha - alpha * q - nu;
    if (rate <= 0.0) return std::numeric_limits<double>::infinity();
    return vol(R, d) * (2.0 * kappa(d) * N0 * q) / rate;
}

double covering_tail(double R, int d, double r, double a) {
    const double inv_vol = 1.0 / vol(R, d);
    if (!(a > inv_vol)) throw std::invalid_argument("covering_tail: need a > R^{-d}");
    const double rate = a * std::log(a * vol(R, d)) - (a - inv_vol);
    return std::max(0.0, vol(R + 2.0, d) * std::exp(-r * rate));
}

double theorem_probability(double R, int d, double r, double nu) {
    const double V = vol(R, d);
    return 1.0 - V * std::exp(-nu * nu * r / (V * (1.0 + nu / 3.0))) -
           vol(R + 2.0, d) * std::exp(-(r / V) * kCoverRate);
}

HypothesisReport hypothesis_check(double delta, double nu, int d) {
    const double k = kappa(d);
    HypothesisReport rep;
    rep.delta_threshold = 1.0 / (2.0 * (1.0 + 12.0 * k));
    rep.nu_threshold = 0.5 - delta * (1.0 + 12.0 * k);
    rep.delta_ok = delta < rep.delta_threshold;
    rep.nu_ok = nu < rep.nu_threshold;
    return rep;
}

double delta_feasible(double R) { return 2.0 * kPi * std::sqrt(2.0 * R) * std::exp(-kPi * R); }

std::vector<BoundRow> bound_table(const BoundParams& p) {
    std::vector<BoundRow> rows;
    const double V = vol(p.R, p.d);
    const auto terms = sample_count_terms(p.R, p.d, p.nu, p.epsilon);
    const long long r_req = required_samples(p.R, p.d, p.nu, p.epsilon);
    const double r = p.r > 0 ? static_cast<double>(p.r) : static_cast<double>(r_req);

    rows.push_back({"kappa", kappa(p.d), ""});
    rows.push_back({"required_samples", static_cast<double>(r_req), ""});
    rows.push_back({"sample_count_covering_term", terms.covering_term,
                    terms.covering_dominates ? "dominates" : "dominated"});
    rows.push_back({"r", r, p.r > 0 ? "given" : "auto"});
    rows.push_back({"prop1_tail", prop1_tail(V, r, p.R, p.d, p.nu), ""});
    const double ct = covering_tail(p.R, p.d, r, 3.0 / V);
    rows.push_back({"covering_tail", ct, ct < 1.0 ? "" : "vacuous"});
    const double prob = theorem_probability(p.R, p.d, r, p.nu);
    rows.push_back({"theorem_probability", prob, prob >= 1.0 - p.epsilon ? "ge_1_minus_eps" : "lt_1_minus_eps"});
    const double A = constant_A_main(r, p.R, p.d, p.delta, p.nu);
    rows.push_back({"constant_A_main", A, A > 0.0 ? "positive" : "nonpositive"});
    const auto hyp = hypothesis_check(p.delta, p.nu, p.d);
    rows.push_back({"delta_threshold", hyp.delta_threshold, hyp.delta_ok ? "ok" : "violated"});
    rows.push_back({"nu_threshold", hyp.nu_threshold, hyp.nu_ok ? "ok" : "violated"});
    const double floor = delta_feasible(p.R);
    rows.push_back({"delta_feasible", floor, p.delta >= floor ? "ok" : "infeasible"});
    return rows;
}

} // namespace relsamp
