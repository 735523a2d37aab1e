#ifndef RELSAMP_EXPERIMENT_HPP
#define RELSAMP_EXPERIMENT_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "relsamp/prolate.hpp"

namespace relsamp {

/// Campaign parameters. In the config file N, M, r and quad_order may be
/// written as `auto` (stored here as 0): N = ceil(R^d), M = min(2N, basis
/// size), r = required_samples(R, d, nu, epsilon), quad_order = ceil(4R)+30.
struct ExperimentConfig {
    double R = 2.0;
    int d = 1;
    std::size_t N = 0;
    std::size_t M = 0;
    long long r = 0;
    double nu = 0.25;
    double delta_target = 0.05;
    double epsilon = 0.1;
    std::size_t trials = 100;
    std::uint64_t base_seed = 1;
    int quad_order = 0;

    bool operator==(const ExperimentConfig&) const = default;
};

// Flat "key = value" text, '#' comments. Every field is required and unknown
// keys are rejected. Throws ParseError naming the source and line.
ExperimentConfig parse_config(std::istream& is, const std::string& source = "config");
ExperimentConfig load_config(const std::string& path);
void write_config(std::ostream& os, const ExperimentConfig& cfg);

/// Config with every `auto` resolved plus the basis it implies.
struct CampaignContext {
    ExperimentConfig cfg;
    std::shared_ptr<const TensorBasis> tb;
    double min_delta = 0.0;  // smallest delta_f in the span
    bool class_empty = false; // delta_target < min_delta
    double small_delta = 0.0; // target of the small-delta regime
};

// Throws std::invalid_argument if the config violates a module precondition.
CampaignContext make_context(const ExperimentConfig& cfg);

/// One seeded trial. Function-dependent fields are NaN (and their flags
/// true) when the concentration class is empty in the span.
struct TrialResult {
    std::size_t trial = 0;
    std::uint64_t seed = 0;
    double deviation_lambda_min = 0.0;
    bool v1_event = false; // deviation <= -nu / R^d
    std::size_t N0 = 0;
    double frame_bound = 0.0; // r * lambda_min(G)
    double sampling_sum = 0.0; // sum_j f(x_j)^2, near-threshold f
    double norm_sq = 0.0;
    double A = 0.0;
    bool A_lhs_ok = true;
    bool upper_ok = true;
    double residual = 0.0;
    double residual_bound = 0.0;
    bool residual_ok = true;
    double delta_f = 0.0;
    double sampling_sum_small = 0.0; // same, small-delta f
    bool A_lhs_ok_small = true;

    bool operator==(const TrialResult&) const = default;
};

TrialResult run_trial(const CampaignContext& ctx, std::size_t index);

// All trials in parallel, returned in trial-index order.
std::vector<TrialResult> run_trials(const CampaignContext& ctx);

struct CampaignSummary {
    std::string kind;
    ExperimentConfig cfg; // resolved; base_seed is the one actually used
    std::vector<TrialResult> results;
    std::size_t events = 0;
    double frequency = 0.0;
    double theory = 0.0; // tail bound (or epsilon for the sampling campaign)
    double margin = 0.0; // 3 binomial standard errors at `theory`
    bool statistical_ok = true;
    std::size_t hard_violations = 0;
    bool rerun = false;
    bool class_empty = false;
    std::vector<std::pair<std::string, std::string>> extra;
};

// 3 sqrt(p (1-p) / trials), zero outside (0,1).
double binomial_margin(double p, std::size_t trials);

// Event: deviation_lambda_min <= -nu/R^d; theory: prop1_tail(N, r, R, d, nu).
CampaignSummary run_v1_campaign(const ExperimentConfig& cfg, bool allow_rerun = true);

// Event: A ||f||^2 > sum_j f(x_j)^2 for either test function, with
// A = constant_A_main(r, R, d, delta_target, nu); compared to epsilon.
// Hard violations: the upper bound r ||f||^2 or the least-squares residual bound fails.
CampaignSummary run_sampling_inequality_campaign(const ExperimentConfig& cfg, bool allow_rerun = true);

// Event: N0 > a r; theory: covering_tail(R, d, r, a).
CampaignSummary run_covering_campaign(const ExperimentConfig& cfg, double a, bool allow_rerun = true);

// One row per trial plus config echo columns, then a "#summary,..." row.
void emit_csv(std::ostream& os, const CampaignSummary& summary);
void emit_csv(const std::string& path, const CampaignSummary& summary);

// Reads the per-trial rows back (the summary row is skipped).
std::vector<TrialResult> read_results_csv(std::istream& is, const std::string& source = "results csv");

} // namespace relsamp

#endif
