#include "relsamp/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <exception>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "relsamp/blfunc.hpp"
#include "relsamp/bounds.hpp"
#include "relsamp/csv.hpp"
#include "relsamp/reconstruct.hpp"
#include "relsamp/rng.hpp"
#include "relsamp/sampling.hpp"

namespace relsamp {

namespace {

constexpr const char* kConfigKeys[] = {"R",       "d",       "N",      "M",         "r",         "nu",
                                       "delta_target", "epsilon", "trials", "base_seed", "quad_order"};

const double kNaN = std::numeric_limits<double>::quiet_NaN();

std::string auto_or(std::size_t v) { return v == 0 ? "auto" : std::to_string(v); }

} // namespace

ExperimentConfig parse_config(std::istream& is, const std::string& source) {
    std::map<std::string, std::pair<std::string, int>> kv;
    std::string line;
    int line_no = 0;
    while (std::getline(is, line)) {
        ++line_no;
        auto body = trim(line);
        if (body.empty() || body.front() == '#') continue;
        const auto eq = body.find('=');
        if (eq == std::string_view::npos) throw ParseError(source, line_no, "expected 'key = value'");
        const std::string key(trim(body.substr(0, eq)));
        const std::string value(trim(body.substr(eq + 1)));
        if (std::find(std::begin(kConfigKeys), std::end(kConfigKeys), key) == std::end(kConfigKeys))
            throw ParseError(source, line_no, "unknown key '" + key + "'");
        if (kv.count(key)) throw ParseError(source, line_no, "duplicate key '" + key + "'");
        if (value.empty()) throw ParseError(source, line_no, "empty value for '" + key + "'");
        kv[key] = {value, line_no};
    }
    for (const char* key : kConfigKeys)
        if (!kv.count(key)) throw ParseError(source, 0, std::string("missing required key '") + key + "'");

    auto num = [&](const char* key) { return parse_double(kv[key].first, source, kv[key].second); };
    auto count = [&](const char* key, bool allow_auto) -> long long {
        const auto& [v, ln] = kv[key];
        if (allow_auto && v == "auto") return 0;
        const auto n = parse_int(v, source, ln);
        if (n < 1) throw ParseError(source, ln, std::string("'") + key + "' must be positive");
        return n;
    };

    ExperimentConfig cfg;
    cfg.R = num("R");
    cfg.d = static_cast<int>(count("d", false));
    cfg.N = static_cast<std::size_t>(count("N", true));
    cfg.M = static_cast<std::size_t>(count("M", true));
    cfg.r = count("r", true);
    cfg.nu = num("nu");
    cfg.delta_target = num("delta_target");
    cfg.epsilon = num("epsilon");
    cfg.trials = static_cast<std::size_t>(count("trials", false));
    cfg.base_seed = parse_u64(kv["base_seed"].first, source, kv["base_seed"].second);
    cfg.quad_order = static_cast<int>(count("quad_order", true));
    if (!(cfg.R >= 1.0)) throw ParseError(source, kv["R"].second, "'R' must be >= 1");
    return cfg;
}

ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    return parse_config(in, path);
}

void write_config(std::ostream& os, const ExperimentConfig& cfg) {
    os << "R = " << fmt_double(cfg.R) << '\n'
       << "d = " << cfg.d << '\n'
       << "N = " << auto_or(cfg.N) << '\n'
       << "M = " << auto_or(cfg.M) << '\n'
       << "r = " << auto_or(static_cast<std::size_t>(cfg.r)) << '\n'
       << "nu = " << fmt_double(cfg.nu) << '\n'
       << "delta_target = " << fmt_double(cfg.delta_target) << '\n'
       << "epsilon = " << fmt_double(cfg.epsilon) << '\n'
       << "trials = " << cfg.trials << '\n'
       << "base_seed = " << cfg.base_seed << '\n'
       << "quad_order = " << auto_or(static_cast<std::size_t>(cfg.quad_order)) << '\n';
}

CampaignContext make_context(const ExperimentConfig& in) {
    CampaignContext ctx;
    ctx.cfg = in;
    auto& cfg = ctx.cfg;
    if (cfg.trials < 1) throw std::invalid_argument("config: trials must be >= 1");
    if (!(cfg.nu >= 0.0)) throw std::invalid_argument("config: nu must be >= 0");
    if (!(cfg.delta_target > 0.0 && cfg.delta_target < 1.0))
        throw std::invalid_argument("config: delta_target must lie in (0,1)");
    if (cfg.quad_order == 0) cfg.quad_order = min_quadrature_order(cfg.R);
    if (cfg.N == 0) cfg.N = static_cast<std::size_t>(std::ceil(std::pow(cfg.R, cfg.d) - 1e-9));
    if (cfg.r == 0) cfg.r = required_samples(cfg.R, cfg.d, cfg.nu, cfg.epsilon);

    auto base = std::make_shared<const ProlateBasis1D>(build_basis_1d(cfg.R, cfg.quad_order));
    ctx.tb = tensor_basis(std::move(base), cfg.d, cfg.N);
    if (cfg.M == 0) cfg.M = default_M(*ctx.tb);
    if (cfg.M < cfg.N || cfg.M > ctx.tb->size())
        throw std::invalid_argument("config: M must satisfy N <= M <= " + std::to_string(ctx.tb->size()));

    ctx.min_delta = min_achievable_delta(*ctx.tb);
    ctx.class_empty = cfg.delta_target < ctx.min_delta;
    ctx.small_delta = ctx.min_delta + 0.1 * (cfg.delta_target - ctx.min_delta);
    return ctx;
}

TrialResult run_trial(const CampaignContext& ctx, std::size_t index) {
    const auto& cfg = ctx.cfg;
    const auto& tb = ctx.tb;
    const double volume = tb->volume();

    TrialResult res;
    res.trial = index;
    res.seed = derive_seed(cfg.base_seed, index);
    const auto samples = draw_uniform(cfg.R, cfg.d, static_cast<std::size_t>(cfg.r), res.seed);

    const auto fm = frame_matrix(tb, samples);
    res.deviation_lambda_min = deviation_lambda_min(fm);
    res.v1_event = res.deviation_lambda_min <= -cfg.nu / volume;
    res.frame_bound = static_cast<double>(cfg.r) * frame_lambda_min(fm);
    res.N0 = covering_index(samples);
    res.A = constant_A_main(static_cast<double>(cfg.r), cfg.R, cfg.d, cfg.delta_target, cfg.nu);

    if (ctx.class_empty) {
        res.sampling_sum = res.norm_sq = res.residual = res.residual_bound = kNaN;
        res.delta_f = res.sampling_sum_small = kNaN;
        return res;
    }

    auto sampled_energy = [&](const BandlimitedFunction& f) {
        double s = 0.0;
        for (std::size_t j = 0; j < samples.size(); ++j) {
            const double v = evaluate(f, samples.point(j));
            s += v * v;
        }
        return s;
    };
    const double r = static_cast<double>(cfg.r);

    const auto f = synth_random(tb, cfg.M, cfg.delta_target, derive_seed(res.seed, 1));
    res.norm_sq = f.norm2_sq();
    res.delta_f = f.delta();
    res.sampling_sum = sampled_energy(f);
    res.A_lhs_ok = res.A * res.norm_sq <= res.sampling_sum;
    res.upper_ok = res.sampling_sum <= r * res.norm_sq * (1.0 + 1e-12);
    const auto rec = approxrec_check(f, samples);
    res.residual = rec.residual;
    res.residual_bound = rec.bound;
    res.residual_ok = rec.ok;

    const auto g = synth_random(tb, cfg.M, ctx.small_delta, derive_seed(res.seed, 2));
    res.sampling_sum_small = sampled_energy(g);
    res.A_lhs_ok_small = res.A * g.norm2_sq() <= res.sampling_sum_small;
    res.upper_ok = res.upper_ok && res.sampling_sum_small <= r * g.norm2_sq() * (1.0 + 1e-12);
    return res;
}

std::vector<TrialResult> run_trials(const CampaignContext& ctx) {
    const std::size_t n = ctx.cfg.trials;
    std::vector<TrialResult> out(n);
    std::atomic<std::size_t> next{0};
    std::exception_ptr failure;
    std::mutex failure_mutex;
    auto worker = [&] {
        for (std::size_t i = next++; i < n; i = next++) {
            try {
                out[i] = run_trial(ctx, i);
            } catch (...) {
                std::lock_guard lock(failure_mutex);
                if (!failure) failure = std::current_exception();
            }
        }
    };
    const std::size_t workers = std::clamp<std::size_t>(std::thread::hardware_concurrency(), 1, n);
    std::vector<std::thread> pool;
    for (std::size_t w = 1; w < workers; ++w) pool.emplace_back(worker);
    worker();
    for (auto& t : pool) t.join();
    if (failure) std::rethrow_exception(failure);
    return out;
}

double binomial_margin(double p, std::size_t trials) {
    if (!(p > 0.0 && p < 1.0)) return 0.0;
    return 3.0 * std::sqrt(p * (1.0 - p) / static_cast<double>(trials));
}

namespace {

template <typename Run>
CampaignSummary with_rerun(const ExperimentConfig& cfg, bool allow_rerun, Run run) {
    auto summary = run(cfg);
    if (!summary.statistical_ok && allow_rerun) {
        auto again = cfg;
        again.base_seed = rerun_seed(cfg.base_seed);
        summary = run(again);
        summary.rerun = true;
    }
    return summary;
}

CampaignSummary start_summary(const char* kind, const CampaignContext& ctx) {
    CampaignSummary s;
    s.kind = kind;
    s.cfg = ctx.cfg;
    s.class_empty = ctx.class_empty;
    s.results = run_trials(ctx);
    return s;
}

void finish(CampaignSummary& s) {
    s.frequency = static_cast<double>(s.events) / static_cast<double>(s.results.size());
    s.margin = binomial_margin(s.theory, s.results.size());
    s.statistical_ok = s.theory >= 1.0 || s.frequency <= s.theory + s.margin;
}

} // namespace

CampaignSummary run_v1_campaign(const ExperimentConfig& cfg, bool allow_rerun) {
    return with_rerun(cfg, allow_rerun, [](const ExperimentConfig& c) {
        const auto ctx = make_context(c);
        auto s = start_summary("v1", ctx);
        const auto& rc = ctx.cfg;
        for (const auto& t : s.results) s.events += t.v1_event ? 1 : 0;
        s.theory = prop1_tail(static_cast<double>(rc.N), static_cast<double>(rc.r), rc.R, rc.d, rc.nu);
        finish(s);
        return s;
    });
}

CampaignSummary run_sampling_inequality_campaign(const ExperimentConfig& cfg, bool allow_rerun) {
    return with_rerun(cfg, allow_rerun, [](const ExperimentConfig& c) {
        const auto ctx = make_context(c);
        auto s = start_summary("sampling", ctx);
        const auto& rc = ctx.cfg;
        const auto hyp = hypothesis_check(rc.delta_target, rc.nu, rc.d);
        std::size_t near_fail = 0, small_fail = 0, frame_checked = 0, frame_bad = 0;
        for (const auto& t : s.results) {
            near_fail += t.A_lhs_ok ? 0 : 1;
            small_fail += t.A_lhs_ok_small ? 0 : 1;
            s.events += (t.A_lhs_ok && t.A_lhs_ok_small) ? 0 : 1;
            s.hard_violations += (t.upper_ok && t.residual_ok) ? 0 : 1;
            // Outside V1 and with alpha >= 1/2, r lambda_min(G) > r (alpha - nu)/R^d >= A.
            if (!t.v1_event && ctx.tb->alpha >= 0.5) {
                ++frame_checked;
                frame_bad += t.A <= t.frame_bound ? 0 : 1;
            }
        }
        s.theory = rc.epsilon;
        finish(s);
        const double prob = theorem_probability(rc.R, rc.d, static_cast<double>(rc.r), rc.nu);
        s.extra = {{"mode", hyp.ok() ? "theorem" : "diagnostic"},
                   {"A", fmt_double(constant_A_main(static_cast<double>(rc.r), rc.R, rc.d, rc.delta_target, rc.nu))},
                   {"theorem_probability", fmt_double(prob)},
                   {"failure_bound", fmt_double(1.0 - prob)},
                   {"near_failures", std::to_string(near_fail)},
                   {"small_failures", std::to_string(small_fail)},
                   {"min_delta", fmt_double(ctx.min_delta)},
                   {"small_delta", fmt_double(ctx.small_delta)},
                   {"alpha", fmt_double(ctx.tb->alpha)},
                   {"frame_checked", std::to_string(frame_checked)},
                   {"frame_inconsistent", std::to_string(frame_bad)}};
        return s;
    });
}

CampaignSummary run_covering_campaign(const ExperimentConfig& cfg, double a, bool allow_rerun) {
    return with_rerun(cfg, allow_rerun, [a](const ExperimentConfig& c) {
        const auto ctx = make_context(c);
        const auto& rc = ctx.cfg;
        const double bound = covering_tail(rc.R, rc.d, static_cast<double>(rc.r), a);
        auto s = start_summary("cover", ctx);
        const double threshold = a * static_cast<double>(rc.r);
        for (const auto& t : s.results) s.events += static_cast<double>(t.N0) > threshold ? 1 : 0;
        s.theory = bound;
        finish(s);
        s.extra = {{"a", fmt_double(a)}, {"vacuous", bound >= 1.0 ? "1" : "0"}};
        return s;
    });
}

namespace {

constexpr const char* kTrialColumns =
    "trial,seed,deviation_lambda_min,v1_event,N0,frame_bound,sampling_sum,norm_sq,A,A_lhs_ok,upper_ok,"
    "residual,residual_bound,residual_ok,delta_f,sampling_sum_small,A_lhs_ok_small";
constexpr const char* kEchoColumns = "R,d,N,M,r,nu,delta_target,epsilon,quad_order,base_seed";
constexpr std::size_t kTrialColumnCount = 17;

} // namespace

void emit_csv(std::ostream& os, const CampaignSummary& s) {
    const auto& c = s.cfg;
    std::ostringstream echo;
    echo << fmt_double(c.R) << ',' << c.d << ',' << c.N << ',' << c.M << ',' << c.r << ',' << fmt_double(c.nu) << ','
         << fmt_double(c.delta_target) << ',' << fmt_double(c.epsilon) << ',' << c.quad_order << ',' << c.base_seed;
    os << kTrialColumns << ',' << kEchoColumns << '\n';
    for (const auto& t : s.results) {
        os << t.trial << ',' << t.seed << ',' << fmt_double(t.deviation_lambda_min) << ',' << t.v1_event << ','
           << t.N0 << ',' << fmt_double(t.frame_bound) << ',' << fmt_double(t.sampling_sum) << ','
           << fmt_double(t.norm_sq) << ',' << fmt_double(t.A) << ',' << t.A_lhs_ok << ',' << t.upper_ok << ','
           << fmt_double(t.residual) << ',' << fmt_double(t.residual_bound) << ',' << t.residual_ok << ','
           << fmt_double(t.delta_f) << ',' << fmt_double(t.sampling_sum_small) << ',' << t.A_lhs_ok_small << ','
           << echo.str() << '\n';
    }
    os << "#summary,kind=" << s.kind << ",trials=" << s.results.size() << ",events=" << s.events
       << ",frequency=" << fmt_double(s.frequency) << ",theory=" << fmt_double(s.theory)
       << ",margin=" << fmt_double(s.margin) << ",statistical_ok=" << s.statistical_ok
       << ",hard_violations=" << s.hard_violations << ",rerun=" << s.rerun << ",class_empty=" << s.class_empty;
    for (const auto& [k, v] : s.extra) os << ',' << k << '=' << v;
    os << '\n';
}

void emit_csv(const std::string& path, const CampaignSummary& summary) {
    std::ofstream out(path);
    if (!out) throw std::runtime_error("cannot write " + path);
    emit_csv(out, summary);
}

std::vector<TrialResult> read_results_csv(std::istream& is, const std::string& source) {
    std::string line;
    int line_no = 1;
    if (!std::getline(is, line) || line.rfind(kTrialColumns, 0) != 0)
        throw ParseError(source, line_no, "unexpected header");
    std::vector<TrialResult> out;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty() || line.front() == '#') continue;
        const auto f = split_csv(line);
        if (f.size() < kTrialColumnCount) throw ParseError(source, line_no, "too few columns");
        auto dbl = [&](int i) { return parse_double(f[i], source, line_no); };
        auto flag = [&](int i) {
            const auto v = parse_int(f[i], source, line_no);
            if (v != 0 && v != 1) throw ParseError(source, line_no, "expected 0/1 flag");
            return v == 1;
        };
        TrialResult t;
        t.trial = static_cast<std::size_t>(parse_int(f[0], source, line_no));
        t.seed = parse_u64(f[1], source, line_no);
        t.deviation_lambda_min = dbl(2);
        t.v1_event = flag(3);
        t.N0 = static_cast<std::size_t>(parse_int(f[4], source, line_no));
        t.frame_bound = dbl(5);
        t.sampling_sum = dbl(6);
        t.norm_sq = dbl(7);
        t.A = dbl(8);
        t.A_lhs_ok = flag(9);
        t.upper_ok = flag(10);
        t.residual = dbl(11);
        t.residual_bound = dbl(12);
        t.residual_ok = flag(13);
        t.delta_f = dbl(14);
        t.sampling_sum_small = dbl(15);
        t.A_lhs_ok_small = flag(16);
        out.push_back(t);
    }
    return out;
}

} // namespace relsamp
