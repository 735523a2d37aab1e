#include "cli.hpp"

#include <cmath>
#include <fstream>
#include <iostream>
#include <memory>
#include <optional>
#include <sstream>

#include <CLI11.hpp>

#include "relsamp/blfunc.hpp"
#include "relsamp/bounds.hpp"
#include "relsamp/csv.hpp"
#include "relsamp/experiment.hpp"
#include "relsamp/prolate.hpp"
#include "relsamp/reconstruct.hpp"
#include "relsamp/rng.hpp"
#include "relsamp/sampling.hpp"

namespace relsamp::cli {

namespace {

struct UsageError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw UsageError("cannot write '" + path + "'");
    return out;
}

bool is_integer(double R) { return std::abs(R - std::round(R)) < 1e-12; }

// ---- basis -------------------------------------------------------------

struct BasisOpts {
    double R = 0.0;
    int d = 1;
    std::size_t N = 0;
    int quad_order = 0;
    std::string out;
};

int cmd_basis(const BasisOpts& o, std::ostream& os) {
    const int order = o.quad_order > 0 ? o.quad_order : min_quadrature_order(o.R);
    auto base = std::make_shared<const ProlateBasis1D>(build_basis_1d(o.R, order));
    double trace = 0.0;
    for (double v : base->spectrum()) trace += v;

    os << "# basis R=" << fmt_double(o.R) << " d=" << o.d << " quad_order=" << order
       << " retained=" << base->count() << " trace=" << fmt_double(trace) << '\n';
    write_basis_csv(os, *base);

    int status = kExitOk;
    if (is_integer(o.R)) {
        const auto Ri = static_cast<std::size_t>(std::llround(o.R));
        // 1-based mu_{R+1} and mu_{R-1} are 0-based entries R and R-2.
        if (Ri >= 2 && Ri < base->count()) {
            const double upper = base->mu()[Ri];
            const double lower = base->mu()[Ri - 2];
            const bool ok = upper <= 0.5 && 0.5 <= lower;
            os << "half_point: mu_" << Ri + 1 << "=" << fmt_double(upper) << " <= 1/2 <= mu_" << Ri - 1 << "="
               << fmt_double(lower) << " : " << (ok ? "pass" : "FAIL") << '\n';
        }
    } else {
        os << "half_point: skipped (R not an integer)\n";
    }

    std::shared_ptr<const TensorBasis> tb;
    if (o.d > 1) {
        const std::size_t N =
            o.N > 0 ? o.N : static_cast<std::size_t>(std::ceil(std::pow(o.R, o.d) - 1e-9));
        tb = tensor_basis(base, o.d, N);
        std::size_t above_half = 0;
        for (double l : tb->lambda) above_half += l >= 0.5 ? 1 : 0;
        os << "# tensor N=" << tb->N << " alpha=" << fmt_double(tb->alpha) << " size=" << tb->size()
           << " count_ge_half=" << above_half << " (R^d=" << fmt_double(tb->volume()) << ")\n";
        write_basis_csv(os, *tb);
    }

    if (!o.out.empty()) {
        auto out = open_out(o.out);
        if (tb)
            write_basis_csv(out, *tb);
        else
            write_basis_csv(out, *base);
    }
    return status;
}

// ---- bounds ------------------------------------------------------------

struct BoundsOpts {
    double R = 0.0;
    int d = 1;
    long long r = 0;
    double nu = 0.0;
    double delta = 0.0;
    double epsilon = 0.0;
    std::string out;
};

int cmd_bounds(const BoundsOpts& o, std::ostream& os) {
    BoundParams p;
    p.R = o.R;
    p.d = o.d;
    p.r = o.r;
    p.nu = o.nu;
    p.delta = o.delta;
    p.epsilon = o.epsilon;
    const auto rows = bound_table(p);

    std::ostringstream table;
    table << "name,value,status\n";
    for (const auto& row : rows) table << row.name << ',' << fmt_double(row.value) << ',' << row.status << '\n';
    os << table.str();

    const double floor = delta_feasible(o.R);
    if (o.delta < floor) {
        os << "warning: delta=" << fmt_double(o.delta) << " is below the feasibility floor " << fmt_double(floor)
           << " for R=" << fmt_double(o.R) << "; the concentration class is empty\n";
    }
    if (!hypothesis_check(o.delta, o.nu, o.d).ok()) os << "warning: theorem hypotheses on (delta, nu) are violated\n";
    if (!o.out.empty()) open_out(o.out) << table.str();
    return kExitOk;
}

// ---- campaigns -----------------------------------------------------------

struct CampaignOpts {
    std::string config;
    std::string out;
    std::optional<std::uint64_t> seed;
    std::optional<double> a;
};

ExperimentConfig load_with_seed(const CampaignOpts& o) {
    auto cfg = load_config(o.config);
    if (o.seed) cfg.base_seed = *o.seed;
    return cfg;
}

int report_campaign(const CampaignSummary& s, const std::string& out, std::ostream& os) {
    emit_csv(out, s);
    os << s.kind << ": trials=" << s.results.size() << " events=" << s.events
       << " frequency=" << fmt_double(s.frequency) << " theory=" << fmt_double(s.theory)
       << " margin=" << fmt_double(s.margin) << " statistical=" << (s.statistical_ok ? "pass" : "FAIL")
       << " hard_violations=" << s.hard_violations << (s.rerun ? " (after rerun)" : "")
       << (s.class_empty ? " class_empty" : "") << '\n';
    return (s.hard_violations == 0 && s.statistical_ok) ? kExitOk : kExitViolation;
}

int cmd_mc_v1(const CampaignOpts& o, std::ostream& os) {
    return report_campaign(run_v1_campaign(load_with_seed(o)), o.out, os);
}

int cmd_mc_sampling(const CampaignOpts& o, std::ostream& os) {
    return report_campaign(run_sampling_inequality_campaign(load_with_seed(o)), o.out, os);
}

int cmd_mc_cover(const CampaignOpts& o, std::ostream& os) {
    const auto cfg = load_with_seed(o);
    const double a = o.a ? *o.a : 3.0 / std::pow(cfg.R, cfg.d);
    return report_campaign(run_covering_campaign(cfg, a), o.out, os);
}

// ---- reconstruct -------------------------------------------------------

struct ReconstructOpts {
    CampaignOpts common;
    std::string samples;
    std::string values;
    std::string function;
};

std::vector<double> read_values_csv(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ParseError(path, 0, "cannot open file");
    std::string line;
    int line_no = 1;
    if (!std::getline(in, line) || trim(line) != "value") throw ParseError(path, line_no, "expected header 'value'");
    std::vector<double> v;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        v.push_back(parse_double(line, path, line_no));
    }
    return v;
}

int cmd_reconstruct(const ReconstructOpts& o, std::ostream& os) {
    const auto ctx = make_context(load_with_seed(o.common));
    const auto& cfg = ctx.cfg;

    std::optional<BandlimitedFunction> f;
    if (!o.function.empty()) {
        std::ifstream in(o.function);
        if (!in) throw ParseError(o.function, 0, "cannot open file");
        f = read_function_csv(in, ctx.tb);
    } else if (o.values.empty()) {
        if (ctx.class_empty) throw InfeasibleTarget(cfg.delta_target, ctx.min_delta);
        f = synth_random(ctx.tb, cfg.M, cfg.delta_target, derive_seed(cfg.base_seed, 1));
    }

    SampleSet samples;
    if (!o.samples.empty()) {
        std::ifstream in(o.samples);
        if (!in) throw ParseError(o.samples, 0, "cannot open file");
        samples = read_samples_csv(in, o.samples);
        if (samples.R != cfg.R || samples.d != cfg.d)
            throw ParseError(o.samples, 1, "sample header R/d do not match the config");
    } else {
        samples = draw_uniform(cfg.R, cfg.d, static_cast<std::size_t>(cfg.r), cfg.base_seed);
    }

    std::vector<double> values;
    if (!o.values.empty()) {
        values = read_values_csv(o.values);
    } else {
        for (std::size_t j = 0; j < samples.size(); ++j) values.push_back(evaluate(*f, samples.point(j)));
    }

    const auto p = least_squares(*ctx.tb, samples, values);
    const double residual = sampled_residual(*ctx.tb, samples, values, p);

    auto out = open_out(o.common.out);
    out << "k,p_k\n";
    for (Eigen::Index k = 0; k < p.size(); ++k) out << k << ',' << fmt_double(p(k)) << '\n';

    int status = kExitOk;
    std::ostringstream report;
    report << "#report,residual=" << fmt_double(residual);
    if (f && o.values.empty()) {
        const auto rep = approxrec_check(*f, samples);
        report << ",bound=" << fmt_double(rep.bound) << ",N0=" << rep.N0 << ",delta_f=" << fmt_double(f->delta())
               << ",pass=" << (rep.ok ? 1 : 0);
        if (!rep.ok) status = kExitViolation;
    } else {
        report << ",bound=nan,pass=nan";
    }
    out << report.str() << '\n';
    os << report.str() << '\n';
    return status;
}

// ---- pp-check ------------------------------------------------------------

int cmd_pp_check(const CampaignOpts& o, std::ostream& os) {
    const auto ctx = make_context(load_with_seed(o));
    const auto& cfg = ctx.cfg;
    if (ctx.class_empty) throw InfeasibleTarget(cfg.delta_target, ctx.min_delta);
    const auto f = synth_random(ctx.tb, cfg.M, cfg.delta_target, derive_seed(cfg.base_seed, 1));
    const auto r = static_cast<std::size_t>(cfg.r);

    // Grid maximum of |f| on C_R, used as the cluster centre.
    const int grid = 41;
    std::vector<double> centre(static_cast<std::size_t>(cfg.d), 0.0);
    {
        double best = -1.0;
        std::vector<int> idx(static_cast<std::size_t>(cfg.d), 0);
        std::vector<double> x(static_cast<std::size_t>(cfg.d));
        while (true) {
            for (int i = 0; i < cfg.d; ++i) x[i] = -0.5 * cfg.R + cfg.R * idx[i] / (grid - 1);
            const double v = std::abs(evaluate(f, x));
            if (v > best) {
                best = v;
                centre = x;
            }
            int i = 0;
            while (i < cfg.d && ++idx[i] == grid) idx[i++] = 0;
            if (i == cfg.d) break;
        }
    }

    SampleSet clustered{cfg.R, cfg.d, {}, cfg.base_seed};
    {
        Rng rng(derive_seed(cfg.base_seed, 2));
        for (std::size_t j = 0; j < r; ++j) {
            for (int i = 0; i < cfg.d; ++i) {
                // Stay inside the unit cube around the centre's lattice point and inside C_R.
                const double cell = std::floor(centre[i] + 0.5);
                double v = centre[i] + 0.1 * (rng.uniform01() - 0.5);
                v = std::clamp(v, std::max(cell - 0.5, -0.5 * cfg.R), std::min(cell + 0.5 - 1e-12, 0.5 * cfg.R));
                clustered.coords.push_back(v);
            }
        }
    }
    const auto uniform = draw_uniform(cfg.R, cfg.d, r, cfg.base_seed);

    std::ostringstream table;
    table << "design,r,N0,lhs,rhs,pass\n";
    bool all_ok = true;
    for (const auto& [name, s] : {std::pair<const char*, const SampleSet*>{"uniform", &uniform}, {"clustered", &clustered}}) {
        const auto rep = pp_check(f, *s);
        all_ok = all_ok && rep.ok;
        table << name << ',' << s->size() << ',' << rep.N0 << ',' << fmt_double(rep.lhs) << ','
              << fmt_double(rep.rhs) << ',' << (rep.ok ? 1 : 0) << '\n';
    }
    open_out(o.out) << table.str();
    os << table.str() << "verdict: " << (all_ok ? "pass" : "FAIL") << '\n';
    return all_ok ? kExitOk : kExitViolation;
}

} // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Random sampling of band-limited functions: prolate bases, bounds and Monte Carlo checks"};
    app.require_subcommand(1);

    BasisOpts basis;
    auto* sc_basis = app.add_subcommand("basis", "Prolate eigenvalues and tensor basis");
    sc_basis->add_option("--R", basis.R, "Bandwidth-support product R (>= 1)")->required();
    sc_basis->add_option("--d", basis.d, "Dimension")->check(CLI::PositiveNumber);
    sc_basis->add_option("--N", basis.N, "Tensor truncation level (default ceil(R^d))");
    sc_basis->add_option("--quad-order", basis.quad_order, "Gauss-Legendre order (default ceil(4R)+30)");
    sc_basis->add_option("--out", basis.out, "Write the basis CSV here");

    BoundsOpts bounds;
    auto* sc_bounds = app.add_subcommand("bounds", "Evaluate every closed-form bound");
    sc_bounds->add_option("--R", bounds.R, "R (>= 2)")->required();
    sc_bounds->add_option("--d", bounds.d, "Dimension")->check(CLI::PositiveNumber);
    sc_bounds->add_option("--r", bounds.r, "Sample count (default: required_samples)");
    sc_bounds->add_option("--nu", bounds.nu, "nu in (0, 1/2)")->required();
    sc_bounds->add_option("--delta", bounds.delta, "delta in (0, 1)")->required();
    sc_bounds->add_option("--epsilon", bounds.epsilon, "epsilon in (0, 1)")->required();
    sc_bounds->add_option("--out", bounds.out, "Write the table as CSV here");

    auto add_campaign = [&](const char* name, const char* help, CampaignOpts& o) {
        auto* sc = app.add_subcommand(name, help);
        sc->add_option("--config", o.config, "Experiment config file")->required();
        sc->add_option("--out", o.out, "Output CSV")->required();
        sc->add_option("--seed", o.seed, "Override base_seed");
        return sc;
    };
    CampaignOpts v1, sampling, cover, pp;
    ReconstructOpts rec;
    auto* sc_v1 = add_campaign("mc-v1", "Monte Carlo: frame-deviation event vs matrix Bernstein tail", v1);
    auto* sc_sampling = add_campaign("mc-sampling", "Monte Carlo: sampling inequality on the concentration class", sampling);
    auto* sc_cover = add_campaign("mc-cover", "Monte Carlo: covering-index event vs its tail", cover);
    sc_cover->add_option("--a", cover.a, "Threshold factor a > R^-d (default 3 R^-d)");
    auto* sc_rec = add_campaign("reconstruct", "Least-squares recovery on P_N with residual bound", rec.common);
    sc_rec->add_option("--samples", rec.samples, "Sample CSV (default: drawn from the config)");
    sc_rec->add_option("--values", rec.values, "Value CSV, header 'value' (default: synthesized f)");
    sc_rec->add_option("--function", rec.function, "Function CSV supplying f");
    auto* sc_pp = add_campaign("pp-check", "Plancherel-Polya inequality on uniform and clustered samples", pp);

    std::vector<std::string> argv_store{"relsamp"};
    argv_store.insert(argv_store.end(), args.begin(), args.end());
    std::vector<char*> argv;
    for (auto& a : argv_store) argv.push_back(a.data());

    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::CallForHelp&) {
        out << app.help();
        return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
        out << app.help("", CLI::AppFormatMode::All);
        return kExitOk;
    } catch (const CLI::ParseError& e) {
        err << "error: " << e.what() << "\n\n" << app.help();
        return kExitUsage;
    }

    try {
        if (sc_basis->parsed()) return cmd_basis(basis, out);
        if (sc_bounds->parsed()) return cmd_bounds(bounds, out);
        if (sc_v1->parsed()) return cmd_mc_v1(v1, out);
        if (sc_sampling->parsed()) return cmd_mc_sampling(sampling, out);
        if (sc_cover->parsed()) return cmd_mc_cover(cover, out);
        if (sc_rec->parsed()) return cmd_reconstruct(rec, out);
        if (sc_pp->parsed()) return cmd_pp_check(pp, out);
    } catch (const ParseError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const UsageError& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const std::invalid_argument& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    } catch (const InfeasibleTarget& e) {
        err << "error: " << e.what() << '\n';
        return kExitUsage;
    }
    return kExitUsage;
}

} // namespace relsamp::cli
