#include "relsamp/blfunc.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <numbers>
#include <ostream>
#include <string>

#include "relsamp/csv.hpp"
#include "relsamp/rng.hpp"

namespace relsamp {

BandlimitedFunction::BandlimitedFunction(std::shared_ptr<const TensorBasis> tb, std::vector<double> coeffs,
                                         std::uint64_t seed)
    : tb_(std::move(tb)), coeffs_(std::move(coeffs)), seed_(seed) {
    if (!tb_) throw std::invalid_argument("BandlimitedFunction: null basis");
    if (coeffs_.size() < tb_->N || coeffs_.size() > tb_->size()) {
        throw std::invalid_argument("BandlimitedFunction: need N <= M <= basis size (N=" + std::to_string(tb_->N) +
                                    ", M=" + std::to_string(coeffs_.size()) +
                                    ", size=" + std::to_string(tb_->size()) + ")");
    }
}

double BandlimitedFunction::norm2_sq() const {
    double s = 0.0;
    for (double c : coeffs_) s += c * c;
    return s;
}

double BandlimitedFunction::local_norm2_sq() const {
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) s += tb_->lambda[j] * coeffs_[j] * coeffs_[j];
    return s;
}

double BandlimitedFunction::concentration() const {
    const double n = norm2_sq();
    return n > 0.0 ? local_norm2_sq() / n : 1.0;
}

double BandlimitedFunction::delta() const {
    // Summing (1 - lambda_j) c_j^2 directly avoids cancellation when delta is tiny.
    const double n = norm2_sq();
    if (!(n > 0.0)) return 0.0;
    double s = 0.0;
    for (std::size_t j = 0; j < coeffs_.size(); ++j) s += (1.0 - tb_->lambda[j]) * coeffs_[j] * coeffs_[j];
    return s / n;
}

InfeasibleTarget::InfeasibleTarget(double requested, double minimum)
    : std::runtime_error("infeasible delta target " + fmt_double(requested) + ": minimum achievable delta_f is " +
                         fmt_double(minimum)),
      requested_(requested),
      minimum_(minimum) {}

std::size_t default_M(const TensorBasis& tb) { return std::min(2 * tb.N, tb.size()); }

double min_achievable_delta(const TensorBasis& tb) { return 1.0 - tb.lambda[0]; }

BandlimitedFunction synth_random(std::shared_ptr<const TensorBasis> tb, std::size_t M, double delta_target,
                                 std::uint64_t seed) {
    if (!tb) throw std::invalid_argument("synth_random: null basis");
    if (M < tb->N || M > tb->size())
        throw std::invalid_argument("synth_random: M must satisfy N <= M <= basis size");
    if (!(delta_target > 0.0 && delta_target < 1.0))
        throw std::invalid_argument("synth_random: delta_target must lie in (0,1)");
    const double floor_delta = min_achievable_delta(*tb);
    if (delta_target < floor_delta) throw InfeasibleTarget(delta_target, floor_delta);

    const auto& lambda = tb->lambda;
    const std::size_t N = tb->N;
    Rng rng(seed);
    std::vector<double> c(M);
    for (auto& v : c) v = rng.normal();
    if (c[0] == 0.0) c[0] = 1.0;

    auto deficit = [&](std::size_t lo, std::size_t hi, double& a, double& b) {
        a = 0.0;
        b = 0.0;
        for (std::size_t j = lo; j < hi; ++j) {
            a += (1.0 - lambda[j]) * c[j] * c[j];
            b += c[j] * c[j];
        }
    };

    // Head: shrink the part orthogonal to phi_0 so that delta(head) <= head_budget.
    const double head_budget = 0.5 * (floor_delta + delta_target);
    double a_perp = 0.0;
    double b_perp = 0.0;
    deficit(1, N, a_perp, b_perp);
    const double room = (head_budget - floor_delta) * c[0] * c[0];
    const double excess = a_perp - head_budget * b_perp;
    if (excess > 0.0) {
        const double beta = std::min(1.0, std::sqrt(std::max(0.0, room) / excess));
        for (std::size_t j = 1; j < N; ++j) c[j] *= beta;
    }

    // Tail: delta = (a + s^2 a_t) / (b + s^2 b_t) <= T  <=>  s^2 (a_t - T b_t) <= T b - a.
    if (M > N) {
        double a = 0.0, b = 0.0, a_t = 0.0, b_t = 0.0;
        deficit(0, N, a, b);
        deficit(N, M, a_t, b_t);
        const double denom = a_t - delta_target * b_t;
        if (denom > 0.0) {
            double s = std::sqrt(std::max(0.0, delta_target * b - a) / denom);
            for (std::size_t j = N; j < M; ++j) c[j] *= s;
            // Rounding can land a hair above the target.
            for (int guard = 0; guard < 64; ++guard) {
                BandlimitedFunction probe(tb, c, seed);
                if (probe.delta() <= delta_target) break;
                for (std::size_t j = N; j < M; ++j) c[j] *= (1.0 - 1e-12);
                s *= (1.0 - 1e-12);
            }
        }
    }
    return BandlimitedFunction(std::move(tb), std::move(c), seed);
}

double evaluate(const BandlimitedFunction& f, std::span<const double> x) {
    const auto phi = eval_all_d(f.basis(), x, f.size());
    double v = 0.0;
    for (std::size_t j = 0; j < phi.size(); ++j) v += f.coeffs()[j] * phi[j];
    return v;
}

BandlimitedFunction project_E(const BandlimitedFunction& f) {
    auto c = f.coeffs();
    std::fill(c.begin() + static_cast<std::ptrdiff_t>(f.basis().N), c.end(), 0.0);
    return BandlimitedFunction(f.basis_ptr(), std::move(c), f.seed());
}

BandlimitedFunction project_F(const BandlimitedFunction& f) {
    auto c = f.coeffs();
    std::fill(c.begin(), c.begin() + static_cast<std::ptrdiff_t>(f.basis().N), 0.0);
    return BandlimitedFunction(f.basis_ptr(), std::move(c), f.seed());
}

QestimReport qestim_check(const BandlimitedFunction& f) {
    QestimReport rep;
    rep.delta = f.delta();
    rep.alpha = f.basis().alpha;
    rep.vacuous = rep.delta >= 1.0 - rep.alpha;
    rep.norm_sq = f.norm2_sq();
    const auto Ef = project_E(f);
    const auto Ff = project_F(f);
    rep.E_norm_sq = Ef.norm2_sq();
    rep.E_local_sq = Ef.local_norm2_sq();
    rep.F_norm_sq = Ff.norm2_sq();
    const double ratio = rep.delta / (1.0 - rep.alpha);
    rep.E_norm_sq_lower = (1.0 - ratio) * rep.norm_sq;
    rep.E_local_sq_lower = rep.alpha * (1.0 - ratio) * rep.norm_sq;
    rep.F_norm_sq_upper = ratio * rep.norm_sq;
    // Relative slack for the rounding in the sums above.
    const double slack = 1e-12 * rep.norm_sq;
    rep.E_norm_ok = rep.E_norm_sq >= rep.E_norm_sq_lower - slack;
    rep.E_local_ok = rep.E_local_sq >= rep.E_local_sq_lower - slack;
    rep.F_norm_ok = rep.F_norm_sq <= rep.F_norm_sq_upper + slack;
    return rep;
}

double sinc_kernel(std::span<const double> x, std::span<const double> y) {
    double v = 1.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        const double t = x[i] - y[i];
        if (t != 0.0) v *= std::sin(std::numbers::pi * t) / (std::numbers::pi * t);
    }
    return v;
}

void write_function_csv(std::ostream& os, const BandlimitedFunction& f) {
    const auto& tb = f.basis();
    os << "#function,R=" << fmt_double(tb.R()) << ",d=" << tb.dim << ",N=" << tb.N << ",M=" << f.size()
       << ",seed=" << f.seed() << '\n';
    os << "j,c_j\n";
    for (std::size_t j = 0; j < f.size(); ++j) os << j << ',' << fmt_double(f.coeffs()[j]) << '\n';
}

BandlimitedFunction read_function_csv(std::istream& is, std::shared_ptr<const TensorBasis> tb) {
    const std::string src = "function csv";
    std::string line;
    int line_no = 1;
    if (!std::getline(is, line)) throw ParseError(src, line_no, "empty input");
    auto kv = parse_tagged_header(line, "function", src, line_no);
    for (const char* key : {"R", "d", "N", "M", "seed"})
        if (!kv.count(key)) throw ParseError(src, line_no, std::string("header missing key '") + key + "'");
    if (parse_double(kv["R"], src, line_no) != tb->R() || parse_int(kv["d"], src, line_no) != tb->dim ||
        parse_int(kv["N"], src, line_no) != static_cast<long long>(tb->N))
        throw ParseError(src, line_no, "header R/d/N do not match the basis");
    const auto M = parse_int(kv["M"], src, line_no);
    const auto seed = parse_u64(kv["seed"], src, line_no);

    ++line_no;
    if (!std::getline(is, line) || trim(line) != "j,c_j") throw ParseError(src, line_no, "expected 'j,c_j'");
    std::vector<double> c;
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != 2) throw ParseError(src, line_no, "expected 2 columns");
        if (parse_int(cells[0], src, line_no) != static_cast<long long>(c.size()))
            throw ParseError(src, line_no, "coefficient index out of sequence");
        c.push_back(parse_double(cells[1], src, line_no));
    }
    if (static_cast<long long>(c.size()) != M) throw ParseError(src, line_no, "row count does not match M");
    try {
        return BandlimitedFunction(std::move(tb), std::move(c), seed);
    } catch (const std::invalid_argument& e) {
        throw ParseError(src, line_no, e.what());
    }
}

} // namespace relsamp
