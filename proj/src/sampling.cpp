#include "relsamp/sampling.hpp"

#include <cmath>
#include <istream>
#include <map>
#include <numbers>
#include <ostream>
#include <stdexcept>
#include <string>

#include "relsamp/bounds.hpp"
#include "relsamp/csv.hpp"
#include "relsamp/rng.hpp"

namespace relsamp {

SampleSet draw_uniform(double R, int d, std::size_t r, std::uint64_t seed) {
    if (r == 0) throw std::invalid_argument("draw_uniform: r must be >= 1");
    if (!(R > 0.0) || d < 1) throw std::invalid_argument("draw_uniform: need R > 0 and d >= 1");
    SampleSet s{R, d, std::vector<double>(r * static_cast<std::size_t>(d)), seed};
    Rng rng(seed);
    for (auto& x : s.coords) x = R * (rng.uniform01() - 0.5);
    return s;
}

Eigen::MatrixXd rank_one_T(const TensorBasis& tb, std::span<const double> x) {
    const auto phi = eval_all_d(tb, x, tb.N);
    const Eigen::Map<const Eigen::VectorXd> v(phi.data(), static_cast<Eigen::Index>(phi.size()));
    return v * v.transpose();
}

FrameMatrix frame_matrix(std::shared_ptr<const TensorBasis> tb, const SampleSet& samples) {
    if (samples.size() == 0) throw std::invalid_argument("frame_matrix: empty sample set");
    const auto n = static_cast<Eigen::Index>(tb->N);
    Eigen::MatrixXd sum = Eigen::MatrixXd::Zero(n, n);
    Eigen::MatrixXd comp = Eigen::MatrixXd::Zero(n, n);
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto phi = eval_all_d(*tb, samples.point(j), tb->N);
        for (Eigen::Index k = 0; k < n; ++k) {
            for (Eigen::Index l = 0; l <= k; ++l) {
                // Neumaier's variant of Kahan summation.
                const double term = phi[k] * phi[l];
                const double t = sum(k, l) + term;
                if (std::abs(sum(k, l)) >= std::abs(term))
                    comp(k, l) += (sum(k, l) - t) + term;
                else
                    comp(k, l) += (term - t) + sum(k, l);
                sum(k, l) = t;
            }
        }
    }
    const double inv_r = 1.0 / static_cast<double>(samples.size());
    FrameMatrix fm;
    fm.G.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        for (Eigen::Index l = 0; l <= k; ++l) {
            const double v = (sum(k, l) + comp(k, l)) * inv_r;
            fm.G(k, l) = v;
            fm.G(l, k) = v;
        }
    }
    fm.r = samples.size();
    fm.tb = std::move(tb);
    return fm;
}

double deviation_lambda_min(const FrameMatrix& fm) {
    Eigen::MatrixXd D = fm.G;
    const double inv_vol = 1.0 / fm.tb->volume();
    for (Eigen::Index k = 0; k < D.rows(); ++k) D(k, k) -= inv_vol * fm.tb->lambda[static_cast<std::size_t>(k)];
    return sym_eig(D).values.tail(1)(0);
}

double frame_lambda_min(const FrameMatrix& fm) { return sym_eig(fm.G).values.tail(1)(0); }

std::size_t covering_index(const SampleSet& samples) {
    std::map<std::vector<long long>, std::size_t> cells;
    std::size_t best = 0;
    std::vector<long long> key(static_cast<std::size_t>(samples.d));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto p = samples.point(j);
        for (int i = 0; i < samples.d; ++i) key[i] = static_cast<long long>(std::floor(p[i] + 0.5));
        best = std::max(best, ++cells[key]);
    }
    return best;
}

PlancherelPolyaReport pp_check(const BandlimitedFunction& f, const SampleSet& samples) {
    PlancherelPolyaReport rep;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const double v = evaluate(f, samples.point(j));
        rep.lhs += v * v;
    }
    rep.N0 = covering_index(samples);
    rep.rhs = static_cast<double>(rep.N0) * kappa(f.basis().dim) * f.norm2_sq();
    rep.ok = rep.lhs <= rep.rhs;
    return rep;
}

void write_samples_csv(std::ostream& os, const SampleSet& samples) {
    os << "#samples,R=" << fmt_double(samples.R) << ",d=" << samples.d << ",r=" << samples.size()
       << ",seed=" << samples.seed << '\n';
    for (int i = 1; i <= samples.d; ++i) os << (i > 1 ? "," : "") << "x_" << i;
    os << '\n';
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto p = samples.point(j);
        for (int i = 0; i < samples.d; ++i) os << (i > 0 ? "," : "") << fmt_double(p[i]);
        os << '\n';
    }
}

SampleSet read_samples_csv(std::istream& is, const std::string& source) {
    std::string line;
    int line_no = 1;
    if (!std::getline(is, line)) throw ParseError(source, line_no, "empty input");
    auto kv = parse_tagged_header(line, "samples", source, line_no);
    for (const char* key : {"R", "d", "r", "seed"})
        if (!kv.count(key)) throw ParseError(source, line_no, std::string("header missing key '") + key + "'");
    SampleSet s;
    s.R = parse_double(kv["R"], source, line_no);
    s.d = static_cast<int>(parse_int(kv["d"], source, line_no));
    s.seed = parse_u64(kv["seed"], source, line_no);
    const auto r = parse_int(kv["r"], source, line_no);
    if (!(s.R > 0.0) || s.d < 1 || r < 1) throw ParseError(source, line_no, "need R > 0, d >= 1, r >= 1");

    ++line_no;
    if (!std::getline(is, line) || split_csv(line).size() != static_cast<std::size_t>(s.d))
        throw ParseError(source, line_no, "expected coordinate header with d columns");
    while (std::getline(is, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto cells = split_csv(line);
        if (cells.size() != static_cast<std::size_t>(s.d))
            throw ParseError(source, line_no, "expected " + std::to_string(s.d) + " columns");
        for (const auto& c : cells) {
            const double v = parse_double(c, source, line_no);
            if (std::abs(v) > 0.5 * s.R) throw ParseError(source, line_no, "point outside C_R");
            s.coords.push_back(v);
        }
    }
    if (static_cast<long long>(s.size()) != r) throw ParseError(source, line_no, "row count does not match r");
    return s;
}

} // namespace relsamp
