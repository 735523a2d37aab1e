#include "relsamp/reconstruct.hpp"

#include <cmath>
#include <stdexcept>
#include <string>

#include "relsamp/bounds.hpp"

namespace relsamp {

Eigen::MatrixXd design_matrix(const TensorBasis& tb, const SampleSet& samples, std::size_t cols) {
    Eigen::MatrixXd Phi(static_cast<Eigen::Index>(samples.size()), static_cast<Eigen::Index>(cols));
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto row = eval_all_d(tb, samples.point(j), cols);
        for (std::size_t k = 0; k < cols; ++k)
            Phi(static_cast<Eigen::Index>(j), static_cast<Eigen::Index>(k)) = row[k];
    }
    return Phi;
}

Eigen::VectorXd least_squares(const TensorBasis& tb, const SampleSet& samples, std::span<const double> values) {
    if (values.size() != samples.size()) {
        throw std::invalid_argument("least_squares: " + std::to_string(samples.size()) + " samples but " +
                                    std::to_string(values.size()) + " values");
    }
    if (samples.size() == 0) throw std::invalid_argument("least_squares: empty sample set");
    const Eigen::MatrixXd Phi = design_matrix(tb, samples, tb.N);
    const Eigen::Map<const Eigen::VectorXd> b(values.data(), static_cast<Eigen::Index>(values.size()));
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(Phi, Eigen::ComputeThinU | Eigen::ComputeThinV);
    svd.setThreshold(kRankTolerance);
    return svd.solve(b);
}

double sampled_residual(const TensorBasis& tb, const SampleSet& samples, std::span<const double> values,
                        const Eigen::VectorXd& p) {
    double s = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) {
        const auto phi = eval_all_d(tb, samples.point(j), static_cast<std::size_t>(p.size()));
        double v = 0.0;
        for (Eigen::Index k = 0; k < p.size(); ++k) v += p(k) * phi[static_cast<std::size_t>(k)];
        const double e = values[j] - v;
        s += e * e;
    }
    return s;
}

ApproxRecReport approxrec_check(const BandlimitedFunction& f, const SampleSet& samples) {
    const auto& tb = f.basis();
    std::vector<double> values(samples.size());
    for (std::size_t j = 0; j < samples.size(); ++j) values[j] = evaluate(f, samples.point(j));

    ApproxRecReport rep;
    rep.coeffs = least_squares(tb, samples, values);
    rep.residual = sampled_residual(tb, samples, values, rep.coeffs);
    rep.N0 = covering_index(samples);
    const double delta = f.delta();
    rep.vacuous = delta >= 1.0 - tb.alpha;
    rep.bound = static_cast<double>(rep.N0) * kappa(tb.dim) * delta / (1.0 - tb.alpha) * f.norm2_sq();
    // Residuals of exactly representable data sit at rounding level.
    double scale = 0.0;
    for (double v : values) scale += v * v;
    rep.ok = rep.residual <= rep.bound + 1e-14 * scale;
    return rep;
}

std::optional<BandlimitedFunction> null_perturbation(std::shared_ptr<const TensorBasis> tb, std::size_t M,
                                                     const SampleSet& samples) {
    if (M < tb->N || M > tb->size()) throw std::invalid_argument("null_perturbation: need N <= M <= basis size");
    const Eigen::MatrixXd E = design_matrix(*tb, samples, M);
    Eigen::JacobiSVD<Eigen::MatrixXd> svd(E, Eigen::ComputeFullV);
    const Eigen::VectorXd c = svd.matrixV().col(static_cast<Eigen::Index>(M) - 1);

    BandlimitedFunction g(tb, std::vector<double>(c.data(), c.data() + c.size()), samples.seed);
    const double norm = std::sqrt(g.norm2_sq());
    double worst = 0.0;
    for (std::size_t j = 0; j < samples.size(); ++j) worst = std::max(worst, std::abs(evaluate(g, samples.point(j))));
    if (!(norm > 0.0) || worst > 1e-8 * norm) return std::nullopt;
    return g;
}

std::optional<PerturbationDemo> perturb_within_class(const BandlimitedFunction& f, const BandlimitedFunction& g,
                                                     const SampleSet& samples, double delta_target, double eps0) {
    if (f.size() != g.size() || &f.basis() != &g.basis())
        throw std::invalid_argument("perturb_within_class: f and g must share basis and length");
    double eps = eps0;
    for (int k = 0; k < 60; ++k, eps *= 0.5) {
        auto c = f.coeffs();
        for (std::size_t j = 0; j < c.size(); ++j) c[j] += eps * g.coeffs()[j];
        const BandlimitedFunction h(f.basis_ptr(), std::move(c), f.seed());
        if (h.delta() > delta_target) continue;
        PerturbationDemo demo;
        demo.epsilon = eps;
        demo.delta_perturbed = h.delta();
        demo.distance = eps * std::sqrt(g.norm2_sq());
        for (std::size_t j = 0; j < samples.size(); ++j) {
            const auto x = samples.point(j);
            demo.max_sample_gap = std::max(demo.max_sample_gap, std::abs(evaluate(f, x) - evaluate(h, x)));
        }
        return demo;
    }
    return std::nullopt;
}

} // namespace relsamp
