#ifndef RELSAMP_RECONSTRUCT_HPP
#define RELSAMP_RECONSTRUCT_HPP

#include <optional>
#include <span>

#include <Eigen/Dense>

#include "relsamp/blfunc.hpp"
#include "relsamp/sampling.hpp"

namespace relsamp {

/// Singular values below this fraction of the largest count as zero.
inline constexpr double kRankTolerance = 1e-10;

// Phi(j, k) = phi_k(x_j) for j < r, k < cols.
Eigen::MatrixXd design_matrix(const TensorBasis& tb, const SampleSet& samples, std::size_t cols);

// Minimum-norm minimizer over P_N of sum_j (values_j - p(x_j))^2, from an
// SVD of the r x N design matrix. Throws std::invalid_argument when the
// lengths of samples and values differ.
Eigen::VectorXd least_squares(const TensorBasis& tb, const SampleSet& samples, std::span<const double> values);

// sum_j (values_j - (Phi p)_j)^2.
double sampled_residual(const TensorBasis& tb, const SampleSet& samples, std::span<const double> values,
                        const Eigen::VectorXd& p);

struct ApproxRecReport {
    double residual = 0.0;
    double bound = 0.0; // N0 kappa delta_f/(1-alpha) ||f||^2
    std::size_t N0 = 0;
    bool vacuous = false; // delta_f >= 1 - alpha
    bool ok = false;
    Eigen::VectorXd coeffs;
};

ApproxRecReport approxrec_check(const BandlimitedFunction& f, const SampleSet& samples);

// A unit-norm g in the M-span vanishing at every sample
// (max_j |g(x_j)| <= 1e-8 ||g||), from the last right singular vector of
// the r x M evaluation matrix. Empty when no such vector exists.
std::optional<BandlimitedFunction> null_perturbation(std::shared_ptr<const TensorBasis> tb, std::size_t M,
                                                     const SampleSet& samples);

struct PerturbationDemo {
    double epsilon = 0.0;
    double delta_perturbed = 0.0;
    double max_sample_gap = 0.0; // max_j |f(x_j) - (f + eps g)(x_j)|
    double distance = 0.0;       // ||eps g||
};

// Halves eps from eps0 until f + eps g has delta <= delta_target; empty if
// 60 halvings do not suffice. f and g must share a basis and length.
std::optional<PerturbationDemo> perturb_within_class(const BandlimitedFunction& f, const BandlimitedFunction& g,
                                                     const SampleSet& samples, double delta_target,
                                                     double eps0 = 1.0);

} // namespace relsamp

#endif
