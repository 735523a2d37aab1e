#ifndef RELSAMP_BLFUNC_HPP
#define RELSAMP_BLFUNC_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <stdexcept>
#include <vector>

#include "relsamp/prolate.hpp"

namespace relsamp {

/// A band-limited function in the span of the first M tensor prolate
/// modes, f = sum_j c_j phi_j. Norms and concentration are exact through
/// the eigenvalues: ||f||^2 = sum c_j^2, ||f||_{2,R}^2 = sum lambda_j c_j^2.
class BandlimitedFunction {
public:
    // Throws std::invalid_argument unless tb->N <= coeffs.size() <= tb->size().
    BandlimitedFunction(std::shared_ptr<const TensorBasis> tb, std::vector<double> coeffs,
                        std::uint64_t seed = 0);

    const TensorBasis& basis() const { return *tb_; }
    const std::shared_ptr<const TensorBasis>& basis_ptr() const { return tb_; }
    std::size_t size() const { return coeffs_.size(); }
    const std::vector<double>& coeffs() const { return coeffs_; }
    std::uint64_t seed() const { return seed_; }

    double norm2_sq() const;
    // Energy on C_R.
    double local_norm2_sq() const;
    // ||f||_{2,R}^2 / ||f||^2; the zero function is reported as fully concentrated.
    double concentration() const;
    // delta_f = 1 - concentration.
    double delta() const;

private:
    std::shared_ptr<const TensorBasis> tb_;
    std::vector<double> coeffs_;
    std::uint64_t seed_;
};

/// Raised when no member of the finite span reaches the requested delta.
class InfeasibleTarget : public std::runtime_error {
public:
    InfeasibleTarget(double requested, double minimum);
    double requested() const { return requested_; }
    double minimum() const { return minimum_; }

private:
    double requested_;
    double minimum_;
};

// min(2N, tb.size()).
std::size_t default_M(const TensorBasis& tb);

// Smallest delta_f attainable in the span: 1 - lambda_0.
double min_achievable_delta(const TensorBasis& tb);

/// Random member of B(R, delta_target) inside the M-span.
///
/// Head coefficients (j < N) and tail coefficients (N <= j < M) are standard
/// normal. The head's components orthogonal to phi_0 are shrunk until the
/// head alone has delta at the midpoint between the attainable minimum and
/// the target (no shrink if already below). The tail is then scaled by the
/// largest factor keeping delta_f <= delta_target, or left as drawn when any
/// factor would do.
BandlimitedFunction synth_random(std::shared_ptr<const TensorBasis> tb, std::size_t M, double delta_target,
                                 std::uint64_t seed);

double evaluate(const BandlimitedFunction& f, std::span<const double> x);

BandlimitedFunction project_E(const BandlimitedFunction& f);
BandlimitedFunction project_F(const BandlimitedFunction& f);

struct QestimReport {
    double delta = 0.0;
    double alpha = 0.0;
    bool vacuous = false; // delta >= 1 - alpha
    double norm_sq = 0.0;
    double E_norm_sq = 0.0;       // ||Ef||^2
    double E_norm_sq_lower = 0.0; // (1 - delta/(1-alpha)) ||f||^2
    double E_local_sq = 0.0;      // ||Ef||_{2,R}^2
    double E_local_sq_lower = 0.0;
    double F_norm_sq = 0.0; // ||Ff||^2
    double F_norm_sq_upper = 0.0;
    bool E_norm_ok = false;
    bool E_local_ok = false;
    bool F_norm_ok = false;
    bool all_ok() const { return E_norm_ok && E_local_ok && F_norm_ok; }
};

// Projection bounds at delta = delta_f, alpha = lambda_N.
QestimReport qestim_check(const BandlimitedFunction& f);

// prod_i sinc(x_i - y_i), sinc(t) = sin(pi t)/(pi t).
double sinc_kernel(std::span<const double> x, std::span<const double> y);

// "#function,R=..,d=..,N=..,M=..,seed=.." then "j,c_j" rows.
void write_function_csv(std::ostream& os, const BandlimitedFunction& f);
// Throws ParseError; the header must match tb's R, d and N.
BandlimitedFunction read_function_csv(std::istream& is, std::shared_ptr<const TensorBasis> tb);

} // namespace relsamp

#endif
