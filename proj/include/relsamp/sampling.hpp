#ifndef RELSAMP_SAMPLING_HPP
#define RELSAMP_SAMPLING_HPP

#include <cstdint>
#include <iosfwd>
#include <memory>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "relsamp/blfunc.hpp"
#include "relsamp/prolate.hpp"

namespace relsamp {

/// r points in C_R = [-R/2, R/2]^d, stored row-major.
struct SampleSet {
    double R = 0.0;
    int d = 0;
    std::vector<double> coords;
    std::uint64_t seed = 0;

    std::size_t size() const { return d > 0 ? coords.size() / static_cast<std::size_t>(d) : 0; }
    std::span<const double> point(std::size_t j) const {
        return std::span<const double>(coords).subspan(j * static_cast<std::size_t>(d), static_cast<std::size_t>(d));
    }
};

// Coordinates are R * (u - 1/2) with u from Rng::uniform01, drawn point by
// point, coordinate by coordinate. Throws std::invalid_argument if r == 0.
SampleSet draw_uniform(double R, int d, std::size_t r, std::uint64_t seed);

// T(k,l) = phi_k(x) phi_l(x) for k,l < tb.N.
Eigen::MatrixXd rank_one_T(const TensorBasis& tb, std::span<const double> x);

/// G = (1/r) sum_j T_j, the empirical frame matrix on P_N.
struct FrameMatrix {
    Eigen::MatrixXd G;
    std::size_t r = 0;
    std::shared_ptr<const TensorBasis> tb;
};

// Entries are accumulated with Neumaier compensated summation.
FrameMatrix frame_matrix(std::shared_ptr<const TensorBasis> tb, const SampleSet& samples);

// Smallest eigenvalue of G - R^{-d} diag(lambda_0..lambda_{N-1}).
double deviation_lambda_min(const FrameMatrix& fm);

// Smallest eigenvalue of G itself (so r * lambda_min(G) is the lower frame
// bound of the samples on P_N).
double frame_lambda_min(const FrameMatrix& fm);

// Max number of points in a half-open cube k + [-1/2, 1/2)^d, k integer.
std::size_t covering_index(const SampleSet& samples);

struct PlancherelPolyaReport {
    double lhs = 0.0; // sum_j f(x_j)^2
    double rhs = 0.0; // N0 e^{d pi} ||f||^2
    std::size_t N0 = 0;
    bool ok = false;
};

PlancherelPolyaReport pp_check(const BandlimitedFunction& f, const SampleSet& samples);

// "#samples,R=..,d=..,r=..,seed=.." then "x_1,..,x_d" and one row per point.
void write_samples_csv(std::ostream& os, const SampleSet& samples);
// Throws ParseError.
SampleSet read_samples_csv(std::istream& is, const std::string& source = "samples csv");

} // namespace relsamp

#endif
