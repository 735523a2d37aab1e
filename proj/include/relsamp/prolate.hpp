#ifndef RELSAMP_PROLATE_HPP
#define RELSAMP_PROLATE_HPP

#include <complex>
#include <cstddef>
#include <iosfwd>
#include <memory>
#include <span>
#include <vector>

#include <Eigen/Dense>

#include "relsamp/quadrature.hpp"

namespace relsamp {

/// Eigenpairs below this value are treated as discretization noise.
inline constexpr double kEigenvalueFloor = 1e-12;

// Minimum Gauss-Legendre order for bandwidth R: ceil(4R) + 30.
int min_quadrature_order(double R);

/// Symmetrized Nystrom matrix of the 1-D time-frequency limiting kernel
/// sin(pi R (xi - eta)) / (pi (xi - eta)) on the rule's nodes:
/// M(i,j) = sqrt(w_i w_j) K(xi_i, xi_j), with M(i,i) = w_i R.
Eigen::MatrixXd kernel_matrix(double R, const QuadratureRule& quad);

struct SymmetricEigen {
    Eigen::VectorXd values;  // descending
    Eigen::MatrixXd vectors; // orthonormal columns, largest-|component| positive
};

// Cyclic Jacobi rotations until the off-diagonal Frobenius norm drops below
// 1e-12 * ||M||_F. Throws std::invalid_argument if M is not symmetric to 1e-12.
SymmetricEigen sym_eig(const Eigen::MatrixXd& M);

/// Discretized prolate spheroidal basis in one dimension.
///
/// Column k of `eigvecs` holds sqrt(w_i) * phihat_k(xi_i), so the
/// time-domain function is phi_k(x) = sum_i sqrt(w_i) eigvecs(i,k)
/// exp(2 pi i x xi_i), made real by a fixed per-mode phase. Evaluation is
/// accurate for |x| up to roughly order / 2.5 - R / 2.
class ProlateBasis1D {
public:
    ProlateBasis1D(double R, QuadratureRule quad, const SymmetricEigen& eig);

    double bandwidth() const { return R_; }
    const QuadratureRule& quadrature() const { return quad_; }
    std::size_t count() const { return mu_.size(); }
    const std::vector<double>& mu() const { return mu_; }
    // Every eigenvalue of the kernel matrix, including those under the floor.
    const std::vector<double>& spectrum() const { return spectrum_; }
    const Eigen::MatrixXd& eigvecs() const { return eigvecs_; }
    // Unit complex number e^{i theta_k}.
    std::complex<double> phase(std::size_t k) const { return phase_[k]; }

    double eval(std::size_t k, double x) const;

    // phi_0(x) .. phi_{count-1}(x); `count` must not exceed this->count().
    void eval_all(double x, std::size_t count, std::span<double> out) const;

    // Complex value before the phase fix.
    std::complex<double> eval_complex(std::size_t k, double x) const;

private:
    double R_;
    QuadratureRule quad_;
    std::vector<double> mu_;
    std::vector<double> spectrum_;
    Eigen::MatrixXd eigvecs_;
    Eigen::MatrixXd scaled_; // diag(sqrt w) * eigvecs
    std::vector<std::complex<double>> phase_;
};

// Throws std::invalid_argument if R < 1 or order < min_quadrature_order(R).
ProlateBasis1D build_basis_1d(double R, int order);

// Throws std::invalid_argument if k >= basis.count().
double eval_phi_1d(const ProlateBasis1D& basis, std::size_t k, double x);

/// d-fold tensor product of a 1-D basis. `lambda` lists every product
/// eigenvalue above the floor, sorted descending with lexicographic
/// tie-break on the multi-index; the first N span P_N and alpha = lambda[N-1].
struct TensorBasis {
    int dim = 0;
    std::shared_ptr<const ProlateBasis1D> base;
    std::vector<std::vector<int>> multi_indices;
    std::vector<double> lambda;
    std::size_t N = 0;
    double alpha = 0.0;

    double R() const { return base->bandwidth(); }
    std::size_t size() const { return lambda.size(); }
    // R^d, the volume of C_R.
    double volume() const;
};

// Throws std::invalid_argument if fewer than N products lie above the floor.
std::shared_ptr<const TensorBasis> tensor_basis(std::shared_ptr<const ProlateBasis1D> base, int d,
                                                std::size_t N);

// Throws std::invalid_argument if j >= tb.size().
double eval_phi_d(const TensorBasis& tb, std::size_t j, std::span<const double> x);

// phi_0(x) .. phi_{count-1}(x) for the first `count` tensor modes.
std::vector<double> eval_all_d(const TensorBasis& tb, std::span<const double> x, std::size_t count);

// m(x) = sum_{l < N} phi_l(x)^2.
double kernel_diag_m(const TensorBasis& tb, std::span<const double> x);

// CSV "k,mu_k" for every retained 1-D eigenvalue.
void write_basis_csv(std::ostream& os, const ProlateBasis1D& basis);
// CSV "j,lambda_j,i_1,..,i_d" for the first tb.N tensor modes.
void write_basis_csv(std::ostream& os, const TensorBasis& tb);

} // namespace relsamp

#endif
