#include "relsamp/prolate.hpp"

#include "relsamp/csv.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <stdexcept>
#include <string>

namespace relsamp {

namespace {

constexpr double kPi = std::numbers::pi;

// Number of equispaced points on C_R used to pick each mode's phase.
constexpr int kPhaseGrid = 65;

} // namespace

int min_quadrature_order(double R) { return static_cast<int>(std::ceil(4.0 * R)) + 30; }

Eigen::MatrixXd kernel_matrix(double R, const QuadratureRule& quad) {
    if (!(R > 0.0)) throw std::invalid_argument("kernel_matrix: R must be positive");
    const int n = quad.order;
    Eigen::MatrixXd M(n, n);
    for (int i = 0; i < n; ++i) {
        M(i, i) = quad.weights[i] * R;
        for (int j = 0; j < i; ++j) {
            const double diff = quad.nodes[i] - quad.nodes[j];
            const double k = std::sin(kPi * R * diff) / (kPi * diff);
            const double v = std::sqrt(quad.weights[i] * quad.weights[j]) * k;
            M(i, j) = v;
            M(j, i) = v;
        }
    }
    return M;
}

SymmetricEigen sym_eig(const Eigen::MatrixXd& M) {
    const Eigen::Index n = M.rows();
    if (M.cols() != n) throw std::invalid_argument("sym_eig: matrix is not square");
    const double norm = M.norm();
    for (Eigen::Index i = 0; i < n; ++i)
        for (Eigen::Index j = 0; j < i; ++j)
            if (std::abs(M(i, j) - M(j, i)) > 1e-12 * std::max(1.0, norm))
                throw std::invalid_argument("sym_eig: matrix is not symmetric");

    Eigen::MatrixXd A = 0.5 * (M + M.transpose());
    Eigen::MatrixXd V = Eigen::MatrixXd::Identity(n, n);
    const double tol = 1e-12 * norm;

    auto off_norm = [&] {
        double s = 0.0;
        for (Eigen::Index i = 0; i < n; ++i)
            for (Eigen::Index j = 0; j < i; ++j) s += 2.0 * A(i, j) * A(i, j);
        return std::sqrt(s);
    };

    for (int sweep = 0; sweep < 100 && off_norm() > tol; ++sweep) {
        for (Eigen::Index p = 0; p < n - 1; ++p) {
            for (Eigen::Index q = p + 1; q < n; ++q) {
                const double apq = A(p, q);
                if (apq == 0.0) continue;
                // Rotation zeroing A(p,q) (Golub & Van Loan, sym.schur2).
                const double tau = (A(q, q) - A(p, p)) / (2.0 * apq);
                const double t = (tau >= 0.0 ? 1.0 : -1.0) / (std::abs(tau) + std::sqrt(1.0 + tau * tau));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = t * c;
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double akp = A(k, p);
                    const double akq = A(k, q);
                    A(k, p) = c * akp - s * akq;
                    A(k, q) = s * akp + c * akq;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double apk = A(p, k);
                    const double aqk = A(q, k);
                    A(p, k) = c * apk - s * aqk;
                    A(q, k) = s * apk + c * aqk;
                }
                for (Eigen::Index k = 0; k < n; ++k) {
                    const double vkp = V(k, p);
                    const double vkq = V(k, q);
                    V(k, p) = c * vkp - s * vkq;
                    V(k, q) = s * vkp + c * vkq;
                }
            }
        }
    }

    std::vector<Eigen::Index> order(n);
    std::iota(order.begin(), order.end(), Eigen::Index{0});
    std::stable_sort(order.begin(), order.end(),
                     [&](Eigen::Index a, Eigen::Index b) { return A(a, a) > A(b, b); });

    SymmetricEigen out;
    out.values.resize(n);
    out.vectors.resize(n, n);
    for (Eigen::Index k = 0; k < n; ++k) {
        out.values(k) = A(order[k], order[k]);
        Eigen::VectorXd v = V.col(order[k]);
        Eigen::Index imax = 0;
        v.cwiseAbs().maxCoeff(&imax);
        if (v(imax) < 0.0) v = -v;
        out.vectors.col(k) = v;
    }
    return out;
}

ProlateBasis1D::ProlateBasis1D(double R, QuadratureRule quad, const SymmetricEigen& eig)
    : R_(R), quad_(std::move(quad)) {
    const Eigen::Index n = eig.values.size();
    spectrum_.assign(eig.values.data(), eig.values.data() + n);
    Eigen::Index kept = 0;
    while (kept < n && eig.values(kept) >= kEigenvalueFloor) ++kept;
    mu_.assign(spectrum_.begin(), spectrum_.begin() + kept);
    eigvecs_ = eig.vectors.leftCols(kept);

    scaled_.resize(n, kept);
    for (Eigen::Index i = 0; i < n; ++i) scaled_.row(i) = std::sqrt(quad_.weights[i]) * eigvecs_.row(i);

    phase_.assign(kept, {1.0, 0.0});
    for (Eigen::Index k = 0; k < kept; ++k) {
        std::complex<double> best{0.0, 0.0};
        for (int g = 0; g < kPhaseGrid; ++g) {
            const double x = -0.5 * R_ + R_ * g / (kPhaseGrid - 1);
            const auto z = eval_complex(static_cast<std::size_t>(k), x);
            if (std::abs(z) > std::abs(best)) best = z;
        }
        if (std::abs(best) > 0.0) phase_[k] = best / std::abs(best);
    }
}

std::complex<double> ProlateBasis1D::eval_complex(std::size_t k, double x) const {
    std::complex<double> z{0.0, 0.0};
    for (int i = 0; i < quad_.order; ++i) {
        const double arg = 2.0 * kPi * x * quad_.nodes[i];
        z += scaled_(i, static_cast<Eigen::Index>(k)) * std::complex<double>(std::cos(arg), std::sin(arg));
    }
    return z;
}

double ProlateBasis1D::eval(std::size_t k, double x) const {
    return (std::conj(phase_[k]) * eval_complex(k, x)).real();
}

void ProlateBasis1D::eval_all(double x, std::size_t count, std::span<double> out) const {
    const int n = quad_.order;
    Eigen::VectorXd c(n), s(n);
    for (int i = 0; i < n; ++i) {
        const double arg = 2.0 * kPi * x * quad_.nodes[i];
        c(i) = std::cos(arg);
        s(i) = std::sin(arg);
    }
    const auto cols = static_cast<Eigen::Index>(count);
    const Eigen::VectorXd re = scaled_.leftCols(cols).transpose() * c;
    const Eigen::VectorXd im = scaled_.leftCols(cols).transpose() * s;
    // Re(conj(p) z) = Re(p) Re(z) + Im(p) Im(z).
    for (std::size_t k = 0; k < count; ++k) {
        const auto kk = static_cast<Eigen::Index>(k);
        out[k] = phase_[k].real() * re(kk) + phase_[k].imag() * im(kk);
    }
}

ProlateBasis1D build_basis_1d(double R, int order) {
    if (!(R >= 1.0)) throw std::invalid_argument("build_basis_1d: R must be >= 1");
    const int need = min_quadrature_order(R);
    if (order < need) {
        throw std::invalid_argument("build_basis_1d: quadrature order " + std::to_string(order) +
                                    " below required minimum " + std::to_string(need));
    }
    auto quad = gauss_legendre(order);
    const auto eig = sym_eig(kernel_matrix(R, quad));
    return ProlateBasis1D(R, std::move(quad), eig);
}

double eval_phi_1d(const ProlateBasis1D& basis, std::size_t k, double x) {
    if (k >= basis.count()) {
        throw std::invalid_argument("eval_phi_1d: index " + std::to_string(k) + " out of range (count " +
                                    std::to_string(basis.count()) + ")");
    }
    return basis.eval(k, x);
}

double TensorBasis::volume() const { return std::pow(R(), dim); }

std::shared_ptr<const TensorBasis> tensor_basis(std::shared_ptr<const ProlateBasis1D> base, int d,
                                                std::size_t N) {
    if (!base) throw std::invalid_argument("tensor_basis: null base");
    if (d < 1) throw std::invalid_argument("tensor_basis: dimension must be >= 1");
    const auto& mu = base->mu();

    struct Entry {
        double value;
        std::vector<int> idx;
    };
    std::vector<Entry> entries;
    std::vector<int> idx(d, 0);

    // Products only shrink as factors are added (mu < 1), so prune on the partial product.
    auto recurse = [&](auto&& self, int depth, double partial) -> void {
        if (depth == d) {
            entries.push_back({partial, idx});
            return;
        }
        for (std::size_t k = 0; k < mu.size(); ++k) {
            const double p = partial * mu[k];
            if (p < kEigenvalueFloor) break;
            idx[depth] = static_cast<int>(k);
            self(self, depth + 1, p);
        }
    };
    recurse(recurse, 0, 1.0);

    if (entries.size() < N || N == 0) {
        throw std::invalid_argument("tensor_basis: requested N=" + std::to_string(N) + " but only " +
                                    std::to_string(entries.size()) +
                                    " product eigenvalues lie above the floor");
    }
    std::sort(entries.begin(), entries.end(), [](const Entry& a, const Entry& b) {
        if (a.value != b.value) return a.value > b.value;
        return a.idx < b.idx;
    });

    auto tb = std::make_shared<TensorBasis>();
    tb->dim = d;
    tb->base = std::move(base);
    tb->N = N;
    tb->lambda.reserve(entries.size());
    tb->multi_indices.reserve(entries.size());
    for (auto& e : entries) {
        tb->lambda.push_back(e.value);
        tb->multi_indices.push_back(std::move(e.idx));
    }
    tb->alpha = tb->lambda[N - 1];
    return tb;
}

double eval_phi_d(const TensorBasis& tb, std::size_t j, std::span<const double> x) {
    if (j >= tb.size()) {
        throw std::invalid_argument("eval_phi_d: index " + std::to_string(j) + " out of range (size " +
                                    std::to_string(tb.size()) + ")");
    }
    double v = 1.0;
    for (int i = 0; i < tb.dim; ++i) v *= tb.base->eval(static_cast<std::size_t>(tb.multi_indices[j][i]), x[i]);
    return v;
}

std::vector<double> eval_all_d(const TensorBasis& tb, std::span<const double> x, std::size_t count) {
    std::vector<double> out(count, 0.0);
    if (count == 0) return out;
    int max_idx = 0;
    for (std::size_t j = 0; j < count; ++j)
        for (int k : tb.multi_indices[j]) max_idx = std::max(max_idx, k);
    const std::size_t width = static_cast<std::size_t>(max_idx) + 1;

    std::vector<double> table(width * tb.dim);
    for (int i = 0; i < tb.dim; ++i)
        tb.base->eval_all(x[i], width, std::span<double>(table).subspan(i * width, width));

    for (std::size_t j = 0; j < count; ++j) {
        double v = 1.0;
        for (int i = 0; i < tb.dim; ++i) v *= table[i * width + tb.multi_indices[j][i]];
        out[j] = v;
    }
    return out;
}

double kernel_diag_m(const TensorBasis& tb, std::span<const double> x) {
    const auto phi = eval_all_d(tb, x, tb.N);
    double m = 0.0;
    for (double v : phi) m += v * v;
    return m;
}

void write_basis_csv(std::ostream& os, const ProlateBasis1D& basis) {
    os << "k,mu_k\n";
    for (std::size_t k = 0; k < basis.count(); ++k) os << k << ',' << fmt_double(basis.mu()[k]) << '\n';
}

void write_basis_csv(std::ostream& os, const TensorBasis& tb) {
    os << "j,lambda_j";
    for (int i = 1; i <= tb.dim; ++i) os << ",i_" << i;
    os << '\n';
    for (std::size_t j = 0; j < tb.N; ++j) {
        os << j << ',' << fmt_double(tb.lambda[j]);
        for (int k : tb.multi_indices[j]) os << ',' << k;
        os << '\n';
    }
}

} // namespace relsamp
