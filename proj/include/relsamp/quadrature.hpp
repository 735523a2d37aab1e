#ifndef RELSAMP_QUADRATURE_HPP
#define RELSAMP_QUADRATURE_HPP

#include <vector>

namespace relsamp {

/// Gauss-Legendre rule on the spectral interval [-1/2, 1/2].
struct QuadratureRule {
    int order = 0;
    std::vector<double> nodes;   // strictly increasing, symmetric about 0
    std::vector<double> weights; // positive, sum to 1
};

// Throws std::invalid_argument for order < 1.
QuadratureRule gauss_legendre(int order);

} // namespace relsamp

#endif
