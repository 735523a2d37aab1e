#include "relsamp/quadrature.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace relsamp {

namespace {

// P_n(x) and P_n'(x) by the three-term recurrence.
void legendre(int n, double x, double& p, double& dp) {
    double p0 = 1.0;
    double p1 = x;
    if (n == 0) {
        p = 1.0;
        dp = 0.0;
        return;
    }
    for (int k = 2; k <= n; ++k) {
        const double pk = ((2 * k - 1) * x * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = pk;
    }
    p = p1;
    dp = n * (x * p1 - p0) / (x * x - 1.0);
}

} // namespace

QuadratureRule gauss_legendre(int order) {
    if (order < 1) {
        throw std::invalid_argument("gauss_legendre: order must be >= 1, got " + std::to_string(order));
    }
    QuadratureRule rule;
    rule.order = order;
    rule.nodes.assign(order, 0.0);
    rule.weights.assign(order, 0.0);

    // Roots on [-1,1] come in +/- pairs; solve for the positive half and mirror.
    const int half = (order + 1) / 2;
    for (int i = 0; i < half; ++i) {
        double x = std::cos(std::numbers::pi * (i + 0.75) / (order + 0.5));
        double p = 0.0;
        double dp = 0.0;
        for (int iter = 0; iter < 100; ++iter) {
            legendre(order, x, p, dp);
            const double dx = p / dp;
            x -= dx;
            if (std::abs(dx) < 1e-14) break;
        }
        legendre(order, x, p, dp);
        const double w = 2.0 / ((1.0 - x * x) * dp * dp);
        // Map [-1,1] -> [-1/2,1/2]: nodes halve, weights halve.
        const int hi = order - 1 - i;
        rule.nodes[hi] = 0.5 * x;
        rule.nodes[i] = -0.5 * x;
        rule.weights[hi] = 0.5 * w;
        rule.weights[i] = 0.5 * w;
    }
    if (order % 2 == 1) rule.nodes[order / 2] = 0.0;
    return rule;
}

} // namespace relsamp
