#pragma once

#include <vector>

namespace polylab {

/// Standard normal CDF.
double normal_cdf(double x);

/// Inverse standard normal CDF (Wichura's AS241, about 1e-16 relative accuracy).
/// Throws std::invalid_argument for p outside (0, 1).
double normal_quantile(double p);

/// Gauss-Hermite rule for the weight exp(-x^2 / 2), normalized so the weights
/// sum to one: sum_i w_i f(x_i) approximates E[f(G)] for G ~ N(0, 1).
struct QuadratureRule {
  std::vector<double> nodes;
  std::vector<double> weights;
};
QuadratureRule gauss_hermite_probabilists(int points);

}  // namespace polylab
