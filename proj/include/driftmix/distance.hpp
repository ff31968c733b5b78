#pragma once

#include <cmath>
#include <stdexcept>
#include <string>

#include "driftmix/types.hpp"

namespace driftmix {

/// Mahalanobis distance of a sample to a mode under the mode's diagonal
/// covariance: sqrt( sum_j (x_j - mu_j)^2 / var_j ). Root form, not squared.
inline double mahalanobis_distance(const FeatureVector& x, const Mode& m) {
  if (x.size() != m.mean.size() || x.size() != m.variance.size()) {
    throw std::invalid_argument("mahalanobis_distance: dimension mismatch (" +
                                std::to_string(x.size()) + " vs " +
                                std::to_string(m.mean.size()) + ")");
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < x.size(); ++j) {
    const double d = x[j] - m.mean[j];
    acc += d * d / m.variance[j];
  }
  return std::sqrt(acc);
}

/// Bhattacharyya distance between two diagonal Gaussians:
///   D_B = 1/8 (mu_a-mu_b)^T S^-1 (mu_a-mu_b) + 1/2 ln( det S / sqrt(det Sa det Sb) )
/// with S = (Sa+Sb)/2. The log-determinant ratio is accumulated per
/// dimension so large D cannot under/overflow a determinant product.
inline double bhattacharyya_distance(const Mode& a, const Mode& b) {
  if (a.mean.size() != b.mean.size()) {
    throw std::invalid_argument("bhattacharyya_distance: dimension mismatch (" +
                                std::to_string(a.mean.size()) + " vs " +
                                std::to_string(b.mean.size()) + ")");
  }
  double quad = 0.0;
  double logdet = 0.0;
  for (std::size_t j = 0; j < a.mean.size(); ++j) {
    const double vbar = 0.5 * (a.variance[j] + b.variance[j]);
    const double d = a.mean[j] - b.mean[j];
    quad += d * d / vbar;
    logdet += std::log(vbar) - 0.5 * (std::log(a.variance[j]) + std::log(b.variance[j]));
  }
  return 0.125 * quad + 0.5 * logdet;
}

}  // namespace driftmix
