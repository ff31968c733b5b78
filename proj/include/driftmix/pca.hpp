#pragma once

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftmix/log.hpp"
#include "driftmix/types.hpp"

namespace driftmix {

/// Batch-fitted linear projection to a lower dimension. Immutable after
/// fitting; transform calls are safe concurrently.
struct PcaModel {
  std::vector<double> mean;                     // length d_in
  std::vector<std::vector<double>> components;  // d_out rows, each length d_in, orthonormal
  std::vector<double> explained_variance;       // length d_out, non-increasing

  std::size_t input_dimension() const { return mean.size(); }
  std::size_t output_dimension() const { return components.size(); }
};

/// Fits the top principal directions of the sample covariance (1/(n-1)
/// estimator) via eigendecomposition. Each component's largest-magnitude
/// entry is flipped positive so fits are reproducible across eigensolvers.
/// Directions with (numerically) zero variance are kept as orthonormal
/// padding from the complement, with explained variance clamped to zero.
inline PcaModel pca_fit(const std::vector<std::vector<double>>& samples, std::size_t d_out) {
  if (samples.size() < d_out) {
    throw std::invalid_argument("pca_fit: need at least " + std::to_string(d_out) +
                                " samples, got " + std::to_string(samples.size()));
  }
  const std::size_t n = samples.size();
  const std::size_t d_in = samples.front().size();
  if (d_in < d_out) {
    throw std::invalid_argument("pca_fit: output dimension " + std::to_string(d_out) +
                                " exceeds input dimension " + std::to_string(d_in));
  }
  for (const auto& row : samples) {
    if (row.size() != d_in) throw std::invalid_argument("pca_fit: ragged sample matrix");
  }

  Eigen::MatrixXd x(static_cast<Eigen::Index>(n), static_cast<Eigen::Index>(d_in));
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < d_in; ++j)
      x(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = samples[i][j];

  const Eigen::RowVectorXd mean = x.colwise().mean();
  x.rowwise() -= mean;
  const Eigen::MatrixXd cov = (x.transpose() * x) / static_cast<double>(n - 1);

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(cov);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("pca_fit: eigendecomposition failed");
  }
  // eigenvalues come out ascending; take the top d_out in descending order
  const Eigen::VectorXd evals = solver.eigenvalues();
  const Eigen::MatrixXd evecs = solver.eigenvectors();

  PcaModel model;
  model.mean.assign(mean.data(), mean.data() + d_in);
  model.components.resize(d_out);
  model.explained_variance.resize(d_out);

  const double rank_tol = std::max(evals.cwiseAbs().maxCoeff(), 1.0) * 1e-12;
  std::size_t degenerate = 0;
  for (std::size_t k = 0; k < d_out; ++k) {
    const Eigen::Index col = static_cast<Eigen::Index>(d_in - 1 - k);
    Eigen::VectorXd v = evecs.col(col);
    Eigen::Index max_idx = 0;
    v.cwiseAbs().maxCoeff(&max_idx);
    if (v(max_idx) < 0.0) v = -v;

    model.components[k].assign(v.data(), v.data() + d_in);
    const double ev = evals(col);
    model.explained_variance[k] = std::max(ev, 0.0);
    if (ev < rank_tol) {
      model.explained_variance[k] = 0.0;
      ++degenerate;
    }
  }
  if (degenerate > 0) {
    log_info("pca_fit: data is rank-deficient; " + std::to_string(degenerate) +
             " component(s) padded from the orthogonal complement with zero variance");
  }
  return model;
}

/// Projects a raw descriptor: d = components * (f - mean).
inline FeatureVector pca_transform(const PcaModel& model, const std::vector<double>& f) {
  if (f.size() != model.input_dimension()) {
    throw std::invalid_argument("pca_transform: input length " + std::to_string(f.size()) +
                                ", expected " + std::to_string(model.input_dimension()));
  }
  FeatureVector out(model.output_dimension(), 0.0);
  for (std::size_t k = 0; k < model.components.size(); ++k) {
    double acc = 0.0;
    const auto& row = model.components[k];
    for (std::size_t j = 0; j < row.size(); ++j) acc += row[j] * (f[j] - model.mean[j]);
    out[k] = acc;
  }
  return out;
}

}  // namespace driftmix
