#pragma once

#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <string>
#include <vector>

namespace driftmix {

/// Reduced feature vector fed to the model; length must equal the
/// configured dimension and every entry must be finite.
using FeatureVector = std::vector<double>;

enum class Label { normal, abnormal };

inline const char* to_string(Label l) {
  return l == Label::normal ? "normal" : "abnormal";
}

/// One Gaussian component with diagonal covariance.
struct Mode {
  std::int64_t id = 0;
  std::vector<double> mean;
  std::vector<double> variance;  // per-dimension, each >= variance_floor
  double weight = 0.0;           // in [0,1] once normalized
};

/// The entire model state: an ordered set of modes plus bookkeeping.
/// Mode ids are assigned monotonically and never reused, so the modes
/// vector stays sorted by id (creations and merge results always get
/// the largest id so far).
struct Mixture {
  std::vector<Mode> modes;
  std::int64_t next_id = 0;
  std::int64_t samples_seen = 0;
};

/// Per-sample output of the adaptive step.
struct ScoredSample {
  double score = 0.0;                // anomaly score in [0,1]
  std::int64_t matched_mode_id = 0;  // matched mode, or the mode created this step
  bool was_hit = false;
  Label label = Label::abnormal;
  std::size_t mode_count_after = 0;
};

/// Record of one pairwise merge, kept as an audit trail.
struct MergeEvent {
  std::int64_t absorbed_a = 0;
  std::int64_t absorbed_b = 0;
  std::int64_t result_id = 0;
  double distance = 0.0;    // Bhattacharyya distance that triggered the merge
  std::int64_t step = 0;    // sample index (1-based) at merge time
};

inline void validate_feature(const FeatureVector& x, std::size_t dimension) {
  if (x.size() != dimension) {
    throw std::invalid_argument("feature vector has length " + std::to_string(x.size()) +
                                ", expected " + std::to_string(dimension));
  }
  for (double v : x) {
    if (!std::isfinite(v)) {
      throw std::invalid_argument("feature vector contains a non-finite value");
    }
  }
}

}  // namespace driftmix
