#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftmix/config.hpp"
#include "driftmix/distance.hpp"
#include "driftmix/merge.hpp"
#include "driftmix/types.hpp"

namespace driftmix {

/// Outcome of matching one sample against the mixture. Both fields are
/// engaged on a hit (minimum distance below theta_match) and empty on a miss.
struct MatchResult {
  std::optional<std::size_t> mode_index;
  std::optional<double> distance;
  bool hit() const { return mode_index.has_value(); }
};

/// Returns the minimum-distance mode if that minimum is below theta_match,
/// otherwise a miss. Ties go to the lowest mode id.
inline MatchResult find_best_match(const Mixture& mix, const FeatureVector& x,
                                   double theta_match) {
  MatchResult result;
  double best = theta_match;
  for (std::size_t i = 0; i < mix.modes.size(); ++i) {
    const double d = mahalanobis_distance(x, mix.modes[i]);
    if (d < best) {
      best = d;
      result.mode_index = i;
      result.distance = d;
    }
  }
  return result;
}

/// Weight update: w <- (1-alpha) w + alpha M, where M is 1 for the hit mode
/// and 0 for every other mode. On a miss all existing modes decay.
inline void update_weights(Mixture& mix, std::optional<std::size_t> hit_index, double alpha) {
  if (hit_index && *hit_index >= mix.modes.size()) {
    throw std::out_of_range("update_weights: hit index out of range");
  }
  for (Mode& m : mix.modes) m.weight *= (1.0 - alpha);
  if (hit_index) mix.modes[*hit_index].weight += alpha;
}

/// Distribution update factor, inversely proportional to the match
/// distance: beta = (1 - dist/theta_match) * alpha, so beta lies in (0, alpha].
/// Callers must only invoke this on a hit (dist < theta_match).
inline double compute_beta(double dist, double theta_match, double alpha) {
  if (!(dist >= 0.0 && dist < theta_match)) {
    throw std::invalid_argument("compute_beta: distance " + std::to_string(dist) +
                                " is not a hit under theta_match " +
                                std::to_string(theta_match));
  }
  return (1.0 - dist / theta_match) * alpha;
}

/// Hit-mode parameter update. The mean moves first; the variance update
/// then uses the already-updated mean:
///   mu    <- (1-beta) mu + beta x
///   var_j <- (1-beta) var_j + beta (x_j - mu_j)^2
inline void update_hit_mode(Mode& m, const FeatureVector& x, double beta,
                            double variance_floor) {
  for (std::size_t j = 0; j < m.mean.size(); ++j) {
    m.mean[j] = (1.0 - beta) * m.mean[j] + beta * x[j];
  }
  for (std::size_t j = 0; j < m.variance.size(); ++j) {
    const double d = x[j] - m.mean[j];
    m.variance[j] = std::max((1.0 - beta) * m.variance[j] + beta * d * d, variance_floor);
  }
}

/// New mode centered on the sample, with the configured initial weight and
/// the high initial variance Z (scalar Z broadcasts to every dimension).
inline Mode create_mode(const FeatureVector& x, const ModelConfig& cfg, std::int64_t id) {
  Mode m;
  m.id = id;
  m.mean = x;
  m.weight = cfg.w0;
  m.variance.resize(cfg.dimension);
  for (std::size_t j = 0; j < cfg.dimension; ++j) {
    const double z = cfg.z.size() == 1 ? cfg.z[0] : cfg.z[j];
    m.variance[j] = std::max(z, cfg.variance_floor);
  }
  return m;
}

/// Capped-model deletion policy: while the mixture exceeds the capacity,
/// drop the smallest-weight mode (ties drop the oldest id). The mode
/// created in the current step, if any, is passed as protected_id: a new
/// mode replaces the weakest existing one and is never itself the victim.
inline void enforce_capacity(Mixture& mix, std::int64_t capacity,
                             std::int64_t protected_id = -1) {
  while (mix.modes.size() > static_cast<std::size_t>(capacity)) {
    std::size_t victim = mix.modes.size();
    double min_weight = 0.0;
    for (std::size_t i = 0; i < mix.modes.size(); ++i) {
      if (mix.modes[i].id == protected_id) continue;
      if (victim == mix.modes.size() || mix.modes[i].weight < min_weight) {
        victim = i;
        min_weight = mix.modes[i].weight;
      }
    }
    if (victim == mix.modes.size()) break;  // only the protected mode remains
    mix.modes.erase(mix.modes.begin() + static_cast<std::ptrdiff_t>(victim));
  }
}

inline double total_weight(const Mixture& mix) {
  double sum = 0.0;
  for (const Mode& m : mix.modes) sum += m.weight;
  return sum;
}

/// Rescales weights so they sum to 1.
inline void normalize_weights(Mixture& mix) {
  if (mix.modes.empty()) {
    throw std::domain_error("normalize_weights: empty mixture");
  }
  const double sum = total_weight(mix);
  if (!(sum > 0.0)) {
    throw std::domain_error("normalize_weights: total weight is not positive");
  }
  for (Mode& m : mix.modes) m.weight /= sum;
}

/// Anomaly score of the mode with the given id: 1 minus its (normalized)
/// weight. Rare modes score near 1, dominant modes near 0.
inline double anomaly_score(const Mixture& mix, std::int64_t matched_id) {
  for (const Mode& m : mix.modes) {
    if (m.id == matched_id) return 1.0 - m.weight;
  }
  throw std::invalid_argument("anomaly_score: unknown mode id " + std::to_string(matched_id));
}

/// Root-mean-square of the per-dimension standard deviations; the fitness
/// denominator used when ranking modes for the normal set.
inline double sigma_norm(const Mode& m) {
  double acc = 0.0;
  for (double v : m.variance) acc += v;
  return std::sqrt(acc / static_cast<double>(m.variance.size()));
}

/// Sorts modes by fitness weight/|sigma| descending and accumulates weight
/// from the top; every mode up to and including the one where the running
/// sum first reaches G is normal. Returns the normal ids in fitness order.
inline std::vector<std::int64_t> classify_modes(const Mixture& mix, double g) {
  std::vector<std::size_t> order(mix.modes.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::vector<double> fitness(mix.modes.size());
  for (std::size_t i = 0; i < mix.modes.size(); ++i) {
    fitness[i] = mix.modes[i].weight / sigma_norm(mix.modes[i]);
  }
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    if (fitness[a] != fitness[b]) return fitness[a] > fitness[b];
    return mix.modes[a].id < mix.modes[b].id;
  });

  std::vector<std::int64_t> normal;
  double cum = 0.0;
  for (std::size_t i : order) {
    normal.push_back(mix.modes[i].id);
    cum += mix.modes[i].weight;
    if (cum >= g) break;
  }
  return normal;
}

/// Single-writer adaptive model. process() mutates state and must be
/// externally serialized; distinct instances are independent.
class Model {
 public:
  explicit Model(ModelConfig cfg) : cfg_(std::move(cfg)) { validate_config(cfg_); }

  Model(ModelConfig cfg, Mixture state) : cfg_(std::move(cfg)), mix_(std::move(state)) {
    validate_config(cfg_);
  }

  /// One full adaptive step: match, weight update, hit update or mode
  /// creation, capacity enforcement (capped models), normalization, merge
  /// pass (merging models), scoring, and classification.
  ///
  /// A miss scores exactly 1: the score is 1 minus the weight the matched
  /// mode carried into this step, and a mode created this step carried none.
  /// A hit scores against the post-update normalized weight.
  ScoredSample process(const FeatureVector& x, std::vector<MergeEvent>* events_out = nullptr) {
    validate_feature(x, cfg_.dimension);

    const MatchResult match = find_best_match(mix_, x, cfg_.theta_match);
    update_weights(mix_, match.mode_index, cfg_.alpha);

    std::int64_t scored_id = 0;
    if (match.hit()) {
      const double beta = compute_beta(*match.distance, cfg_.theta_match, cfg_.alpha);
      Mode& hit = mix_.modes[*match.mode_index];
      update_hit_mode(hit, x, beta, cfg_.variance_floor);
      scored_id = hit.id;
    } else {
      Mode created = create_mode(x, cfg_, mix_.next_id++);
      scored_id = created.id;
      mix_.modes.push_back(std::move(created));
      if (cfg_.capacity) {
        enforce_capacity(mix_, *cfg_.capacity, scored_id);
      }
    }

    normalize_weights(mix_);

    if (cfg_.merge_enabled) {
      const std::vector<MergeEvent> events =
          merge_pass(mix_, cfg_.theta_bhat, cfg_.variance_floor, mix_.samples_seen + 1);
      if (!events.empty()) {
        for (const MergeEvent& e : events) {
          if (e.absorbed_a == scored_id || e.absorbed_b == scored_id) {
            scored_id = e.result_id;
          }
        }
        normalize_weights(mix_);
        merge_count_ += events.size();
        if (events_out) {
          events_out->insert(events_out->end(), events.begin(), events.end());
        }
      }
    }

    ScoredSample out;
    out.was_hit = match.hit();
    out.matched_mode_id = scored_id;
    out.score = match.hit() ? anomaly_score(mix_, scored_id) : 1.0;
    const std::vector<std::int64_t> normal = classify_modes(mix_, cfg_.g);
    out.label = std::find(normal.begin(), normal.end(), scored_id) != normal.end()
                    ? Label::normal
                    : Label::abnormal;
    mix_.samples_seen += 1;
    out.mode_count_after = mix_.modes.size();
    return out;
  }

  const Mixture& mixture() const { return mix_; }
  const ModelConfig& config() const { return cfg_; }
  std::size_t merge_count() const { return merge_count_; }

 private:
  ModelConfig cfg_;
  Mixture mix_;
  std::size_t merge_count_ = 0;
};

}  // namespace driftmix
