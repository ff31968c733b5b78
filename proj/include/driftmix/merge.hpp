#pragma once

#include <algorithm>
#include <stdexcept>
#include <vector>

#include "driftmix/distance.hpp"
#include "driftmix/types.hpp"

namespace driftmix {

/// Combines two modes into one. The mean is the weight-average of the
/// parent means, the variance mixes the parent variances with squared
/// weights, and the weight is the exact sum. The result gets a fresh id
/// so audit trails stay unambiguous.
inline Mode merge_modes(const Mode& a, const Mode& b, std::int64_t fresh_id,
                        double variance_floor) {
  if (a.mean.size() != b.mean.size()) {
    throw std::invalid_argument("merge_modes: dimension mismatch");
  }
  const double w = a.weight + b.weight;
  if (w == 0.0) throw std::invalid_argument("merge_modes: combined weight is zero");
  const double wa2 = a.weight * a.weight;
  const double wb2 = b.weight * b.weight;
  const double denom = wa2 + wb2;

  Mode out;
  out.id = fresh_id;
  out.weight = w;
  out.mean.resize(a.mean.size());
  out.variance.resize(a.mean.size());
  for (std::size_t j = 0; j < a.mean.size(); ++j) {
    out.mean[j] = (a.weight * a.mean[j] + b.weight * b.mean[j]) / w;
    out.variance[j] =
        std::max((wa2 * a.variance[j] + wb2 * b.variance[j]) / denom, variance_floor);
  }
  return out;
}

/// Iteratively merges the globally closest pair while its Bhattacharyya
/// distance is below theta_bhat. Ties pick the lowest-id pair, which makes
/// the outcome independent of storage order. Total weight is preserved;
/// the pass is idempotent because it only stops once every remaining pair
/// is at or above the threshold.
inline std::vector<MergeEvent> merge_pass(Mixture& mix, double theta_bhat,
                                          double variance_floor, std::int64_t step) {
  std::vector<MergeEvent> events;
  while (mix.modes.size() >= 2) {
    std::size_t best_i = 0, best_j = 0;
    std::int64_t best_lo = 0, best_hi = 0;
    double best = theta_bhat;
    bool found = false;
    for (std::size_t i = 0; i + 1 < mix.modes.size(); ++i) {
      for (std::size_t j = i + 1; j < mix.modes.size(); ++j) {
        const double d = bhattacharyya_distance(mix.modes[i], mix.modes[j]);
        const std::int64_t lo = std::min(mix.modes[i].id, mix.modes[j].id);
        const std::int64_t hi = std::max(mix.modes[i].id, mix.modes[j].id);
        const bool tie_wins =
            found && d == best && (lo < best_lo || (lo == best_lo && hi < best_hi));
        if (d < best || tie_wins) {
          best = d;
          best_i = i;
          best_j = j;
          best_lo = lo;
          best_hi = hi;
          found = true;
        }
      }
    }
    if (!found) break;

    Mode merged = merge_modes(mix.modes[best_i], mix.modes[best_j], mix.next_id++,
                              variance_floor);
    events.push_back(MergeEvent{best_lo, best_hi, merged.id, best, step});
    mix.modes.erase(mix.modes.begin() + static_cast<std::ptrdiff_t>(best_j));
    mix.modes.erase(mix.modes.begin() + static_cast<std::ptrdiff_t>(best_i));
    mix.modes.push_back(std::move(merged));
  }
  return events;
}

}  // namespace driftmix
