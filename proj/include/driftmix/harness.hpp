#pragma once

#include <algorithm>
#include <functional>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "driftmix/engine.hpp"
#include "driftmix/stream.hpp"

namespace driftmix {

/// One plottable series. `config_tag` keys the output file name; the
/// primary series of a protocol is written as `<protocol>_<tag>.csv`,
/// auxiliary ones get the series name appended.
struct MetricSeries {
  std::string name;
  std::string config_tag;
  bool primary = false;
  std::vector<double> steps;
  std::vector<double> values;
};

struct ExperimentReport {
  std::string protocol;
  std::vector<MetricSeries> series;
  std::map<std::string, double> summary;
  std::map<std::string, std::string> config_echo;  // config name -> canonical text
};

using ModelFactory = std::function<Model()>;

inline std::vector<FeatureVector> features_of(const std::vector<StreamSample>& samples) {
  std::vector<FeatureVector> out;
  out.reserve(samples.size());
  for (const StreamSample& s : samples) out.push_back(s.features);
  return out;
}

/// Per-dimension 4x sample variance (1/(n-1)); the usual way to derive the
/// initial variance Z from the first training part.
inline std::vector<double> z_from_samples(const std::vector<FeatureVector>& samples) {
  if (samples.size() < 2) {
    throw std::invalid_argument("z_from_samples: need at least 2 samples");
  }
  const std::size_t dim = samples.front().size();
  std::vector<double> mean(dim, 0.0);
  for (const auto& s : samples)
    for (std::size_t j = 0; j < dim; ++j) mean[j] += s[j];
  for (double& m : mean) m /= static_cast<double>(samples.size());
  std::vector<double> var(dim, 0.0);
  for (const auto& s : samples)
    for (std::size_t j = 0; j < dim; ++j) {
      const double d = s[j] - mean[j];
      var[j] += d * d;
    }
  for (double& v : var) v = 4.0 * v / static_cast<double>(samples.size() - 1);
  return var;
}

/// Intra-class drift protocol: for each split s, train a fresh adaptive
/// model on parts 1..s, then feed the test part (adaptation stays on)
/// counting samples classified normal. Accuracy is each split's normal
/// count over the maximum count across splits, so the best split scores
/// exactly 1.
inline ExperimentReport run_intra_class(const std::vector<std::vector<FeatureVector>>& parts,
                                        std::size_t test_part, const ModelFactory& factory) {
  if (parts.size() < 2 || test_part >= parts.size() || test_part < 1) {
    throw std::invalid_argument("run_intra_class: need training parts before the test part");
  }
  const std::size_t n_splits = test_part;  // splits 1..test_part

  std::vector<double> counts;
  for (std::size_t s = 1; s <= n_splits; ++s) {
    Model model = factory();
    for (std::size_t p = 0; p < s; ++p) {
      for (const FeatureVector& x : parts[p]) model.process(x);
    }
    double normal_count = 0.0;
    for (const FeatureVector& x : parts[test_part]) {
      if (model.process(x).label == Label::normal) normal_count += 1.0;
    }
    counts.push_back(normal_count);
  }

  const double max_count = *std::max_element(counts.begin(), counts.end());
  ExperimentReport report;
  report.protocol = "intra";
  MetricSeries acc{"accuracy", "", true, {}, {}};
  MetricSeries raw{"normal_count", "", false, {}, {}};
  for (std::size_t s = 0; s < counts.size(); ++s) {
    acc.steps.push_back(static_cast<double>(s + 1));
    acc.values.push_back(max_count > 0.0 ? counts[s] / max_count : 0.0);
    raw.steps.push_back(static_cast<double>(s + 1));
    raw.values.push_back(counts[s]);
  }
  const double min_acc = *std::min_element(acc.values.begin(), acc.values.end());
  report.summary["max_normal_count"] = max_count;
  report.summary["accuracy_spread"] = 1.0 - min_acc;
  report.series.push_back(std::move(acc));
  report.series.push_back(std::move(raw));
  return report;
}

/// Inter-class drift protocol: train on one part, feed every anomaly once,
/// then repeat the last two anomalies (a1, a2) one by one. The score trace
/// of the repeats shows the abnormal-to-normal transition.
inline ExperimentReport run_inter_class(const std::vector<FeatureVector>& train_part,
                                        const std::vector<FeatureVector>& anomalies,
                                        std::size_t repeats, const ModelConfig& config) {
  if (anomalies.size() < 2) {
    throw std::invalid_argument("run_inter_class: need at least 2 anomaly samples");
  }
  Model model(config);
  for (const FeatureVector& x : train_part) model.process(x);

  ExperimentReport report;
  report.protocol = "inter";
  MetricSeries trace{"omega", "", true, {}, {}};
  double step = 0.0;
  auto record = [&](const ScoredSample& s) {
    trace.steps.push_back(++step);
    trace.values.push_back(s.score);
    return s.score;
  };

  std::vector<double> first_scores;
  for (const FeatureVector& x : anomalies) first_scores.push_back(record(model.process(x)));

  const FeatureVector& a1 = anomalies[anomalies.size() - 2];
  const FeatureVector& a2 = anomalies[anomalies.size() - 1];
  MetricSeries a1_series{"a1_repeats", "", false, {}, {}};
  MetricSeries a2_series{"a2_repeats", "", false, {}, {}};
  for (std::size_t r = 0; r < repeats; ++r) {
    a1_series.steps.push_back(static_cast<double>(r + 1));
    a1_series.values.push_back(record(model.process(a1)));
  }
  for (std::size_t r = 0; r < repeats; ++r) {
    a2_series.steps.push_back(static_cast<double>(r + 1));
    a2_series.values.push_back(record(model.process(a2)));
  }

  report.summary["a1_first_omega"] = first_scores[first_scores.size() - 2];
  report.summary["a2_first_omega"] = first_scores[first_scores.size() - 1];
  report.summary["a1_final_omega"] = a1_series.values.back();
  report.summary["a2_final_omega"] = a2_series.values.back();
  report.summary["final_mode_count"] = static_cast<double>(model.mixture().modes.size());
  report.summary["merge_events"] = static_cast<double>(model.merge_count());
  report.config_echo["model"] = serialize_config(config);
  report.series.push_back(std::move(trace));
  report.series.push_back(std::move(a1_series));
  report.series.push_back(std::move(a2_series));
  return report;
}

/// Retention protocol: train, feed all anomalies once, repeat a1..a4
/// (optionally a5) forty times each, then bring a1 back. Whether a1's
/// re-entry is still a hit separates capped models from the unconstrained
/// one. Runs once per named config.
inline ExperimentReport run_retention(
    const std::vector<FeatureVector>& train_part, const std::vector<FeatureVector>& anomalies,
    std::size_t repeats, const std::vector<std::pair<std::string, ModelConfig>>& configs,
    std::size_t n_repeated = 4) {
  if (anomalies.size() < 4) {
    throw std::invalid_argument("run_retention: need at least 4 anomaly identities");
  }
  if (n_repeated < 1 || n_repeated > anomalies.size()) {
    throw std::invalid_argument("run_retention: n_repeated out of range");
  }

  ExperimentReport report;
  report.protocol = "retention";
  for (const auto& [name, config] : configs) {
    Model model(config);
    for (const FeatureVector& x : train_part) model.process(x);

    MetricSeries trace{"omega", config_hash(config), true, {}, {}};
    double step = 0.0;
    auto record = [&](const ScoredSample& s) {
      trace.steps.push_back(++step);
      trace.values.push_back(s.score);
      return s;
    };

    for (const FeatureVector& x : anomalies) record(model.process(x));
    for (std::size_t k = 0; k < n_repeated; ++k) {
      for (std::size_t r = 0; r < repeats; ++r) record(model.process(anomalies[k]));
    }
    ScoredSample reentry = record(model.process(anomalies[0]));
    for (std::size_t r = 1; r < repeats; ++r) record(model.process(anomalies[0]));

    report.summary[name + "_reentry_omega"] = reentry.score;
    report.summary[name + "_reentry_hit"] = reentry.was_hit ? 1.0 : 0.0;
    report.summary[name + "_final_mode_count"] =
        static_cast<double>(model.mixture().modes.size());
    report.config_echo[name] = serialize_config(config);
    report.series.push_back(std::move(trace));
  }
  return report;
}

/// Memory-tracking protocol: feed a stream through an unconstrained model
/// and record the mode count after every sample, plus the merge log.
inline ExperimentReport run_memory_tracking(const std::vector<FeatureVector>& stream,
                                            const ModelConfig& config,
                                            std::vector<MergeEvent>* merge_log = nullptr) {
  if (config.capacity) {
    throw std::invalid_argument("run_memory_tracking: requires an unconstrained config");
  }
  Model model(config);
  ExperimentReport report;
  report.protocol = "memory";
  MetricSeries counts{"mode_count", "", true, {}, {}};
  std::vector<MergeEvent> events;
  double step = 0.0;
  for (const FeatureVector& x : stream) {
    const ScoredSample s = model.process(x, &events);
    counts.steps.push_back(++step);
    counts.values.push_back(static_cast<double>(s.mode_count_after));
  }
  report.summary["final_mode_count"] = counts.values.empty() ? 0.0 : counts.values.back();
  report.summary["merge_events"] = static_cast<double>(events.size());
  report.config_echo["model"] = serialize_config(config);
  report.series.push_back(std::move(counts));
  if (merge_log) *merge_log = std::move(events);
  return report;
}

}  // namespace driftmix
