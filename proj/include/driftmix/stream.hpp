#pragma once

#include <cmath>
#include <cstdint>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include "driftmix/config.hpp"
#include "driftmix/csv.hpp"
#include "driftmix/types.hpp"

namespace driftmix {

/// Parameters of the synthetic drift stream that stands in for a real
/// feature archive: a handful of normal identities whose means translate
/// linearly over time, plus far-away anomaly identities sprinkled in at a
/// fixed rate. Fully deterministic given the seed.
struct StreamSpec {
  std::size_t dimension = 20;
  std::size_t n_normal_identities = 1;
  std::size_t n_anomaly_identities = 5;
  std::size_t samples_per_part = 200;  // stream length is 6 parts of this many normals
  double drift_rate = 0.0;             // mean displacement magnitude per normal step
  double identity_spread = 1.0;        // within-identity standard deviation
  double anomaly_rate = 0.0;           // probability of an anomaly insertion per step
  std::uint64_t seed = 1;
};

struct StreamError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

inline const StreamSpec& validate_stream_spec(const StreamSpec& spec) {
  if (spec.dimension < 1) throw StreamError("field 'dimension': must be >= 1");
  if (spec.n_normal_identities < 1)
    throw StreamError("field 'n_normal_identities': must be >= 1");
  if (spec.samples_per_part < 1)
    throw StreamError("field 'samples_per_part': must be >= 1");
  if (!(spec.drift_rate >= 0.0)) throw StreamError("field 'drift_rate': must be >= 0");
  if (!(spec.identity_spread > 0.0))
    throw StreamError("field 'identity_spread': must be > 0");
  if (!(spec.anomaly_rate >= 0.0 && spec.anomaly_rate < 1.0))
    throw StreamError("field 'anomaly_rate': must lie in [0,1)");
  if (spec.anomaly_rate > 0.0 && spec.n_anomaly_identities == 0)
    throw StreamError("field 'n_anomaly_identities': must be >= 1 when anomaly_rate > 0");
  return spec;
}

inline StreamSpec stream_spec_from_kv(
    const std::vector<std::pair<std::string, std::string>>& entries) {
  StreamSpec spec;
  for (const auto& [key, value] : entries) {
    if (key == "dimension") {
      spec.dimension = static_cast<std::size_t>(detail::parse_int(value, key));
    } else if (key == "n_normal_identities") {
      spec.n_normal_identities = static_cast<std::size_t>(detail::parse_int(value, key));
    } else if (key == "n_anomaly_identities") {
      spec.n_anomaly_identities = static_cast<std::size_t>(detail::parse_int(value, key));
    } else if (key == "samples_per_part") {
      spec.samples_per_part = static_cast<std::size_t>(detail::parse_int(value, key));
    } else if (key == "drift_rate") {
      spec.drift_rate = detail::parse_double(value, key);
    } else if (key == "identity_spread") {
      spec.identity_spread = detail::parse_double(value, key);
    } else if (key == "anomaly_rate") {
      spec.anomaly_rate = detail::parse_double(value, key);
    } else if (key == "seed") {
      spec.seed = static_cast<std::uint64_t>(detail::parse_int(value, key));
    } else {
      throw StreamError("unknown stream spec key '" + key + "'");
    }
  }
  validate_stream_spec(spec);
  return spec;
}

inline StreamSpec load_stream_spec(const std::string& path) {
  return stream_spec_from_kv(detail::parse_kv_text(detail::read_text_file(path)));
}

inline std::string serialize_stream_spec(const StreamSpec& spec) {
  std::ostringstream out;
  out << "dimension = " << spec.dimension << '\n';
  out << "n_normal_identities = " << spec.n_normal_identities << '\n';
  out << "n_anomaly_identities = " << spec.n_anomaly_identities << '\n';
  out << "samples_per_part = " << spec.samples_per_part << '\n';
  out << "drift_rate = " << format_double(spec.drift_rate) << '\n';
  out << "identity_spread = " << format_double(spec.identity_spread) << '\n';
  out << "anomaly_rate = " << format_double(spec.anomaly_rate) << '\n';
  out << "seed = " << spec.seed << '\n';
  return out.str();
}

namespace detail {

inline std::vector<double> gauss_vector(std::mt19937_64& rng, std::size_t dim, double stddev) {
  std::normal_distribution<double> gauss(0.0, 1.0);
  std::vector<double> v(dim);
  for (double& x : v) x = stddev * gauss(rng);
  return v;
}

inline std::vector<double> random_direction(std::mt19937_64& rng, std::size_t dim) {
  std::vector<double> v = gauss_vector(rng, dim, 1.0);
  double norm = 0.0;
  for (double x : v) norm += x * x;
  norm = std::sqrt(norm);
  if (norm == 0.0) {
    v.assign(dim, 0.0);
    v[0] = 1.0;
    return v;
  }
  for (double& x : v) x /= norm;
  return v;
}

inline double euclid(const std::vector<double>& a, const std::vector<double>& b) {
  double acc = 0.0;
  for (std::size_t j = 0; j < a.size(); ++j) {
    const double d = a[j] - b[j];
    acc += d * d;
  }
  return std::sqrt(acc);
}

/// Identity geometry drawn before any emission so that streams and the
/// standalone anomaly representatives agree for the same spec.
/// Normal identities sit on a shell of radius 12*spread, anomalies on
/// 20*spread; every pair of identity centers keeps at least 12*spread of
/// separation (well beyond the 6*spread needed for guaranteed first-contact
/// misses at theta_match = 4.8), so a freshly created high-variance mode
/// never captures a neighboring identity.
struct StreamLayout {
  std::vector<std::vector<double>> normal_bases;
  std::vector<std::vector<double>> anomaly_bases;
  std::vector<std::vector<double>> drift_directions;
  std::vector<double> drift_speeds;  // per-identity factors, mean exactly 1
  std::vector<FeatureVector> anomaly_representatives;
  std::mt19937_64 rng;  // state after layout; emission continues from here
};

inline std::vector<double> place_base(std::mt19937_64& rng, std::size_t dim, double radius,
                                      const std::vector<std::vector<double>>& existing,
                                      double min_separation) {
  for (int attempt = 0; attempt < 10000; ++attempt) {
    std::vector<double> base = random_direction(rng, dim);
    for (double& x : base) x *= radius;
    bool ok = true;
    for (const auto& other : existing) {
      if (euclid(base, other) < min_separation) {
        ok = false;
        break;
      }
    }
    if (ok) return base;
  }
  throw StreamError("could not place identity centers with the required separation; "
                    "reduce the identity count or the spread");
}

inline StreamLayout make_layout(const StreamSpec& spec) {
  StreamLayout layout;
  layout.rng.seed(spec.seed);
  const double sep = 12.0 * spec.identity_spread;

  std::vector<std::vector<double>> all;
  for (std::size_t i = 0; i < spec.n_normal_identities; ++i) {
    auto base = place_base(layout.rng, spec.dimension, 12.0 * spec.identity_spread, all, sep);
    all.push_back(base);
    layout.normal_bases.push_back(std::move(base));
  }
  for (std::size_t i = 0; i < spec.n_anomaly_identities; ++i) {
    auto base = place_base(layout.rng, spec.dimension, 20.0 * spec.identity_spread, all, sep);
    all.push_back(base);
    layout.anomaly_bases.push_back(std::move(base));
  }
  for (std::size_t i = 0; i < spec.n_normal_identities; ++i) {
    layout.drift_directions.push_back(random_direction(layout.rng, spec.dimension));
  }
  // identities drift at different speeds; drift_rate is the mean
  // displacement magnitude, so the factor ladder averages to exactly 1
  const std::size_t m = spec.n_normal_identities;
  for (std::size_t i = 0; i < m; ++i) {
    const double f =
        m == 1 ? 1.0
               : 0.2 + 1.6 * static_cast<double>(i) / static_cast<double>(m - 1);
    layout.drift_speeds.push_back(f);
  }
  for (std::size_t i = 0; i < spec.n_anomaly_identities; ++i) {
    FeatureVector rep = layout.anomaly_bases[i];
    const auto noise = gauss_vector(layout.rng, spec.dimension, spec.identity_spread);
    for (std::size_t j = 0; j < rep.size(); ++j) rep[j] += noise[j];
    layout.anomaly_representatives.push_back(std::move(rep));
  }
  return layout;
}

}  // namespace detail

/// Emits 6*samples_per_part normal samples, drifting linearly per normal
/// step, with anomaly-identity samples interleaved at anomaly_rate. Every
/// sample carries its ground-truth identity, class, and part tag.
inline std::vector<StreamSample> generate_stream(const StreamSpec& spec) {
  validate_stream_spec(spec);
  detail::StreamLayout layout = detail::make_layout(spec);
  std::mt19937_64& rng = layout.rng;

  std::uniform_real_distribution<double> unit(0.0, 1.0);
  std::uniform_int_distribution<std::size_t> pick_normal(0, spec.n_normal_identities - 1);
  std::uniform_int_distribution<std::size_t> pick_anomaly(
      0, spec.n_anomaly_identities > 0 ? spec.n_anomaly_identities - 1 : 0);

  const std::size_t total_normal = 6 * spec.samples_per_part;
  std::vector<StreamSample> samples;
  samples.reserve(total_normal);

  std::size_t normal_emitted = 0;
  while (normal_emitted < total_normal) {
    const std::size_t part = normal_emitted / spec.samples_per_part + 1;
    const bool emit_anomaly = spec.anomaly_rate > 0.0 && unit(rng) < spec.anomaly_rate;
    StreamSample s;
    s.part = part;
    if (emit_anomaly) {
      const std::size_t k = pick_anomaly(rng);
      s.identity = "a" + std::to_string(k);
      s.label = Label::abnormal;
      s.features = layout.anomaly_bases[k];
    } else {
      const std::size_t j = pick_normal(rng);
      s.identity = "n" + std::to_string(j);
      s.label = Label::normal;
      s.features = layout.normal_bases[j];
      const double shift =
          spec.drift_rate * layout.drift_speeds[j] * static_cast<double>(normal_emitted);
      for (std::size_t d = 0; d < spec.dimension; ++d) {
        s.features[d] += shift * layout.drift_directions[j][d];
      }
      ++normal_emitted;
    }
    const auto noise = detail::gauss_vector(rng, spec.dimension, spec.identity_spread);
    for (std::size_t d = 0; d < spec.dimension; ++d) s.features[d] += noise[d];
    samples.push_back(std::move(s));
  }
  return samples;
}

/// One deterministic representative sample per anomaly identity; the
/// protocol drivers repeat these exact vectors.
inline std::vector<FeatureVector> anomaly_vectors(const StreamSpec& spec) {
  validate_stream_spec(spec);
  return detail::make_layout(spec).anomaly_representatives;
}

/// Splits a sequence into n_parts equal consecutive parts, dropping the
/// trailing remainder.
template <typename T>
std::vector<std::vector<T>> split_parts(const std::vector<T>& stream, std::size_t n_parts = 6) {
  if (n_parts < 1) throw StreamError("split_parts: n_parts must be >= 1");
  if (stream.size() < n_parts) {
    throw StreamError("split_parts: stream of length " + std::to_string(stream.size()) +
                      " is shorter than " + std::to_string(n_parts) + " parts");
  }
  const std::size_t part_len = stream.size() / n_parts;
  std::vector<std::vector<T>> parts(n_parts);
  for (std::size_t p = 0; p < n_parts; ++p) {
    parts[p].assign(stream.begin() + static_cast<std::ptrdiff_t>(p * part_len),
                    stream.begin() + static_cast<std::ptrdiff_t>((p + 1) * part_len));
  }
  return parts;
}

}  // namespace driftmix
