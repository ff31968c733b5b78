#pragma once

#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "driftmix/config.hpp"
#include "driftmix/pca.hpp"
#include "driftmix/types.hpp"

namespace driftmix {

inline constexpr int kSnapshotVersion = 1;

struct SnapshotError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

namespace detail {

inline nlohmann::json config_to_json(const ModelConfig& cfg) {
  nlohmann::json j;
  j["dimension"] = cfg.dimension;
  j["alpha"] = cfg.alpha;
  j["theta_match"] = cfg.theta_match;
  j["w0"] = cfg.w0;
  j["z"] = cfg.z;
  j["g"] = cfg.g;
  j["theta_bhat"] = cfg.theta_bhat;
  if (cfg.capacity) {
    j["capacity"] = *cfg.capacity;
  } else {
    j["capacity"] = nullptr;
  }
  j["merge_enabled"] = cfg.merge_enabled;
  j["variance_floor"] = cfg.variance_floor;
  return j;
}

inline ModelConfig config_from_json(const nlohmann::json& j) {
  ModelConfig cfg;
  cfg.dimension = j.at("dimension").get<std::size_t>();
  cfg.alpha = j.at("alpha").get<double>();
  cfg.theta_match = j.at("theta_match").get<double>();
  cfg.w0 = j.at("w0").get<double>();
  cfg.z = j.at("z").get<std::vector<double>>();
  cfg.g = j.at("g").get<double>();
  cfg.theta_bhat = j.at("theta_bhat").get<double>();
  if (j.at("capacity").is_null()) {
    cfg.capacity.reset();
  } else {
    cfg.capacity = j.at("capacity").get<std::int64_t>();
  }
  cfg.merge_enabled = j.at("merge_enabled").get<bool>();
  cfg.variance_floor = j.at("variance_floor").get<double>();
  return cfg;
}

}  // namespace detail

/// Serializes config plus full mixture state. Numbers use the shortest
/// representation that round-trips exactly, so save -> load -> save is
/// byte-identical.
inline std::string model_snapshot_to_json(const ModelConfig& cfg, const Mixture& mix) {
  nlohmann::json j;
  j["version"] = kSnapshotVersion;
  j["config"] = detail::config_to_json(cfg);
  nlohmann::json modes = nlohmann::json::array();
  for (const Mode& m : mix.modes) {
    nlohmann::json jm;
    jm["id"] = m.id;
    jm["weight"] = m.weight;
    jm["mean"] = m.mean;
    jm["variance"] = m.variance;
    modes.push_back(std::move(jm));
  }
  j["modes"] = std::move(modes);
  j["next_id"] = mix.next_id;
  j["samples_seen"] = mix.samples_seen;
  return j.dump(2) + "\n";
}

inline std::pair<ModelConfig, Mixture> model_snapshot_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("snapshot is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kSnapshotVersion) {
      throw SnapshotError("unsupported snapshot version " + j.at("version").dump());
    }
    ModelConfig cfg = detail::config_from_json(j.at("config"));
    Mixture mix;
    for (const auto& jm : j.at("modes")) {
      Mode m;
      m.id = jm.at("id").get<std::int64_t>();
      m.weight = jm.at("weight").get<double>();
      m.mean = jm.at("mean").get<std::vector<double>>();
      m.variance = jm.at("variance").get<std::vector<double>>();
      mix.modes.push_back(std::move(m));
    }
    mix.next_id = j.at("next_id").get<std::int64_t>();
    mix.samples_seen = j.at("samples_seen").get<std::int64_t>();
    return {std::move(cfg), std::move(mix)};
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  }
}

inline void save_model_snapshot(const std::string& path, const ModelConfig& cfg,
                                const Mixture& mix) {
  detail::write_text_file(path, model_snapshot_to_json(cfg, mix));
}

inline std::pair<ModelConfig, Mixture> load_model_snapshot(const std::string& path) {
  return model_snapshot_from_json(detail::read_text_file(path));
}

inline std::string pca_snapshot_to_json(const PcaModel& model) {
  nlohmann::json j;
  j["version"] = kSnapshotVersion;
  j["mean"] = model.mean;
  j["components"] = model.components;  // row-major: one array per component
  j["explained_variance"] = model.explained_variance;
  return j.dump(2) + "\n";
}

inline PcaModel pca_snapshot_from_json(const std::string& text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("snapshot is not valid JSON: ") + e.what());
  }
  try {
    if (j.at("version").get<int>() != kSnapshotVersion) {
      throw SnapshotError("unsupported snapshot version " + j.at("version").dump());
    }
    PcaModel model;
    model.mean = j.at("mean").get<std::vector<double>>();
    model.components = j.at("components").get<std::vector<std::vector<double>>>();
    model.explained_variance = j.at("explained_variance").get<std::vector<double>>();
    return model;
  } catch (const nlohmann::json::exception& e) {
    throw SnapshotError(std::string("malformed snapshot: ") + e.what());
  }
}

inline void save_pca_snapshot(const std::string& path, const PcaModel& model) {
  detail::write_text_file(path, pca_snapshot_to_json(model));
}

inline PcaModel load_pca_snapshot(const std::string& path) {
  return pca_snapshot_from_json(detail::read_text_file(path));
}

}  // namespace driftmix
