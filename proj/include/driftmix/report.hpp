#pragma once

#include <filesystem>
#include <string>

#include <json.hpp>

#include "driftmix/csv.hpp"
#include "driftmix/harness.hpp"

namespace driftmix {

inline std::string series_file_name(const ExperimentReport& report, const MetricSeries& s) {
  std::string name = report.protocol;
  if (!s.config_tag.empty()) name += "_" + s.config_tag;
  if (!s.primary) name += "_" + s.name;
  return name + ".csv";
}

/// Writes every series as `step,value` CSV plus a `<protocol>_summary.json`
/// with the scalar results, config echos, and series file index. Content is
/// fully deterministic for identical inputs.
inline void write_experiment_report(const ExperimentReport& report, const std::string& out_dir) {
  std::filesystem::create_directories(out_dir);
  nlohmann::json files = nlohmann::json::object();
  for (const MetricSeries& s : report.series) {
    const std::string file = series_file_name(report, s);
    write_series_csv((std::filesystem::path(out_dir) / file).string(), s.steps, s.values);
    std::string key = s.name;
    if (!s.config_tag.empty()) key += "@" + s.config_tag;
    files[key] = file;
  }

  nlohmann::json j;
  j["protocol"] = report.protocol;
  j["summary"] = report.summary;
  j["configs"] = report.config_echo;
  j["series_files"] = files;
  const auto path = std::filesystem::path(out_dir) / (report.protocol + "_summary.json");
  detail::write_text_file(path.string(), j.dump(2) + "\n");
}

}  // namespace driftmix
