// driftmix command line: synthetic stream generation, PCA fitting,
// streaming scoring runs, and the drift experiment protocols.

#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "driftmix/driftmix.hpp"

namespace {

using namespace driftmix;

struct ModelFlags {
  std::optional<double> alpha;
  std::optional<std::int64_t> k;
  bool uagmm = false;
};

void apply_model_flags(ModelConfig& cfg, const ModelFlags& flags) {
  if (flags.alpha) cfg.alpha = *flags.alpha;
  if (flags.k) {
    cfg.capacity = *flags.k;
    cfg.merge_enabled = false;
  } else if (flags.uagmm) {
    cfg.capacity.reset();
    cfg.merge_enabled = true;
  }
}

int cmd_gen(const std::string& spec_path, const std::string& output,
            std::optional<std::uint64_t> seed) {
  StreamSpec spec = load_stream_spec(spec_path);
  if (seed) spec.seed = *seed;
  const std::vector<StreamSample> samples = generate_stream(spec);
  save_feature_csv(output, samples, spec.dimension);
  log_info("wrote " + std::to_string(samples.size()) + " samples to " + output);
  return 0;
}

int cmd_fit_pca(const std::string& input, std::size_t components, const std::string& output) {
  const FeatureTable table = load_feature_csv(input);
  const PcaModel model = pca_fit(features_of(table.rows), components);
  save_pca_snapshot(output, model);
  std::cout << "components: " << model.output_dimension() << " (input dimension "
            << model.input_dimension() << ")\n";
  std::cout << "explained variance:";
  for (double v : model.explained_variance) std::cout << ' ' << format_double(v);
  std::cout << '\n';
  return 0;
}

int cmd_run(const std::optional<std::string>& config_path,
            const std::optional<std::string>& pca_path, const std::string& input,
            const std::string& out_dir, const std::optional<std::string>& resume_path) {
  ModelConfig cfg;
  Mixture state;
  if (resume_path) {
    if (config_path) log_info("--resume given; using the snapshot's embedded config");
    std::tie(cfg, state) = load_model_snapshot(*resume_path);
    validate_config(cfg);
  } else if (config_path) {
    cfg = load_config(*config_path);
  } else {
    throw ConfigError("run: either --config or --resume is required");
  }

  std::optional<PcaModel> pca;
  if (pca_path) {
    pca = load_pca_snapshot(*pca_path);
    if (pca->output_dimension() != cfg.dimension) {
      throw ConfigError("PCA model outputs dimension " +
                        std::to_string(pca->output_dimension()) +
                        " but the model config expects " + std::to_string(cfg.dimension));
    }
  }

  const FeatureTable table = load_feature_csv(input);
  const std::size_t expected = pca ? pca->input_dimension() : cfg.dimension;
  if (!table.rows.empty() && table.dimension != expected) {
    throw CsvError("row 2: input has " + std::to_string(table.dimension) +
                   " feature columns, expected " + std::to_string(expected));
  }

  std::filesystem::create_directories(out_dir);
  const auto dir = std::filesystem::path(out_dir);
  TraceWriter trace((dir / "trace.csv").string());

  Model model(cfg, state);
  std::vector<MergeEvent> merges;
  std::int64_t step = 0;
  for (std::size_t i = 0; i < table.rows.size(); ++i) {
    const StreamSample& row = table.rows[i];
    const FeatureVector x = pca ? pca_transform(*pca, row.features) : row.features;
    const ScoredSample scored = model.process(x, &merges);
    const std::string sample_id = table.has_id ? row.identity : std::to_string(i);
    trace.record(++step, sample_id, scored);
  }
  trace.close();
  write_merge_csv((dir / "merges.csv").string(), merges);
  save_model_snapshot((dir / "model.json").string(), model.config(), model.mixture());
  log_info("processed " + std::to_string(table.rows.size()) + " samples; " +
           std::to_string(model.mixture().modes.size()) + " modes in the final mixture");
  return 0;
}

ModelConfig experiment_base_config(const StreamSpec& spec,
                                   const std::optional<std::string>& config_path,
                                   const std::vector<FeatureVector>& train_part) {
  if (config_path) {
    ModelConfig cfg = load_config(*config_path);
    if (cfg.dimension != spec.dimension) {
      throw ConfigError("config dimension " + std::to_string(cfg.dimension) +
                        " does not match stream dimension " + std::to_string(spec.dimension));
    }
    return cfg;
  }
  ModelConfig cfg = uagmm_config(spec.dimension);
  if (spec.n_normal_identities > 1) {
    // multi-identity streams: pooled variance over-estimates a mode's
    // basin, so derive Z from the within-identity spread instead
    cfg.z = {4.0 * spec.identity_spread * spec.identity_spread};
  } else {
    cfg.z = z_from_samples(train_part);
  }
  return cfg;
}

int cmd_experiment(const std::string& protocol, const std::string& spec_path,
                   const std::optional<std::string>& config_path, const std::string& out_dir,
                   std::optional<std::uint64_t> seed, const ModelFlags& flags,
                   std::size_t repeats, std::size_t repeated_anomalies) {
  StreamSpec spec = load_stream_spec(spec_path);
  if (seed) spec.seed = *seed;

  const std::vector<StreamSample> stream = generate_stream(spec);
  std::vector<FeatureVector> normal_features;
  for (const StreamSample& s : stream) {
    if (s.label == Label::normal) normal_features.push_back(s.features);
  }

  ExperimentReport report;
  if (protocol == "intra") {
    const auto parts = split_parts(normal_features, 6);
    ModelConfig cfg = experiment_base_config(spec, config_path, parts[0]);
    apply_model_flags(cfg, flags);
    validate_config(cfg);
    report = run_intra_class(parts, 5, [&cfg] { return Model(cfg); });
    report.config_echo["model"] = serialize_config(cfg);
    for (MetricSeries& s : report.series) s.config_tag = config_hash(cfg);
  } else if (protocol == "inter") {
    const auto parts = split_parts(normal_features, 6);
    ModelConfig cfg = experiment_base_config(spec, config_path, parts[0]);
    apply_model_flags(cfg, flags);
    validate_config(cfg);
    report = run_inter_class(parts[0], anomaly_vectors(spec), repeats, cfg);
    for (MetricSeries& s : report.series) s.config_tag = config_hash(cfg);
  } else if (protocol == "retention") {
    const auto parts = split_parts(normal_features, 6);
    ModelConfig base = experiment_base_config(spec, config_path, parts[0]);
    if (flags.alpha) base.alpha = *flags.alpha;
    std::vector<std::pair<std::string, ModelConfig>> configs;
    if (flags.k) {
      ModelConfig cfg = base;
      cfg.capacity = *flags.k;
      cfg.merge_enabled = false;
      configs.emplace_back("k" + std::to_string(*flags.k), cfg);
    } else if (flags.uagmm) {
      ModelConfig cfg = base;
      cfg.capacity.reset();
      cfg.merge_enabled = true;
      configs.emplace_back("uagmm", cfg);
    } else {
      for (std::int64_t k : {4, 5, 6}) {
        ModelConfig cfg = base;
        cfg.capacity = k;
        cfg.merge_enabled = false;
        configs.emplace_back("k" + std::to_string(k), cfg);
      }
      ModelConfig cfg = base;
      cfg.capacity.reset();
      cfg.merge_enabled = true;
      configs.emplace_back("uagmm", cfg);
    }
    for (auto& [name, cfg] : configs) validate_config(cfg);
    report = run_retention(parts[0], anomaly_vectors(spec), repeats, configs,
                           repeated_anomalies);
  } else if (protocol == "memory") {
    if (flags.k) throw ConfigError("memory protocol tracks the unconstrained model; drop --k");
    const auto parts = split_parts(normal_features, 6);
    ModelConfig cfg = experiment_base_config(spec, config_path, parts[0]);
    apply_model_flags(cfg, flags);
    validate_config(cfg);
    std::vector<FeatureVector> all;
    for (const StreamSample& s : stream) all.push_back(s.features);
    std::vector<MergeEvent> merges;
    report = run_memory_tracking(all, cfg, &merges);
    for (MetricSeries& s : report.series) s.config_tag = config_hash(cfg);
    std::filesystem::create_directories(out_dir);
    write_merge_csv((std::filesystem::path(out_dir) / "memory_merges.csv").string(), merges);
  } else {
    throw CLI::ValidationError("protocol", "unknown protocol '" + protocol +
                                               "' (expected intra|inter|retention|memory)");
  }

  write_experiment_report(report, out_dir);
  log_info("wrote " + report.protocol + " report to " + out_dir);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"adaptive Gaussian mixture anomaly detection under concept drift"};
  app.require_subcommand(1);

  std::string spec_path, input_path, output_path, protocol;
  std::optional<std::string> config_path, pca_path, resume_path;
  std::optional<std::uint64_t> seed;
  std::size_t components = 20;
  std::size_t repeats = 40;
  std::size_t repeated_anomalies = 4;
  ModelFlags flags;

  CLI::App* gen = app.add_subcommand("gen", "generate a labeled synthetic drift stream");
  gen->add_option("--spec", spec_path, "stream spec file")->required();
  gen->add_option("--output", output_path, "output CSV path")->required();
  gen->add_option("--seed", seed, "override the spec's seed");

  CLI::App* fit = app.add_subcommand("fit-pca", "fit a PCA projection on a feature matrix");
  fit->add_option("--input", input_path, "feature CSV")->required();
  fit->add_option("--components", components, "output dimension")->capture_default_str();
  fit->add_option("--output", output_path, "PCA snapshot path")->required();

  CLI::App* run = app.add_subcommand("run", "stream samples through a model");
  run->add_option("--config", config_path, "model config file");
  run->add_option("--pca", pca_path, "PCA snapshot applied to each row");
  run->add_option("--input", input_path, "feature CSV")->required();
  run->add_option("--output", output_path, "output directory")->required();
  run->add_option("--resume", resume_path, "model snapshot to continue from");

  CLI::App* exp = app.add_subcommand("experiment", "run a drift experiment protocol");
  exp->add_option("protocol", protocol, "intra|inter|retention|memory")->required();
  exp->add_option("--spec", spec_path, "stream spec file")->required();
  exp->add_option("--config", config_path, "model config file (default: derived)");
  exp->add_option("--output", output_path, "output directory")->required();
  exp->add_option("--seed", seed, "override the spec's seed");
  exp->add_option("--alpha", flags.alpha, "model update rate");
  exp->add_option("--k", flags.k, "capped-model capacity");
  exp->add_flag("--uagmm", flags.uagmm, "unconstrained merging model (default)");
  exp->add_option("--repeats", repeats, "repeat count per anomaly block")->capture_default_str();
  exp->add_option("--repeated-anomalies", repeated_anomalies,
                  "how many anomalies get a repeat block in the retention protocol")
      ->capture_default_str();

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen(spec_path, output_path, seed);
    if (fit->parsed()) return cmd_fit_pca(input_path, components, output_path);
    if (run->parsed())
      return cmd_run(config_path, pca_path, input_path, output_path, resume_path);
    if (exp->parsed())
      return cmd_experiment(protocol, spec_path, config_path, output_path, seed, flags,
                            repeats, repeated_anomalies);
  } catch (const CLI::Error& e) {
    return app.exit(e);
  } catch (const std::exception& e) {
    driftmix::log_error(e.what());
    return 1;
  }
  return 0;
}
