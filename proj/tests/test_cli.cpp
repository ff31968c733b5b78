// End-to-end checks of the command line binary; the path comes in via
// DRIFTMIX_CLI_PATH from the build.
#include <catch2/catch_amalgamated.hpp>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "driftmix/config.hpp"
#include "driftmix/snapshot.hpp"
#include "driftmix/stream.hpp"

using namespace driftmix;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() : path(fs::temp_directory_path() / ("driftmix_cli_" + std::to_string(::getpid()))) {
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

int cli(const std::string& args) {
  const std::string cmd = std::string(DRIFTMIX_CLI_PATH) + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream out;
  out << in.rdbuf();
  return out.str();
}

std::size_t line_count(const fs::path& p) {
  std::ifstream in(p);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

fs::path write_spec(const TempDir& dir, const StreamSpec& spec) {
  const fs::path p = dir.path / "spec.txt";
  std::ofstream(p) << serialize_stream_spec(spec);
  return p;
}

fs::path write_config(const TempDir& dir, const ModelConfig& cfg) {
  const fs::path p = dir.path / "model.cfg";
  std::ofstream(p) << serialize_config(cfg);
  return p;
}

}  // namespace

TEST_CASE("cli: gen rejects an invalid spec") {
  TempDir dir;
  std::ofstream(dir.path / "bad.txt") << "samples_per_part = 0\n";
  REQUIRE(cli("gen --spec " + (dir.path / "bad.txt").string() + " --output " +
              (dir.path / "out.csv").string()) != 0);
}

TEST_CASE("cli: run handles an empty input stream") {
  TempDir dir;
  std::ofstream(dir.path / "empty.csv") << "f0,f1\n";
  ModelConfig cfg = uagmm_config(2);
  const fs::path config = write_config(dir, cfg);

  REQUIRE(cli("run --config " + config.string() + " --input " +
              (dir.path / "empty.csv").string() + " --output " +
              (dir.path / "out").string()) == 0);
  REQUIRE(line_count(dir.path / "out" / "trace.csv") == 1);  // header only
  const auto [loaded, mix] = load_model_snapshot((dir.path / "out" / "model.json").string());
  REQUIRE(mix.modes.empty());
  REQUIRE(mix.samples_seen == 0);
}

TEST_CASE("cli: trace row count equals the input sample count") {
  TempDir dir;
  StreamSpec spec;
  spec.dimension = 4;
  spec.samples_per_part = 10;
  spec.seed = 5;
  const fs::path spec_path = write_spec(dir, spec);
  const fs::path csv = dir.path / "stream.csv";
  REQUIRE(cli("gen --spec " + spec_path.string() + " --output " + csv.string()) == 0);

  ModelConfig cfg = uagmm_config(4);
  const fs::path config = write_config(dir, cfg);
  REQUIRE(cli("run --config " + config.string() + " --input " + csv.string() + " --output " +
              (dir.path / "out").string()) == 0);
  REQUIRE(line_count(dir.path / "out" / "trace.csv") == 61);  // 60 samples + header
}

TEST_CASE("cli: resume continues samples_seen from the snapshot") {
  TempDir dir;
  StreamSpec spec;
  spec.dimension = 3;
  spec.samples_per_part = 5;
  spec.seed = 9;
  const fs::path spec_path = write_spec(dir, spec);
  const fs::path csv = dir.path / "stream.csv";
  REQUIRE(cli("gen --spec " + spec_path.string() + " --output " + csv.string()) == 0);

  ModelConfig cfg = uagmm_config(3);
  const fs::path config = write_config(dir, cfg);
  REQUIRE(cli("run --config " + config.string() + " --input " + csv.string() + " --output " +
              (dir.path / "first").string()) == 0);
  REQUIRE(cli("run --resume " + (dir.path / "first" / "model.json").string() + " --input " +
              csv.string() + " --output " + (dir.path / "second").string()) == 0);

  const auto [c1, m1] = load_model_snapshot((dir.path / "first" / "model.json").string());
  const auto [c2, m2] = load_model_snapshot((dir.path / "second" / "model.json").string());
  REQUIRE(m1.samples_seen == 30);
  REQUIRE(m2.samples_seen == 60);
}

TEST_CASE("cli: fit-pca then run applies the projection") {
  TempDir dir;
  StreamSpec spec;
  spec.dimension = 8;
  spec.samples_per_part = 20;
  spec.seed = 12;
  const fs::path spec_path = write_spec(dir, spec);
  const fs::path csv = dir.path / "stream.csv";
  REQUIRE(cli("gen --spec " + spec_path.string() + " --output " + csv.string()) == 0);

  const fs::path pca = dir.path / "pca.json";
  REQUIRE(cli("fit-pca --input " + csv.string() + " --components 3 --output " + pca.string()) ==
          0);
  const PcaModel model = load_pca_snapshot(pca.string());
  REQUIRE(model.output_dimension() == 3);
  REQUIRE(model.input_dimension() == 8);
  for (std::size_t k = 1; k < model.explained_variance.size(); ++k) {
    REQUIRE(model.explained_variance[k] <= model.explained_variance[k - 1]);
  }

  ModelConfig cfg = uagmm_config(3);
  const fs::path config = write_config(dir, cfg);
  REQUIRE(cli("run --config " + config.string() + " --pca " + pca.string() + " --input " +
              csv.string() + " --output " + (dir.path / "out").string()) == 0);
  REQUIRE(line_count(dir.path / "out" / "trace.csv") == 121);
}

TEST_CASE("cli: fit-pca rejects more components than input dimensions") {
  TempDir dir;
  std::ofstream(dir.path / "tiny.csv") << "f0,f1\n1,2\n3,4\n5,6\n";
  REQUIRE(cli("fit-pca --input " + (dir.path / "tiny.csv").string() +
              " --components 3 --output " + (dir.path / "pca.json").string()) != 0);
}

TEST_CASE("cli: run aborts on a dimension mismatch") {
  TempDir dir;
  std::ofstream(dir.path / "three.csv") << "f0,f1,f2\n1,2,3\n";
  ModelConfig cfg = uagmm_config(2);
  const fs::path config = write_config(dir, cfg);
  REQUIRE(cli("run --config " + config.string() + " --input " +
              (dir.path / "three.csv").string() + " --output " + (dir.path / "out").string()) !=
          0);
}

TEST_CASE("cli: unknown experiment protocol is a usage error") {
  TempDir dir;
  StreamSpec spec;
  spec.samples_per_part = 10;
  const fs::path spec_path = write_spec(dir, spec);
  REQUIRE(cli("experiment bogus --spec " + spec_path.string() + " --output " +
              (dir.path / "out").string()) != 0);
}

TEST_CASE("cli: retention experiment with an explicit capacity reports the re-entry row") {
  TempDir dir;
  StreamSpec spec;
  spec.dimension = 20;
  spec.samples_per_part = 150;
  spec.n_anomaly_identities = 5;
  spec.seed = 502;
  const fs::path spec_path = write_spec(dir, spec);
  REQUIRE(cli("experiment retention --k 4 --spec " + spec_path.string() + " --output " +
              (dir.path / "out").string()) == 0);
  const std::string summary = slurp(dir.path / "out" / "retention_summary.json");
  REQUIRE(summary.find("k4_reentry_omega") != std::string::npos);
  REQUIRE(summary.find("\"k4_reentry_omega\": 1.0") != std::string::npos);
}

TEST_CASE("cli: memory experiment writes the mode-count series and merge log") {
  TempDir dir;
  StreamSpec spec;
  spec.dimension = 20;
  spec.n_normal_identities = 5;
  spec.samples_per_part = 50;
  spec.seed = 77;
  const fs::path spec_path = write_spec(dir, spec);
  REQUIRE(cli("experiment memory --spec " + spec_path.string() + " --output " +
              (dir.path / "out").string()) == 0);
  bool found_series = false;
  for (const auto& entry : fs::directory_iterator(dir.path / "out")) {
    const std::string name = entry.path().filename().string();
    if (name.rfind("memory_", 0) == 0 && name.find(".csv") != std::string::npos &&
        name != "memory_merges.csv") {
      found_series = true;
      REQUIRE(line_count(entry.path()) == 301);  // 300 samples + header
    }
  }
  REQUIRE(found_series);
  REQUIRE(fs::exists(dir.path / "out" / "memory_merges.csv"));
}
