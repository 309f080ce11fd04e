#pragma once

#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "rwrc/config.hpp"
#include "rwrc/processes.hpp"
#include "rwrc/variance.hpp"
#include "rwrc/walk.hpp"

namespace rwrc {

struct SingleParams {
  std::size_t replicas = 1;
  std::size_t regenerations = 100;
  double confirm_distance = 64.0;
  int process_n = 10;
  double process_T = 1.0;
  std::size_t process_files = 16;
  std::int64_t dump_steps = 0;  // 0 disables trajectory dumps
  std::size_t dump_replicas = 1;
  std::string dump_format = "jsonl";  // or "binary"
};

struct PairParams {
  std::size_t replicas = 200;
  std::vector<int> n_grid{64, 128, 256, 512};
  double epsilon = 0.05;
  double confirm_distance = 64.0;
  std::int64_t max_time = kNoTimeLimit;
};

struct ScalingParams {
  std::size_t replicas = 500;
  std::vector<int> n_grid{50, 100, 200};
  double T = 1.0;
  std::vector<double> t_grid{0.0, 0.25, 0.5, 0.75, 1.0};
  double confirm_distance = 64.0;
  std::size_t bootstrap = 200;
};

struct VarianceParams {
  FunctionalSpec functional{"laplace", {1.0, 1.0}};
  double b = 1.5;
  int k_min = 4;
  int k_max = 10;
  std::size_t environments = 100;
  std::size_t walks = 50;
  double confirm_distance = 64.0;
  std::optional<Vec> drift;
};

struct StatsParams {
  std::size_t edges = 1'000'000;
  std::size_t hill_k = 10'000;
  std::vector<double> inv_levels{10.0, 50.0, 100.0};
  std::size_t stable_draws = 100'000;
  std::vector<double> laplace_points{0.5, 1.0, 2.0};
  std::vector<int> moment_n{10, 100, 1000};
  double moment_p = 1.0;
  double moment_cap = 0.0;
  std::size_t moment_reps = 10'000;
  std::vector<int> tail_n{100, 1000};
  std::uint64_t tail_reps = 1'000'000;
};

enum class Pipeline { Single, Pair, Scaling, Variance, Stats };
std::string to_string(Pipeline p);
Pipeline parse_pipeline(const std::string& s);

// Fully determines the data outputs of one run.
struct Manifest {
  std::string experiment = "run";
  EnvConfig env;
  WalkOptions walk;
  SingleParams single;
  PairParams pair;
  ScalingParams scaling;
  VarianceParams variance;
  StatsParams stats;
};

// Reads a YAML manifest: an `env` mapping, optional `experiment` and `walk`,
// and one optional section per pipeline.  ConfigError names line and key.
Manifest load_manifest(const std::string& path);
Manifest manifest_from_yaml(const std::string& text);

nlohmann::json manifest_to_json(const Manifest& m, Pipeline p);

struct RunContext {
  std::filesystem::path out_dir;
  unsigned threads = 1;
  bool progress = true;
};

// Each pipeline writes its data files under out_dir (as NAME.partial until
// the run completes), then manifest.json and report.json.  Returns the
// data file names.
std::vector<std::string> run_single(const Manifest& m, const RunContext& ctx);
std::vector<std::string> run_pair(const Manifest& m, const RunContext& ctx);
std::vector<std::string> run_scaling(const Manifest& m, const RunContext& ctx);
std::vector<std::string> run_variance(const Manifest& m, const RunContext& ctx);
std::vector<std::string> run_stats(const Manifest& m, const RunContext& ctx);
std::vector<std::string> run_pipeline(Pipeline p, const Manifest& m, const RunContext& ctx);

}  // namespace rwrc
