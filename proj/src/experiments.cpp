#include "rwrc/experiments.hpp"

#include <yaml-cpp/yaml.h>

#include <chrono>
#include <cmath>
#include <ctime>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <map>
#include <memory>
#include <mutex>
#include <sstream>

#include "rwrc/environment.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/hash.hpp"
#include "rwrc/kernels.hpp"
#include "rwrc/parallel.hpp"
#include "rwrc/regeneration.hpp"
#include "rwrc/report.hpp"
#include "rwrc/stats.hpp"
#include "rwrc/trajectory_io.hpp"
#include "rwrc/twowalk.hpp"
#include "rwrc/yaml_util.hpp"

namespace rwrc {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

constexpr std::uint64_t kTagEnv = 0x73656e76;
constexpr std::uint64_t kTagWalk = 0x7377616c;
constexpr std::uint64_t kTagPairEnv = 0x70656e76;
constexpr std::uint64_t kTagPairWalk = 0x7077616c;
constexpr std::uint64_t kTagScaleEnv = 0x63656e76;
constexpr std::uint64_t kTagScaleWalk = 0x6377616c;
constexpr std::uint64_t kTagBoot = 0x626f6f74;
constexpr std::uint64_t kTagStats = 0x73746174;

// ---------------------------------------------------------------- parsing

template <class T>
std::vector<T> yaml_list(const YAML::Node& map, const std::string& key, std::vector<T> fallback) {
  const YAML::Node v = map[key];
  if (!v) return fallback;
  if (!v.IsSequence()) throw ConfigError(yaml_where(v, key) + "expected a list");
  std::vector<T> out;
  for (const auto& e : v) out.push_back(yaml_as<T>(e, key));
  return out;
}

std::size_t yaml_count(const YAML::Node& map, const std::string& key, std::size_t fallback) {
  const YAML::Node v = map[key];
  if (!v) return fallback;
  const auto x = yaml_as<long long>(v, key);
  if (x < 0) throw ConfigError(yaml_where(v, key) + "must be non-negative");
  return static_cast<std::size_t>(x);
}

void check_positive_grid(const YAML::Node& section, const std::string& key, const std::vector<int>& grid) {
  for (std::size_t i = 0; i < grid.size(); ++i)
    if (grid[i] < 1 || (i > 0 && grid[i] <= grid[i - 1]))
      throw ConfigError(yaml_where(section[key], key) + "must be positive and strictly increasing");
}

void check_positive(const YAML::Node& section, const std::string& key, double v) {
  if (!(v > 0.0)) throw ConfigError(yaml_where(section[key] ? section[key] : section, key) + "must be positive");
}

WalkOptions parse_walk(const YAML::Node& n) {
  WalkOptions w;
  if (!n) return w;
  w.accelerate = yaml_optional<bool>(n, "accelerate", w.accelerate);
  w.bounce_threshold = yaml_optional<double>(n, "bounce_threshold", w.bounce_threshold);
  w.max_skeleton = yaml_count(n, "max_skeleton", w.max_skeleton);
  if (!(w.bounce_threshold > 0.0 && w.bounce_threshold <= 1.0))
    throw ConfigError(yaml_where(n["bounce_threshold"], "bounce_threshold") + "must lie in (0, 1]");
  return w;
}

SingleParams parse_single(const YAML::Node& n) {
  SingleParams p;
  if (!n) return p;
  p.replicas = yaml_count(n, "replicas", p.replicas);
  p.regenerations = yaml_count(n, "regenerations", p.regenerations);
  p.confirm_distance = yaml_optional<double>(n, "confirm_distance", p.confirm_distance);
  check_positive(n, "confirm_distance", p.confirm_distance);
  p.process_n = yaml_optional<int>(n, "process_n", p.process_n);
  p.process_T = yaml_optional<double>(n, "process_T", p.process_T);
  p.process_files = yaml_count(n, "process_files", p.process_files);
  p.dump_steps = yaml_optional<std::int64_t>(n, "dump_steps", p.dump_steps);
  p.dump_replicas = yaml_count(n, "dump_replicas", p.dump_replicas);
  p.dump_format = yaml_optional<std::string>(n, "dump_format", p.dump_format);
  if (p.process_n < 1) throw ConfigError(yaml_where(n["process_n"], "process_n") + "must be positive");
  if (p.process_T < 0.0) throw ConfigError(yaml_where(n["process_T"], "process_T") + "must be non-negative");
  if (p.dump_format != "jsonl" && p.dump_format != "binary")
    throw ConfigError(yaml_where(n["dump_format"], "dump_format") + "expected jsonl or binary");
  return p;
}

PairParams parse_pair(const YAML::Node& n) {
  PairParams p;
  if (!n) return p;
  p.replicas = yaml_count(n, "replicas", p.replicas);
  p.n_grid = yaml_list<int>(n, "n_grid", p.n_grid);
  check_positive_grid(n, "n_grid", p.n_grid);
  p.epsilon = yaml_optional<double>(n, "epsilon", p.epsilon);
  check_positive(n, "epsilon", p.epsilon);
  p.confirm_distance = yaml_optional<double>(n, "confirm_distance", p.confirm_distance);
  check_positive(n, "confirm_distance", p.confirm_distance);
  p.max_time = yaml_optional<std::int64_t>(n, "max_time", p.max_time);
  if (p.n_grid.empty()) throw ConfigError(yaml_where(n, "n_grid") + "must not be empty");
  return p;
}

ScalingParams parse_scaling(const YAML::Node& n) {
  ScalingParams p;
  if (!n) return p;
  p.replicas = yaml_count(n, "replicas", p.replicas);
  p.n_grid = yaml_list<int>(n, "n_grid", p.n_grid);
  check_positive_grid(n, "n_grid", p.n_grid);
  p.T = yaml_optional<double>(n, "T", p.T);
  p.t_grid = yaml_list<double>(n, "t_grid", p.t_grid);
  p.confirm_distance = yaml_optional<double>(n, "confirm_distance", p.confirm_distance);
  check_positive(n, "confirm_distance", p.confirm_distance);
  p.bootstrap = yaml_count(n, "bootstrap", p.bootstrap);
  if (p.T < 1.0) throw ConfigError(yaml_where(n["T"], "T") + "must be at least 1 (S_n(1) is reported)");
  for (double t : p.t_grid)
    if (t < 0.0 || t > p.T) throw ConfigError(yaml_where(n["t_grid"], "t_grid") + "times must lie in [0, T]");
  if (p.n_grid.empty()) throw ConfigError(yaml_where(n, "n_grid") + "must not be empty");
  return p;
}

VarianceParams parse_variance(const YAML::Node& n, int d) {
  VarianceParams p;
  if (!n) return p;
  if (n["functional"]) {
    const YAML::Node f = n["functional"];
    p.functional.name = yaml_required<std::string>(f, "name");
    p.functional.params = yaml_list<double>(f, "params", {});
    try {
      validate_functional(p.functional, d);
    } catch (const ConfigError& e) {
      throw ConfigError(yaml_where(f, "functional") + e.what());
    }
  }
  p.b = yaml_optional<double>(n, "b", p.b);
  if (!(p.b > 1.0 && p.b < 2.0)) throw ConfigError(yaml_where(n["b"], "b") + "must lie in (1, 2)");
  p.k_min = yaml_optional<int>(n, "k_min", p.k_min);
  p.k_max = yaml_optional<int>(n, "k_max", p.k_max);
  if (p.k_min < 0 || p.k_max < p.k_min) throw ConfigError(yaml_where(n, "k_max") + "need 0 <= k_min <= k_max");
  p.environments = yaml_count(n, "environments", p.environments);
  p.walks = yaml_count(n, "walks", p.walks);
  if (p.environments < 3) throw ConfigError(yaml_where(n["environments"], "environments") + "must be at least 3");
  if (p.walks < 2) throw ConfigError(yaml_where(n["walks"], "walks") + "must be at least 2");
  p.confirm_distance = yaml_optional<double>(n, "confirm_distance", p.confirm_distance);
  check_positive(n, "confirm_distance", p.confirm_distance);
  if (n["drift"]) {
    const auto v = yaml_list<double>(n, "drift", {});
    if (static_cast<int>(v.size()) != d) throw ConfigError(yaml_where(n["drift"], "drift") + "needs d values");
    Vec dv{};
    for (int i = 0; i < d; ++i) dv[i] = v[static_cast<std::size_t>(i)];
    p.drift = dv;
  }
  return p;
}

StatsParams parse_stats(const YAML::Node& n) {
  StatsParams p;
  if (!n) return p;
  p.edges = yaml_count(n, "edges", p.edges);
  p.hill_k = yaml_count(n, "hill_k", p.hill_k);
  p.inv_levels = yaml_list<double>(n, "inv_levels", p.inv_levels);
  p.stable_draws = yaml_count(n, "stable_draws", p.stable_draws);
  p.laplace_points = yaml_list<double>(n, "laplace_points", p.laplace_points);
  p.moment_n = yaml_list<int>(n, "moment_n", p.moment_n);
  check_positive_grid(n, "moment_n", p.moment_n);
  p.moment_p = yaml_optional<double>(n, "moment_p", p.moment_p);
  p.moment_cap = yaml_optional<double>(n, "moment_cap", p.moment_cap);
  p.moment_reps = yaml_count(n, "moment_reps", p.moment_reps);
  p.tail_n = yaml_list<int>(n, "tail_n", p.tail_n);
  check_positive_grid(n, "tail_n", p.tail_n);
  p.tail_reps = yaml_count(n, "tail_reps", p.tail_reps);
  if (p.hill_k == 0 || p.hill_k >= p.edges) throw ConfigError(yaml_where(n, "hill_k") + "need 0 < hill_k < edges");
  if (p.moment_p < 1.0) throw ConfigError(yaml_where(n["moment_p"], "moment_p") + "must be at least 1");
  if (p.moment_reps < 100) throw ConfigError(yaml_where(n["moment_reps"], "moment_reps") + "must be at least 100");
  return p;
}

// ---------------------------------------------------------------- output

std::string utc_now() {
  const auto now = std::chrono::system_clock::now();
  const std::time_t t = std::chrono::system_clock::to_time_t(now);
  std::tm tm{};
  gmtime_r(&t, &tm);
  std::ostringstream os;
  os << std::put_time(&tm, "%Y-%m-%dT%H:%M:%SZ");
  return os.str();
}

// Files are written as NAME.partial and renamed once the run completes.
class OutputSet {
 public:
  explicit OutputSet(fs::path dir) : dir_(std::move(dir)) { fs::create_directories(dir_); }

  std::ofstream& open(const std::string& name) {
    auto f = std::make_unique<std::ofstream>(dir_ / (name + ".partial"), std::ios::binary | std::ios::trunc);
    if (!*f) throw Error("cannot open output file " + (dir_ / name).string());
    *f << std::setprecision(17);
    names_.push_back(name);
    files_.push_back(std::move(f));
    return *files_.back();
  }

  void commit() {
    for (std::size_t i = 0; i < names_.size(); ++i) {
      files_[i]->close();
      if (!*files_[i]) throw Error("failed writing " + names_[i]);
      fs::rename(dir_ / (names_[i] + ".partial"), dir_ / names_[i]);
    }
  }

  const std::vector<std::string>& names() const { return names_; }

 private:
  fs::path dir_;
  std::vector<std::string> names_;
  std::vector<std::unique_ptr<std::ofstream>> files_;
};

class Progress {
 public:
  Progress(const RunContext& ctx, std::string pipeline, std::size_t total)
      : enabled_(ctx.progress), pipeline_(std::move(pipeline)), total_(total),
        step_(std::max<std::size_t>(1, total / 20)) {}

  void tick() {
    if (!enabled_) return;
    std::lock_guard<std::mutex> lock(mu_);
    ++done_;
    if (done_ % step_ == 0 || done_ == total_)
      std::cerr << "progress pipeline=" << pipeline_ << " done=" << done_ << " total=" << total_ << '\n';
  }

 private:
  bool enabled_;
  std::string pipeline_;
  std::size_t total_;
  std::size_t step_;
  std::size_t done_ = 0;
  std::mutex mu_;
};

struct RunClock {
  std::string started = utc_now();
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  }
};

std::vector<std::string> finish(Pipeline p, const Manifest& m, const RunContext& ctx, OutputSet& out,
                                StatsReport report, const json& ledger, const RunClock& clock) {
  report.experiment = m.experiment;
  report.config = manifest_to_json(m, p);
  report.runtime_seconds = clock.seconds();
  out.open("report.json") << report.to_json().dump(2) << '\n';
  std::vector<std::string> data = out.names();
  json manifest{{"experiment", m.experiment},
                {"pipeline", to_string(p)},
                {"tool_version", RWRC_VERSION},
                {"config", manifest_to_json(m, p)},
                {"seed_ledger", ledger},
                {"outputs", data},
                {"run",
                 {{"threads", ctx.threads},
                  {"started", clock.started},
                  {"finished", utc_now()},
                  {"runtime_seconds", clock.seconds()}}}};
  out.open("manifest.json") << manifest.dump(2) << '\n';
  out.commit();
  return data;
}

EnvConfig replica_env(const EnvConfig& cfg, std::uint64_t tag, std::size_t r) {
  EnvConfig c = cfg;
  c.seed = derive_seed(cfg.seed, tag, r);
  return c;
}

json point_json(const Point& p, int d) {
  json a = json::array();
  for (int i = 0; i < d; ++i) a.push_back(p[i]);
  return a;
}

std::string stop_name(StopReason r) {
  switch (r) {
    case StopReason::None:
      return "none";
    case StopReason::Steps:
      return "steps";
    case StopReason::Level:
      return "level";
    case StopReason::Capacity:
      return "capacity";
  }
  return "none";
}

// ⌈L·‖ℓ⃗‖⌉: the level key reached once the walk enters 𝓗⁺(L).
std::int64_t key_for_level(const Environment& env, double L) {
  return static_cast<std::int64_t>(std::ceil(L * env.ell_norm() - 1e-9));
}

// d−1 unit vectors completing v̂_0 to an orthonormal basis.
std::vector<Vec> orthogonal_complement(const Vec& v0, int d) {
  std::vector<Vec> basis{v0};
  for (int axis = 0; axis < d && static_cast<int>(basis.size()) < d; ++axis) {
    Vec u{};
    u[axis] = 1.0;
    for (const Vec& b : basis) {
      double p = 0.0;
      for (int i = 0; i < d; ++i) p += u[i] * b[i];
      for (int i = 0; i < d; ++i) u[i] -= p * b[i];
    }
    double nu = 0.0;
    for (int i = 0; i < d; ++i) nu += u[i] * u[i];
    if (nu < 1e-12) continue;
    nu = std::sqrt(nu);
    for (int i = 0; i < d; ++i) u[i] /= nu;
    basis.push_back(u);
  }
  basis.erase(basis.begin());
  return basis;
}

Vec normalized(const Vec& v, int d) {
  double n = 0.0;
  for (int i = 0; i < d; ++i) n += v[i] * v[i];
  n = std::sqrt(n);
  Vec u{};
  for (int i = 0; i < d; ++i) u[i] = v[i] / n;
  return u;
}

double project(const Point& x, const Vec& u, int d) {
  double s = 0.0;
  for (int i = 0; i < d; ++i) s += x[i] * u[i];
  return s;
}

}  // namespace

std::string to_string(Pipeline p) {
  switch (p) {
    case Pipeline::Single:
      return "simulate";
    case Pipeline::Pair:
      return "pair";
    case Pipeline::Scaling:
      return "scaling";
    case Pipeline::Variance:
      return "variance";
    case Pipeline::Stats:
      return "stats";
  }
  return "simulate";
}

Pipeline parse_pipeline(const std::string& s) {
  if (s == "simulate" || s == "single") return Pipeline::Single;
  if (s == "pair") return Pipeline::Pair;
  if (s == "scaling") return Pipeline::Scaling;
  if (s == "variance") return Pipeline::Variance;
  if (s == "stats") return Pipeline::Stats;
  throw ConfigError("unknown pipeline '" + s + "'");
}

Manifest manifest_from_yaml(const std::string& text) {
  YAML::Node root;
  try {
    root = YAML::Load(text);
  } catch (const YAML::Exception& e) {
    throw ConfigError("config error at line " + std::to_string(e.mark.line + 1) + ": " + e.msg);
  }
  if (!root.IsMap()) throw ConfigError("config root must be a mapping");
  Manifest m;
  m.experiment = yaml_optional<std::string>(root, "experiment", m.experiment);
  const YAML::Node env = root["env"];
  if (!env) throw ConfigError(yaml_where(root, "env") + "missing required key");
  m.env = env_config_from_yaml(env);
  m.walk = parse_walk(root["walk"]);
  m.single = parse_single(root["single"]);
  m.pair = parse_pair(root["pair"]);
  m.scaling = parse_scaling(root["scaling"]);
  m.variance = parse_variance(root["variance"], m.env.d);
  m.stats = parse_stats(root["stats"]);
  return m;
}

Manifest load_manifest(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path);
  std::stringstream ss;
  ss << in.rdbuf();
  return manifest_from_yaml(ss.str());
}

json manifest_to_json(const Manifest& m, Pipeline p) {
  json j{{"env", to_json(m.env)},
         {"walk",
          {{"accelerate", m.walk.accelerate},
           {"bounce_threshold", m.walk.bounce_threshold},
           {"max_skeleton", m.walk.max_skeleton}}}};
  switch (p) {
    case Pipeline::Single:
      j["single"] = {{"replicas", m.single.replicas},         {"regenerations", m.single.regenerations},
                     {"confirm_distance", m.single.confirm_distance}, {"process_n", m.single.process_n},
                     {"process_T", m.single.process_T},       {"process_files", m.single.process_files},
                     {"dump_steps", m.single.dump_steps},     {"dump_replicas", m.single.dump_replicas},
                     {"dump_format", m.single.dump_format}};
      break;
    case Pipeline::Pair:
      j["pair"] = {{"replicas", m.pair.replicas},
                   {"n_grid", m.pair.n_grid},
                   {"epsilon", m.pair.epsilon},
                   {"confirm_distance", m.pair.confirm_distance},
                   {"max_time", m.pair.max_time}};
      break;
    case Pipeline::Scaling:
      j["scaling"] = {{"replicas", m.scaling.replicas}, {"n_grid", m.scaling.n_grid},
                      {"T", m.scaling.T},               {"t_grid", m.scaling.t_grid},
                      {"confirm_distance", m.scaling.confirm_distance}, {"bootstrap", m.scaling.bootstrap}};
      break;
    case Pipeline::Variance: {
      json v{{"functional", {{"name", m.variance.functional.name}, {"params", m.variance.functional.params}}},
             {"b", m.variance.b},
             {"k_min", m.variance.k_min},
             {"k_max", m.variance.k_max},
             {"environments", m.variance.environments},
             {"walks", m.variance.walks},
             {"confirm_distance", m.variance.confirm_distance}};
      if (m.variance.drift) {
        json dv = json::array();
        for (int i = 0; i < m.env.d; ++i) dv.push_back((*m.variance.drift)[i]);
        v["drift"] = dv;
      }
      j["variance"] = v;
      break;
    }
    case Pipeline::Stats:
      j["stats"] = {{"edges", m.stats.edges},
                    {"hill_k", m.stats.hill_k},
                    {"inv_levels", m.stats.inv_levels},
                    {"stable_draws", m.stats.stable_draws},
                    {"laplace_points", m.stats.laplace_points},
                    {"moment_n", m.stats.moment_n},
                    {"moment_p", m.stats.moment_p},
                    {"moment_cap", m.stats.moment_cap},
                    {"moment_reps", m.stats.moment_reps},
                    {"tail_n", m.stats.tail_n},
                    {"tail_reps", m.stats.tail_reps}};
      break;
  }
  return j;
}

// ---------------------------------------------------------------- single

std::vector<std::string> run_single(const Manifest& m, const RunContext& ctx) {
  const RunClock clock;
  const SingleParams& sp = m.single;
  const int d = m.env.d;
  OutputSet out(ctx.out_dir);
  if (sp.replicas == 0) std::cerr << "warning: replica count is 0; writing empty outputs\n";

  struct Result {
    std::uint64_t env_seed = 0;
    std::int64_t duration = 0;
    std::size_t skeleton = 0;
    std::size_t bounces = 0;
    std::int64_t max_level_key = 0;
    StopReason stop = StopReason::None;
    bool complete = false;
    std::vector<RegenerationRecord> records;
    std::string process_csv;
    std::string dump;
    std::string process_error;
  };
  std::vector<Result> results(sp.replicas);
  Progress progress(ctx, "simulate", sp.replicas);
  parallel_for(sp.replicas, ctx.threads, [&](std::size_t r) {
    Result& res = results[r];
    const EnvConfig ec = replica_env(m.env, kTagEnv, r);
    res.env_seed = ec.seed;
    const Environment env(ec);
    RegenerationRunOptions ro;
    ro.confirm_distance = sp.confirm_distance;
    ro.wanted = sp.regenerations;
    ro.walk = m.walk;
    auto run = run_until_regenerations(env, Point{}, RngStream(derive_seed(m.env.seed, kTagWalk, r), 0), ro);
    res.duration = run.traj.duration();
    res.skeleton = run.traj.skeleton_size();
    res.bounces = run.traj.bounces().size();
    for (const Point& x : run.traj.sites()) res.max_level_key = std::max(res.max_level_key, env.level_key(x));
    res.stop = run.traj.stop_reason();
    res.complete = run.complete;
    res.records = std::move(run.records);
    if (r < sp.process_files) {
      try {
        const auto w = build_processes(res.records, Point{}, sp.process_n, sp.process_T, ec.gamma, std::nullopt, d);
        std::ostringstream os;
        write_process_csv(os, w);
        res.process_csv = os.str();
      } catch (const Error& e) {
        res.process_error = e.what();
      }
    }
    if (sp.dump_steps > 0 && r < sp.dump_replicas) {
      std::ostringstream os;
      if (sp.dump_format == "binary")
        write_trajectory_binary(os, run.traj, d, sp.dump_steps);
      else
        write_trajectory_jsonl(os, run.traj, d, sp.dump_steps);
      res.dump = os.str();
    }
    progress.tick();
  });

  auto& summary = out.open("summary.csv");
  summary << "replica,env_seed,duration,skeleton,bounces,max_level,confirmed,censored,complete,stop\n";
  auto& regen = out.open("regenerations.jsonl");
  json ledger = json::array();
  StatsReport report;
  std::vector<double> increments;
  std::size_t complete = 0;
  json process_errors = json::object();
  for (std::size_t r = 0; r < results.size(); ++r) {
    const Result& res = results[r];
    const std::size_t conf = confirmed_count(res.records);
    summary << r << ',' << res.env_seed << ',' << res.duration << ',' << res.skeleton << ',' << res.bounces << ','
            << static_cast<double>(res.max_level_key) / m.env.ell_norm() << ',' << conf << ','
            << res.records.size() - conf << ',' << (res.complete ? 1 : 0) << ',' << stop_name(res.stop) << '\n';
    for (std::size_t k = 0; k < res.records.size(); ++k) {
      const auto& rec = res.records[k];
      regen << json{{"replica", r},     {"k", k + 1},         {"tau", rec.tau}, {"point", point_json(rec.point, d)},
                    {"chi", rec.chi}, {"censored", rec.censored}}
                   .dump()
            << '\n';
      if (!rec.censored && k > 0 && !res.records[k - 1].censored)
        increments.push_back(static_cast<double>(rec.tau - res.records[k - 1].tau));
    }
    if (res.complete) ++complete;
    if (!res.process_csv.empty()) out.open("process_" + std::to_string(r) + ".csv") << res.process_csv;
    if (!res.process_error.empty()) process_errors[std::to_string(r)] = res.process_error;
    if (!res.dump.empty())
      out.open("trajectory_" + std::to_string(r) + (sp.dump_format == "binary" ? ".rwtj" : ".jsonl")) << res.dump;
    ledger.push_back({{"replica", r},
                      {"environment_seed", res.env_seed},
                      {"walk_master", derive_seed(m.env.seed, kTagWalk, r)},
                      {"streams", {0}}});
    report.seeds.push_back(res.env_seed);
  }
  report.metrics["replicas"] = sp.replicas;
  report.metrics["complete_replicas"] = complete;
  report.metrics["process_errors"] = process_errors;
  if (increments.size() >= 2) report.metrics["tau_increment"] = to_json(mean_ci(increments));
  return finish(Pipeline::Single, m, ctx, out, std::move(report), ledger, clock);
}

// ---------------------------------------------------------------- pair

std::vector<std::string> run_pair(const Manifest& m, const RunContext& ctx) {
  const RunClock clock;
  const PairParams& pp = m.pair;
  const int d = m.env.d;
  OutputSet out(ctx.out_dir);
  if (pp.replicas == 0) std::cerr << "warning: replica count is 0; writing empty outputs\n";
  const double n_max = pp.n_grid.back();

  struct Row {
    std::int64_t I = 0;
    std::size_t jrl = 0;
    bool separated = false;
    std::size_t J1 = 0, J2 = 0;
    bool box_censored = false;
    bool joint_censored = false;
  };
  struct Result {
    std::uint64_t env_seed = 0;
    std::uint64_t master = 0;
    bool walk_capped = false;
    std::vector<Row> rows;
  };
  std::vector<Result> results(pp.replicas);
  Progress progress(ctx, "pair", pp.replicas);
  parallel_for(pp.replicas, ctx.threads, [&](std::size_t r) {
    Result& res = results[r];
    const EnvConfig ec = replica_env(m.env, kTagPairEnv, r);
    res.env_seed = ec.seed;
    res.master = derive_seed(m.env.seed, kTagPairWalk, r);
    const Environment env(ec);
    WalkOptions wo = m.walk;
    wo.enhanced = true;
    const std::int64_t target = key_for_level(env, n_max + pp.confirm_distance);
    PairTrajectory pair;
    for (int w = 0; w < 2; ++w) {
      Walker walker(env, Point{}, RngStream(res.master, static_cast<std::uint64_t>(w)), wo);
      const StopReason why = walker.run(pp.max_time, target);
      if (why != StopReason::Level) res.walk_capped = true;
      (w == 0 ? pair.walk1 : pair.walk2) = walker.take();
    }
    const auto recs1 = scan_regenerations(env, pair.walk1, pp.confirm_distance, kNoTimeLimit);
    const auto recs2 = scan_regenerations(env, pair.walk2, pp.confirm_distance, kNoTimeLimit);
    const auto joint = scan_joint_levels(env, pair, recs1, recs2, pp.confirm_distance);
    const auto sites = intersection_sites(pair, d);
    Vec drift{};
    try {
      const Vec a = estimate_drift(recs1, d);
      const Vec b = estimate_drift(recs2, d);
      for (int i = 0; i < d; ++i) drift[i] = (a[i] + b[i]) / 2.0;
    } catch (const InsufficientRecords&) {
      drift = ec.ell_unit();
    }
    const Vec u = orthogonal_direction(drift, d);
    for (int n : pp.n_grid) {
      Row row;
      const auto rep = intersection_count_from_sites(env, pair, sites, n, ec.alpha);
      row.I = rep.I_n;
      row.box_censored = rep.censored;
      row.jrl = close_jrl_set(joint, n, pp.epsilon).size();
      bool reached = false;
      for (const auto& j : joint) {
        if (j.censored && j.level <= n) row.joint_censored = true;
        if (!j.censored && j.level > n) reached = true;
      }
      if (!reached) row.joint_censored = true;
      row.separated = separation_event(env, pair, n, u);
      auto below = [&](const std::vector<RegenerationRecord>& recs) {
        std::size_t c = 0;
        for (const auto& rec : recs)
          if (!rec.censored && env.level(rec.point) <= n) ++c;
        return c;
      };
      const std::size_t mcount = std::min(below(recs1), below(recs2));
      if (mcount >= 2) {
        const auto sets = crossing_index_sets(pair, recs1, recs2, mcount - 1);
        row.J1 = sets.J1.size();
        row.J2 = sets.J2.size();
      }
      res.rows.push_back(row);
    }
    progress.tick();
  });

  auto& jsonl = out.open("pairs.jsonl");
  json ledger = json::array();
  StatsReport report;
  const std::size_t G = pp.n_grid.size();
  std::vector<std::vector<double>> I(G), JRL(G), J1(G), J2(G);
  std::vector<std::size_t> sep(G, 0), cens(G, 0);
  for (std::size_t r = 0; r < results.size(); ++r) {
    const Result& res = results[r];
    for (std::size_t g = 0; g < G; ++g) {
      const Row& row = res.rows[g];
      const bool censored = row.box_censored || row.joint_censored || res.walk_capped;
      jsonl << json{{"pair_id", r},
                    {"n", pp.n_grid[g]},
                    {"I_n", row.I},
                    {"JRL_le", row.jrl},
                    {"separated", row.separated},
                    {"J1", row.J1},
                    {"J2", row.J2},
                    {"censor_flags",
                     {{"box", row.box_censored}, {"joint", row.joint_censored}, {"walk_capped", res.walk_capped}}}}
                   .dump()
            << '\n';
      I[g].push_back(static_cast<double>(row.I));
      JRL[g].push_back(static_cast<double>(row.jrl));
      J1[g].push_back(static_cast<double>(row.J1));
      J2[g].push_back(static_cast<double>(row.J2));
      if (row.separated) ++sep[g];
      if (censored) ++cens[g];
    }
    ledger.push_back({{"replica", r}, {"environment_seed", res.env_seed}, {"walk_master", res.master},
                      {"streams", {0, 1}}});
    report.seeds.push_back(res.env_seed);
  }
  auto& csv = out.open("pair_summary.csv");
  csv << "n,pairs,mean_I,se_I,mean_JRL,se_JRL,separated_fraction,mean_J1,mean_J2,censored\n";
  std::vector<std::pair<double, double>> fit_I, fit_JRL;
  json per_n = json::array();
  for (std::size_t g = 0; g < G; ++g) {
    const double n = pp.n_grid[g];
    if (results.empty()) {
      csv << pp.n_grid[g] << ",0,,,,,,,,0\n";
      continue;
    }
    const MeanCI mi = mean_ci(I[g]);
    const MeanCI mj = mean_ci(JRL[g]);
    const double frac = static_cast<double>(sep[g]) / static_cast<double>(results.size());
    csv << pp.n_grid[g] << ',' << results.size() << ',' << mi.mean << ',' << mi.se << ',' << mj.mean << ','
        << mj.se << ',' << frac << ',' << mean_ci(J1[g]).mean << ',' << mean_ci(J2[g]).mean << ',' << cens[g]
        << '\n';
    per_n.push_back({{"n", pp.n_grid[g]}, {"I_n", to_json(mi)}, {"JRL_le", to_json(mj)}, {"separated_fraction", frac},
                     {"censored", cens[g]}});
    fit_I.emplace_back(n, mi.mean);
    fit_JRL.emplace_back(n, mj.mean);
  }
  report.metrics["per_n"] = per_n;
  auto fit = [&](const char* key, const std::vector<std::pair<double, double>>& pts) {
    try {
      report.metrics[key] = to_json(scaling_exponent_fit(pts));
    } catch (const Error& e) {
      report.metrics[key] = {{"error", e.what()}};
    }
  };
  if (G >= 3 && !results.empty()) {
    fit("I_n_slope", fit_I);
    fit("JRL_le_slope", fit_JRL);
  }
  return finish(Pipeline::Pair, m, ctx, out, std::move(report), ledger, clock);
}

// ---------------------------------------------------------------- scaling

std::vector<std::string> run_scaling(const Manifest& m, const RunContext& ctx) {
  const RunClock clock;
  const ScalingParams& sp = m.scaling;
  const int d = m.env.d;
  const double gamma = m.env.gamma;
  OutputSet out(ctx.out_dir);
  if (sp.replicas == 0) std::cerr << "warning: replica count is 0; writing empty outputs\n";
  const int n_max = sp.n_grid.back();
  const auto wanted = static_cast<std::size_t>(std::floor(sp.T * n_max + 1e-9));
  const auto path_time = [&](int n, double t) {
    return static_cast<std::int64_t>(std::floor(inv_scale(static_cast<double>(n), gamma) * t));
  };
  const std::int64_t min_time = path_time(n_max, sp.T);

  struct Result {
    std::uint64_t env_seed = 0;
    bool complete = false;
    std::vector<RegenerationRecord> records;
    std::vector<std::vector<Point>> path;  // [n][t]
    std::int64_t max_chi = 0;
    std::int64_t duration = 0;
  };
  std::vector<Result> results(sp.replicas);
  Progress progress(ctx, "scaling", sp.replicas);
  parallel_for(sp.replicas, ctx.threads, [&](std::size_t r) {
    Result& res = results[r];
    const EnvConfig ec = replica_env(m.env, kTagScaleEnv, r);
    res.env_seed = ec.seed;
    const Environment env(ec);
    RegenerationRunOptions ro;
    ro.confirm_distance = sp.confirm_distance;
    ro.wanted = wanted;
    ro.min_time = min_time;
    ro.walk = m.walk;
    auto run =
        run_until_regenerations(env, Point{}, RngStream(derive_seed(m.env.seed, kTagScaleWalk, r), 0), ro);
    res.complete = run.complete;
    res.records = std::move(run.records);
    for (const auto& rec : res.records)
      if (!rec.censored) res.max_chi = std::max(res.max_chi, rec.chi);
    const std::int64_t dur = run.traj.duration();
    res.duration = dur;
    for (int n : sp.n_grid) {
      std::vector<Point> row;
      for (double t : sp.t_grid) {
        const std::int64_t time = path_time(n, t);
        row.push_back(time <= dur ? run.traj.at(time) : run.traj.at(dur));
      }
      res.path.push_back(std::move(row));
    }
    progress.tick();
  });

  StatsReport report;
  json ledger = json::array();
  for (std::size_t r = 0; r < results.size(); ++r) {
    ledger.push_back({{"replica", r},
                      {"environment_seed", results[r].env_seed},
                      {"walk_master", derive_seed(m.env.seed, kTagScaleWalk, r)},
                      {"streams", {0}}});
    report.seeds.push_back(results[r].env_seed);
  }
  // A replica whose walk hits the skeleton capacity inside a trap keeps
  // duration/Inv(n) as a lower bound for S_n(1) at the scales it misses.
  std::size_t incomplete = 0;
  for (const auto& res : results)
    if (!res.complete) ++incomplete;
  report.metrics["incomplete_replicas"] = incomplete;

  Vec v_hat{};
  std::int64_t count = 0;
  for (const auto& res : results) {
    const std::size_t c = confirmed_count(res.records);
    if (c < 2) continue;
    for (int i = 0; i < d; ++i) v_hat[i] += res.records[c - 1].point[i] - res.records[0].point[i];
    count += static_cast<std::int64_t>(c - 1);
  }
  if (count > 0)
    for (int i = 0; i < d; ++i) v_hat[i] /= static_cast<double>(count);
  else
    v_hat = m.env.ell_unit();
  const Vec v0 = normalized(v_hat, d);
  const auto perp = orthogonal_complement(v0, d);
  json vj = json::array();
  for (int i = 0; i < d; ++i) vj.push_back(v_hat[i]);
  report.metrics["v_hat"] = vj;

  auto& proc = out.open("scaling_processes.csv");
  proc << "replica,n,t";
  for (int i = 0; i < d; ++i) proc << ",Z" << i + 1;
  proc << ",S\n";
  auto& paths = out.open("scaling_paths.csv");
  paths << "replica,n,t,time,parallel";
  for (int i = 1; i < d; ++i) paths << ",perp" << i;
  paths << ",monotone_flag\n";
  auto& clk = out.open("scaling_clock.csv");
  clk << "replica,n,S1,censored\n";
  std::vector<std::vector<double>> S1(sp.n_grid.size());
  std::vector<std::size_t> censored(sp.n_grid.size(), 0);
  std::size_t monotone_flags = 0;
  for (std::size_t r = 0; r < results.size(); ++r) {
    const Result& res = results[r];
    const std::size_t have = confirmed_count(res.records);
    for (std::size_t g = 0; g < sp.n_grid.size(); ++g) {
      const int n = sp.n_grid[g];
      const auto needed = static_cast<std::size_t>(std::floor(sp.T * n + 1e-9));
      double s1 = 0.0;
      bool cut = false;
      if (have >= needed) {
        const auto w = build_processes(res.records, Point{}, n, sp.T, gamma, v_hat, d, sp.t_grid);
        for (std::size_t k = 0; k < sp.t_grid.size(); ++k) {
          proc << r << ',' << n << ',' << sp.t_grid[k];
          for (int i = 0; i < d; ++i) proc << ',' << w.Z[k][i];
          proc << ',' << w.S[k] << '\n';
        }
        s1 = w.S_at(1.0);
      } else {
        const auto k1 = static_cast<std::size_t>(n);
        cut = have < k1;
        if (cut) ++censored[g];
        const std::int64_t t1 = cut ? res.duration : res.records[k1 - 1].tau;
        s1 = static_cast<double>(t1) / inv_scale(static_cast<double>(n), gamma);
      }
      S1[g].push_back(s1);
      clk << r << ',' << n << ',' << s1 << ',' << (cut ? 1 : 0) << '\n';
      const double scale = std::pow(inv_scale(static_cast<double>(n), gamma), gamma);
      double best = -std::numeric_limits<double>::infinity();
      for (std::size_t k = 0; k < sp.t_grid.size(); ++k) {
        const Point& x = res.path[g][k];
        const double par = project(x, v0, d);
        const bool flag = best - par > static_cast<double>(res.max_chi) + 1.0;
        if (flag) ++monotone_flags;
        best = std::max(best, par);
        paths << r << ',' << n << ',' << sp.t_grid[k] << ',' << path_time(n, sp.t_grid[k]) << ',' << par / scale;
        for (const Vec& u : perp) paths << ',' << project(x, u, d) / std::sqrt(scale);
        paths << ',' << (flag ? 1 : 0) << '\n';
      }
    }
  }
  report.metrics["monotone_flags"] = monotone_flags;

  auto& fit = out.open("scaling_fit.csv");
  fit << "n,C_hat,ci_low,ci_high,ks,ks_critical\n";
  json fits = json::array();
  std::vector<double> ks;
  for (std::size_t g = 0; g < sp.n_grid.size() && !results.empty(); ++g) {
    RngStream boot(derive_seed(m.env.seed, kTagBoot, g), 0);
    const ScaleFit f = fit_stable_scale_with_ci(S1[g], gamma, sp.bootstrap, boot);
    const double crit = ks_critical_value(S1[g].size());
    fit << sp.n_grid[g] << ',' << f.scale << ',' << f.ci_low << ',' << f.ci_high << ',' << f.ks << ',' << crit << '\n';
    json fj = to_json(f);
    fj["n"] = sp.n_grid[g];
    fj["ks_critical"] = crit;
    fits.push_back(fj);
    ks.push_back(f.ks);
  }
  report.metrics["C_hat"] = fits;
  report.metrics["censored_clock_values"] = censored;
  bool decreasing = ks.size() >= 2;
  for (std::size_t g = 1; g < ks.size(); ++g) decreasing = decreasing && ks[g] < ks[g - 1];
  report.metrics["ks_decreasing"] = decreasing;
  return finish(Pipeline::Scaling, m, ctx, out, std::move(report), ledger, clock);
}

// ---------------------------------------------------------------- variance

std::vector<std::string> run_variance(const Manifest& m, const RunContext& ctx) {
  const RunClock clock;
  const VarianceParams& vp = m.variance;
  OutputSet out(ctx.out_dir);
  VarianceOptions vo;
  vo.environments = vp.environments;
  vo.walks = vp.walks;
  vo.confirm_distance = vp.confirm_distance;
  vo.walk = m.walk;
  vo.drift = vp.drift;
  vo.threads = ctx.threads;
  const auto scales = geometric_scales(vp.b, vp.k_min, vp.k_max);
  if (ctx.progress)
    std::cerr << "progress pipeline=variance done=0 total=" << vp.environments * vp.walks << '\n';
  const VarianceCurve curve = variance_curve(m.env, vp.functional, scales, vo);
  if (ctx.progress)
    std::cerr << "progress pipeline=variance done=" << vp.environments * vp.walks
              << " total=" << vp.environments * vp.walks << '\n';
  write_variance_csv(out.open("variance_curve.csv"), curve);

  StatsReport report;
  json pts = json::array();
  std::vector<std::pair<double, double>> positive;
  for (const auto& p : curve.points) {
    pts.push_back(to_json(p));
    if (p.variance > 0.0) positive.emplace_back(p.n, p.variance);
  }
  report.metrics["curve"] = pts;
  report.metrics["scales"] = scales;
  if (positive.size() >= 3) {
    try {
      report.metrics["slope"] = to_json(scaling_exponent_fit(positive));
    } catch (const Error& e) {
      report.metrics["slope"] = {{"error", e.what()}};
    }
  }
  report.metrics["positive_points"] = positive.size();
  json ledger = json::array();
  for (std::size_t e = 0; e < vp.environments; ++e) {
    const std::uint64_t es = variance_environment_seed(m.env.seed, e);
    ledger.push_back({{"environment", e},
                      {"environment_seed", es},
                      {"walk_master", variance_walk_master(m.env.seed, e)},
                      {"streams", {0, vp.walks - 1}}});
    report.seeds.push_back(es);
  }
  return finish(Pipeline::Variance, m, ctx, out, std::move(report), ledger, clock);
}

// ---------------------------------------------------------------- stats

std::vector<std::string> run_stats(const Manifest& m, const RunContext& ctx) {
  const RunClock clock;
  const StatsParams& sp = m.stats;
  const EnvConfig& cfg = m.env;
  OutputSet out(ctx.out_dir);
  StatsReport report;
  report.seeds.push_back(cfg.seed);

  // Hashed conductances of horizontal edges on a square block of sites.
  const Environment env(cfg);
  const auto side = static_cast<std::int64_t>(std::ceil(std::sqrt(static_cast<double>(sp.edges))));
  if (side >= kCoordLimit) throw ConfigError("too many edges requested for the coordinate range");
  std::vector<double> cond(sp.edges);
  parallel_for(static_cast<std::size_t>(side), ctx.threads, [&](std::size_t row) {
    for (std::int64_t col = 0; col < side; ++col) {
      const std::size_t i = row * static_cast<std::size_t>(side) + static_cast<std::size_t>(col);
      if (i >= sp.edges) return;
      Point x;
      x[0] = static_cast<std::int32_t>(col - side / 2);
      x[1] = static_cast<std::int32_t>(static_cast<std::int64_t>(row) - side / 2);
      cond[i] = env.base(canonical_edge(x, x + unit(0)));
    }
  });
  if (ctx.progress) std::cerr << "progress pipeline=stats stage=environment\n";
  report.metrics["environment_hill"] = to_json(hill_estimator(cond, sp.hill_k));
  auto& inv = out.open("inv_identity.csv");
  inv << "u,threshold,fraction,se,expected\n";
  json invj = json::array();
  for (double u : sp.inv_levels) {
    const double thr = inv_scale(u, cfg.gamma);
    std::size_t hits = 0;
    for (double c : cond)
      if (c > thr) ++hits;
    const double N = static_cast<double>(cond.size());
    const double p = static_cast<double>(hits) / N;
    const double se = std::sqrt(p * (1.0 - p) / N);
    inv << u << ',' << thr << ',' << p << ',' << se << ',' << 1.0 / u << '\n';
    invj.push_back({{"u", u}, {"threshold", thr}, {"fraction", p}, {"se", se}, {"expected", 1.0 / u}});
  }
  report.metrics["inv_identity"] = invj;

  if (ctx.progress) std::cerr << "progress pipeline=stats stage=stable\n";
  RngStream srng(derive_seed(cfg.seed, kTagStats, 0), 0);
  std::vector<double> draws(sp.stable_draws);
  for (auto& s : draws) s = sample_one_sided_stable(cfg.gamma, srng);
  json lap = json::array();
  for (double l : sp.laplace_points) {
    const double mean = kernels().sum_exp_neg(draws.data(), draws.size(), l) / static_cast<double>(draws.size());
    lap.push_back({{"lambda", l}, {"empirical", mean}, {"expected", std::exp(-std::pow(l, cfg.gamma))}});
  }
  report.metrics["stable_laplace"] = lap;
  if (!draws.empty()) {
    std::vector<double> sub(draws.begin(), draws.begin() + static_cast<std::ptrdiff_t>(std::min<std::size_t>(
                                                              draws.size(), 20'000)));
    const double ks =
        ks_distance_to_cdf(sub, [&](double x) { return one_sided_stable_cdf(x, cfg.gamma); });
    report.metrics["stable_ks_to_cdf"] = {{"ks", ks}, {"critical", ks_critical_value(sub.size())},
                                          {"draws", sub.size()}};
  }

  if (ctx.progress) std::cerr << "progress pipeline=stats stage=appendix\n";
  auto& mom = out.open("truncated_moment.csv");
  mom << "n,value,ci_low,ci_high\n";
  std::vector<MeanCI> moments(sp.moment_n.size());
  parallel_for(sp.moment_n.size(), ctx.threads, [&](std::size_t i) {
    RngStream rng(derive_seed(cfg.seed, kTagStats, 1), i);
    moments[i] = truncated_sum_moment(cfg.gamma, sp.moment_n[i], sp.moment_p, sp.moment_cap, sp.moment_reps, rng);
  });
  std::vector<std::pair<double, double>> mpts;
  json momj = json::array();
  for (std::size_t i = 0; i < moments.size(); ++i) {
    mom << sp.moment_n[i] << ',' << moments[i].mean << ',' << moments[i].ci_low << ',' << moments[i].ci_high << '\n';
    json j = to_json(moments[i]);
    j["n"] = sp.moment_n[i];
    momj.push_back(j);
    mpts.emplace_back(sp.moment_n[i], moments[i].mean);
  }
  report.metrics["truncated_moment"] = momj;
  if (mpts.size() >= 3) {
    try {
      report.metrics["truncated_moment_slope"] = to_json(scaling_exponent_fit(mpts));
    } catch (const Error& e) {
      report.metrics["truncated_moment_slope"] = {{"error", e.what()}};
    }
  }
  auto& tail = out.open("centered_tail.csv");
  tail << "n,threshold,estimate,ci_low,ci_high\n";
  std::vector<TailProbability> tails(sp.tail_n.size());
  parallel_for(sp.tail_n.size(), ctx.threads, [&](std::size_t i) {
    RngStream rng(derive_seed(cfg.seed, kTagStats, 2), i);
    tails[i] = centered_sum_tail(sp.tail_n[i], std::pow(sp.tail_n[i], 0.75), sp.tail_reps, rng);
  });
  json tailj = json::array();
  for (std::size_t i = 0; i < tails.size(); ++i) {
    const double thr = std::pow(sp.tail_n[i], 0.75);
    tail << sp.tail_n[i] << ',' << thr << ',' << tails[i].estimate << ',' << tails[i].ci_low << ','
         << tails[i].ci_high << '\n';
    json j = to_json(tails[i]);
    j["n"] = sp.tail_n[i];
    j["threshold"] = thr;
    tailj.push_back(j);
  }
  report.metrics["centered_tail"] = tailj;
  json ledger = json::array({{{"stage", "environment"}, {"environment_seed", cfg.seed}},
                             {{"stage", "stable"}, {"master", derive_seed(cfg.seed, kTagStats, 0)}, {"streams", {0}}},
                             {{"stage", "moment"}, {"master", derive_seed(cfg.seed, kTagStats, 1)}},
                             {{"stage", "tail"}, {"master", derive_seed(cfg.seed, kTagStats, 2)}}});
  return finish(Pipeline::Stats, m, ctx, out, std::move(report), ledger, clock);
}

std::vector<std::string> run_pipeline(Pipeline p, const Manifest& m, const RunContext& ctx) {
  switch (p) {
    case Pipeline::Single:
      return run_single(m, ctx);
    case Pipeline::Pair:
      return run_pair(m, ctx);
    case Pipeline::Scaling:
      return run_scaling(m, ctx);
    case Pipeline::Variance:
      return run_variance(m, ctx);
    case Pipeline::Stats:
      return run_stats(m, ctx);
  }
  return {};
}

}  // namespace rwrc
