#include "rwrc/variance.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>

#include "rwrc/environment.hpp"
#include "rwrc/errors.hpp"
#include "rwrc/hash.hpp"
#include "rwrc/parallel.hpp"
#include "rwrc/regeneration.hpp"

namespace rwrc {

namespace {

constexpr std::uint64_t kTagEnv = 0x76656e76;
constexpr std::uint64_t kTagWalk = 0x7677616c;
constexpr std::uint64_t kTagPilot = 0x7670696c;
constexpr std::uint64_t kTagPairEnv = 0x7470656e;
constexpr std::uint64_t kTagPairWalk = 0x7470776b;

enum class Kind { Constant, Laplace, ClippedZ, FourierRe, FourierIm };

Kind kind_of(const std::string& name) {
  if (name == "constant") return Kind::Constant;
  if (name == "laplace") return Kind::Laplace;
  if (name == "clipped_z") return Kind::ClippedZ;
  if (name == "fourier_re") return Kind::FourierRe;
  if (name == "fourier_im") return Kind::FourierIm;
  throw ConfigError("unknown functional '" + name + "'");
}

// Fourier groups hold (t, λ_1..λ_{d+1}).
std::size_t fourier_width(int d) { return static_cast<std::size_t>(d) + 2; }

void check_times(const std::vector<double>& ts) {
  double prev = 0.0;
  for (double t : ts) {
    if (!(t > 0.0) || t < prev) throw ConfigError("functional times must be positive and non-decreasing");
    prev = t;
  }
}

std::vector<double> times_of(const FunctionalSpec& f, int d) {
  std::vector<double> ts;
  switch (kind_of(f.name)) {
    case Kind::Constant:
      break;
    case Kind::Laplace:
      for (std::size_t i = 1; i < f.params.size(); i += 2) ts.push_back(f.params[i]);
      break;
    case Kind::ClippedZ:
      ts.push_back(f.params[2]);
      break;
    case Kind::FourierRe:
    case Kind::FourierIm: {
      const std::size_t w = fourier_width(d);
      for (std::size_t i = 0; i < f.params.size(); i += w) ts.push_back(f.params[i]);
      break;
    }
  }
  return ts;
}

double fourier_phase(const FunctionalSpec& f, const ProcessSample& w) {
  const std::size_t width = fourier_width(w.d);
  double phase = 0.0;
  Vec z_prev{};
  double s_prev = 0.0;
  for (std::size_t i = 0; i < f.params.size(); i += width) {
    const double t = f.params[i];
    const Vec z = w.Z_at(t);
    const double s = w.S_at(t);
    for (int c = 0; c < w.d; ++c) phase += f.params[i + 1 + static_cast<std::size_t>(c)] * (z[c] - z_prev[c]);
    phase += f.params[i + 1 + static_cast<std::size_t>(w.d)] * (s - s_prev);
    z_prev = z;
    s_prev = s;
  }
  return phase;
}

std::size_t records_needed(double horizon, int n) {
  return static_cast<std::size_t>(std::floor(horizon * n + 1.0 + 1e-9));
}

EnvConfig environment_config(const EnvConfig& cfg, std::uint64_t tag, std::uint64_t index) {
  EnvConfig c = cfg;
  c.seed = derive_seed(cfg.seed, tag, index);
  return c;
}

}  // namespace

void validate_functional(const FunctionalSpec& f, int d) {
  const Kind k = kind_of(f.name);
  const auto& p = f.params;
  switch (k) {
    case Kind::Constant:
      if (p.size() != 1) throw ConfigError("constant functional takes one value");
      break;
    case Kind::Laplace:
      if (p.empty() || p.size() % 2 != 0) throw ConfigError("laplace functional takes (theta, t) pairs");
      for (std::size_t i = 0; i < p.size(); i += 2)
        if (!(p[i] >= 0.0)) throw ConfigError("laplace weights must be non-negative");
      break;
    case Kind::ClippedZ:
      if (p.size() != 3) throw ConfigError("clipped_z functional takes component, clip, t");
      if (p[0] != std::floor(p[0]) || p[0] < 1 || p[0] > d)
        throw ConfigError("clipped_z component must be an integer in 1..d");
      if (!(p[1] > 0.0)) throw ConfigError("clipped_z clip must be positive");
      break;
    case Kind::FourierRe:
    case Kind::FourierIm:
      if (p.empty() || p.size() % fourier_width(d) != 0)
        throw ConfigError("fourier functional takes groups of t and d+1 frequencies");
      break;
  }
  check_times(times_of(f, d));
}

double functional_horizon(const FunctionalSpec& f, int d) {
  const auto ts = times_of(f, d);
  return ts.empty() ? 0.0 : *std::max_element(ts.begin(), ts.end());
}

bool functional_uses_position(const FunctionalSpec& f) {
  const Kind k = kind_of(f.name);
  return k == Kind::ClippedZ || k == Kind::FourierRe || k == Kind::FourierIm;
}

double evaluate_functional(const FunctionalSpec& f, const ProcessSample& w) {
  switch (kind_of(f.name)) {
    case Kind::Constant:
      return f.params.at(0);
    case Kind::Laplace: {
      double e = 0.0, prev = 0.0;
      for (std::size_t i = 0; i + 1 < f.params.size(); i += 2) {
        const double s = w.S_at(f.params[i + 1]);
        e += f.params[i] * (s - prev);
        prev = s;
      }
      return std::exp(-e);
    }
    case Kind::ClippedZ: {
      const auto c = static_cast<std::size_t>(f.params[0]) - 1;
      const double clip = f.params[1];
      return std::clamp(w.Z_at(f.params[2])[c], -clip, clip);
    }
    case Kind::FourierRe:
      return std::cos(fourier_phase(f, w));
    case Kind::FourierIm:
      return std::sin(fourier_phase(f, w));
  }
  return 0.0;
}

std::uint64_t variance_environment_seed(std::uint64_t master, std::size_t e) {
  return derive_seed(master, kTagEnv, e);
}

std::uint64_t variance_walk_master(std::uint64_t master, std::size_t e) { return derive_seed(master, kTagWalk, e); }

std::vector<int> geometric_scales(double b, int k_min, int k_max) {
  if (!(b > 1.0 && b < 2.0)) throw ConfigError("scale base b must lie in (1, 2)");
  if (k_min > k_max) throw ConfigError("empty scale range");
  std::vector<int> out;
  for (int k = k_min; k <= k_max; ++k) {
    const int n = static_cast<int>(std::ceil(std::pow(b, k) - 1e-9));
    if (out.empty() || n > out.back()) out.push_back(n);
  }
  return out;
}

Vec pilot_drift(const EnvConfig& cfg, const VarianceOptions& opts) {
  const Environment env(environment_config(cfg, kTagPilot, 0));
  const std::uint64_t master = derive_seed(cfg.seed, kTagPilot, 1);
  Vec sum{};
  std::int64_t count = 0;
  for (std::size_t j = 0; j < opts.pilot_walks; ++j) {
    RegenerationRunOptions ro;
    ro.confirm_distance = opts.confirm_distance;
    ro.wanted = opts.pilot_records;
    ro.walk = opts.walk;
    const auto run = run_until_regenerations(env, Point{}, RngStream(master, j), ro);
    const std::size_t m = confirmed_count(run.records);
    if (m < 2) continue;
    for (int i = 0; i < cfg.d; ++i) sum[i] += run.records[m - 1].point[i] - run.records[0].point[i];
    count += static_cast<std::int64_t>(m - 1);
  }
  if (count == 0) throw InsufficientRecords("pilot walks produced no regeneration increments");
  for (int i = 0; i < cfg.d; ++i) sum[i] /= static_cast<double>(count);
  return sum;
}

std::vector<double> walk_functional_values(const Environment& env, const FunctionalSpec& f,
                                           const std::vector<int>& scales, const Vec& drift, RngStream rng,
                                           const VarianceOptions& opts) {
  if (kind_of(f.name) == Kind::Constant) return std::vector<double>(scales.size(), f.params.at(0));
  const int d = env.dim();
  const double horizon = functional_horizon(f, d);
  std::size_t wanted = 0;
  for (int n : scales) wanted = std::max(wanted, records_needed(horizon, n));
  RegenerationRunOptions ro;
  ro.confirm_distance = opts.confirm_distance;
  ro.wanted = wanted;
  ro.walk = opts.walk;
  const auto run = run_until_regenerations(env, Point{}, std::move(rng), ro);
  if (!run.complete)
    throw InsufficientRecords("walk stopped after " + std::to_string(confirmed_count(run.records)) + " of " +
                              std::to_string(wanted) + " regeneration records");
  std::vector<double> out;
  out.reserve(scales.size());
  for (int n : scales) {
    const double T = static_cast<double>(records_needed(horizon, n)) / n;
    const auto w = build_processes(run.records, Point{}, n, T, env.config().gamma, drift, d, {0.0});
    out.push_back(evaluate_functional(f, shift_process(w)));
  }
  return out;
}

VarianceCurve variance_curve(const EnvConfig& cfg, const FunctionalSpec& f, const std::vector<int>& scales,
                             const VarianceOptions& opts) {
  validate_functional(f, cfg.d);
  if (opts.environments < 3 || opts.walks < 2)
    throw ConfigError("variance needs at least 3 environments and 2 walks per environment");
  for (std::size_t i = 0; i < scales.size(); ++i)
    if (scales[i] < 1 || (i > 0 && scales[i] <= scales[i - 1]))
      throw ConfigError("scales must be positive and strictly increasing");
  const Vec drift = functional_uses_position(f) ? (opts.drift ? *opts.drift : pilot_drift(cfg, opts)) : Vec{};
  // values[e][w][s]
  std::vector<std::vector<std::vector<double>>> values(opts.environments,
                                                       std::vector<std::vector<double>>(opts.walks));
  parallel_for(opts.environments * opts.walks, opts.threads, [&](std::size_t item) {
    const std::size_t e = item / opts.walks;
    const std::size_t j = item % opts.walks;
    EnvConfig ec = cfg;
    ec.seed = variance_environment_seed(cfg.seed, e);
    const Environment env(ec);
    values[e][j] = walk_functional_values(env, f, scales, drift, RngStream(variance_walk_master(cfg.seed, e), j), opts);
  });
  VarianceCurve curve;
  curve.scales = scales;
  curve.environments_per_scale = opts.environments;
  curve.walks_per_environment = opts.walks;
  for (std::size_t s = 0; s < scales.size(); ++s) {
    std::vector<std::vector<double>> at(opts.environments);
    for (std::size_t e = 0; e < opts.environments; ++e)
      for (std::size_t j = 0; j < opts.walks; ++j) at[e].push_back(values[e][j][s]);
    VariancePoint p = nested_variance_from_values(at);
    p.n = scales[s];
    curve.points.push_back(p);
  }
  return curve;
}

VariancePoint nested_variance(const EnvConfig& cfg, const FunctionalSpec& f, int n, const VarianceOptions& opts) {
  return variance_curve(cfg, f, {n}, opts).points.front();
}

TwoWalkEstimate two_walk_variance(const EnvConfig& cfg, const FunctionalSpec& f, int n, std::size_t replicates,
                                  const VarianceOptions& opts) {
  validate_functional(f, cfg.d);
  if (replicates < 2) throw ConfigError("two-walk estimator needs at least 2 replicates");
  const Vec drift = functional_uses_position(f) ? (opts.drift ? *opts.drift : pilot_drift(cfg, opts)) : Vec{};
  std::vector<double> diff(replicates);
  parallel_for(replicates, opts.threads, [&](std::size_t r) {
    const std::uint64_t master = derive_seed(cfg.seed, kTagPairWalk, r);
    const Environment shared(environment_config(cfg, kTagPairEnv, 3 * r));
    const Environment other1(environment_config(cfg, kTagPairEnv, 3 * r + 1));
    const Environment other2(environment_config(cfg, kTagPairEnv, 3 * r + 2));
    const std::vector<int> sc{n};
    const double a = walk_functional_values(shared, f, sc, drift, RngStream(master, 0), opts)[0];
    const double b = walk_functional_values(shared, f, sc, drift, RngStream(master, 1), opts)[0];
    const double c = walk_functional_values(other1, f, sc, drift, RngStream(master, 2), opts)[0];
    const double e = walk_functional_values(other2, f, sc, drift, RngStream(master, 3), opts)[0];
    diff[r] = a * b - c * e;
  });
  const MeanCI m = mean_ci(diff);
  TwoWalkEstimate t;
  t.estimate = m.mean;
  t.se = m.se;
  t.ci_low = m.ci_low;
  t.ci_high = m.ci_high;
  t.replicates = replicates;
  return t;
}

void write_variance_csv(std::ostream& os, const VarianceCurve& curve) {
  os << "n,value,ci_low,ci_high,environments,walks\n" << std::setprecision(17);
  for (const auto& p : curve.points)
    os << static_cast<long long>(p.n) << ',' << p.variance << ',' << p.ci_low << ',' << p.ci_high << ','
       << curve.environments_per_scale << ',' << curve.walks_per_environment << '\n';
}

}  // namespace rwrc
