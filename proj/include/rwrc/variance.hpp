#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "rwrc/config.hpp"
#include "rwrc/processes.hpp"
#include "rwrc/stats.hpp"
#include "rwrc/walk.hpp"

namespace rwrc {

// Bounded Lipschitz functionals of the shifted process W*_n = (Z*_n, S*_n).
//   constant     [value]
//   laplace      [θ_1, t_1, θ_2, t_2, ...]   exp(−Σ θ_i (S*(t_i) − S*(t_{i−1})))
//   clipped_z    [component, clip, t]        Z*_component(t) clipped to [−clip, clip]
//   fourier_re   [t_1, λ_1 (d+1 values), t_2, λ_2, ...]   cos of Σ λ_i·(w(t_i) − w(t_{i−1}))
//   fourier_im   same parameters, sin of the phase
// Times must be positive and non-decreasing; components are 1-based.
struct FunctionalSpec {
  std::string name;
  std::vector<double> params;
};

// Throws ConfigError on an unknown name or malformed parameters.
void validate_functional(const FunctionalSpec& f, int d);
double functional_horizon(const FunctionalSpec& f, int d);
bool functional_uses_position(const FunctionalSpec& f);
double evaluate_functional(const FunctionalSpec& f, const ProcessSample& wstar);

struct VarianceOptions {
  std::size_t environments = 100;
  std::size_t walks = 50;
  double confirm_distance = 64.0;
  WalkOptions walk;
  // Drift used for Z*; estimated from pilot walks when absent.
  std::optional<Vec> drift;
  std::size_t pilot_walks = 8;
  std::size_t pilot_records = 200;
  unsigned threads = 1;
};

struct VarianceCurve {
  std::vector<int> scales;
  std::vector<VariancePoint> points;
  std::size_t environments_per_scale = 0;
  std::size_t walks_per_environment = 0;
};

// Environment e uses seed variance_environment_seed(cfg.seed, e); its walk j
// uses RngStream(variance_walk_master(cfg.seed, e), j).
std::uint64_t variance_environment_seed(std::uint64_t master, std::size_t e);
std::uint64_t variance_walk_master(std::uint64_t master, std::size_t e);

// ⌈b^k⌉ for k = k_min..k_max with duplicates removed; b must lie in (1, 2).
std::vector<int> geometric_scales(double b, int k_min, int k_max);

// Pooled drift of pilot walks in a dedicated environment.
Vec pilot_drift(const EnvConfig& cfg, const VarianceOptions& opts);

// F(W*_n) of one walk for every scale; the walk runs once to the largest
// record count required.
std::vector<double> walk_functional_values(const Environment& env, const FunctionalSpec& f,
                                           const std::vector<int>& scales, const Vec& drift,
                                           RngStream rng, const VarianceOptions& opts);

VariancePoint nested_variance(const EnvConfig& cfg, const FunctionalSpec& f, int n, const VarianceOptions& opts);
// Every (environment, walk) is simulated once and evaluated at all scales.
VarianceCurve variance_curve(const EnvConfig& cfg, const FunctionalSpec& f, const std::vector<int>& scales,
                             const VarianceOptions& opts);

// Var(E^ω[F]) as E[F(W¹)F(W²)] over two walks sharing an environment minus
// the same product over walks in independent environments.
struct TwoWalkEstimate {
  double estimate = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t replicates = 0;
};
TwoWalkEstimate two_walk_variance(const EnvConfig& cfg, const FunctionalSpec& f, int n, std::size_t replicates,
                                  const VarianceOptions& opts);

// Columns n, value, ci_low, ci_high, environments, walks.
void write_variance_csv(std::ostream& os, const VarianceCurve& curve);

}  // namespace rwrc
