#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <utility>
#include <vector>

#include "rwrc/rng.hpp"

namespace rwrc {

struct TailFit {
  double gamma_hat = 0.0;
  std::size_t k_used = 0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};

// γ̂ = k / Σ_{i<=k} log(X_(i)/X_(k+1)) over descending order statistics,
// CI γ̂(1 ± 1.96/√k).
TailFit hill_estimator(std::vector<double> samples, std::size_t k);

// One-sided stable law with E[exp(-λS)] = exp(-λ^γ) (Kanter's representation).
double sample_one_sided_stable(double gamma, RngStream& rng);
// Its distribution function, by quadrature of the same representation.
double one_sided_stable_cdf(double x, double gamma);

double ks_distance(std::vector<double> a, std::vector<double> b);
double ks_distance_to_cdf(std::vector<double> a, const std::function<double(double)>& cdf);
// Two-sample critical value c(α) / (√n_e + 0.12 + 0.11/√n_e), n_e = nm/(n+m).
double ks_critical_value(std::size_t n, std::size_t m, double alpha = 0.05);
// One-sample version with n_e = n.
double ks_critical_value(std::size_t n, double alpha = 0.05);

struct SlopeFit {
  double slope = 0.0;
  double intercept = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t points = 0;
};

// Least squares of log(value) on log(n); CI slope ± t_{m-2} se.
SlopeFit scaling_exponent_fit(const std::vector<std::pair<double, double>>& points, double level = 0.95);

struct MeanCI {
  double mean = 0.0;
  double se = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t count = 0;
};
MeanCI mean_ci(const std::vector<double>& x, double z = 1.96);

// Pearson lag-1 autocorrelation pooled over several series (each contributes
// its consecutive pairs).  `pairs` receives
// the number of pairs, so a 95% band around 0 is ±1.96/√pairs.
double lag1_autocorrelation(const std::vector<std::vector<double>>& series, std::size_t* pairs = nullptr);

struct RankTest {
  double U = 0.0;
  double z = 0.0;
  double p_value = 1.0;
};
// One-sided Mann–Whitney test of "x tends to exceed y" (normal approximation
// with tie and continuity corrections).
RankTest mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y);

// Nested (environment, walk) variance: unbiased variance of the per-environment
// means minus the mean within-environment variance divided by the walk count,
// floored at 0.  CI from a jackknife over environments.
struct VariancePoint {
  double n = 0.0;
  double variance = 0.0;
  double raw = 0.0;  // before flooring
  double between = 0.0;
  double correction = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  std::size_t environments = 0;
  std::size_t walks = 0;
};
VariancePoint nested_variance_from_values(const std::vector<std::vector<double>>& values);

// E[(Σ_j min(X_j/n^{1/γ}, n^{-cap_exponent/γ}))^p] for i.i.d. Pareto(γ) on [1, ∞).
MeanCI truncated_sum_moment(double gamma, std::int64_t n, double p, double cap_exponent, std::size_t reps,
                            RngStream& rng);

// Rademacher sums S_n: estimate of P(S_n > threshold) with a Clopper–Pearson
// interval.
struct TailProbability {
  std::uint64_t hits = 0;
  std::uint64_t reps = 0;
  double estimate = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
};
TailProbability centered_sum_tail(std::int64_t n, double threshold, std::uint64_t reps, RngStream& rng);

// Fitted scale C with S ≈ C·𝒮_γ, matching the Laplace transform at λ = 1/median.
double fit_stable_scale(const std::vector<double>& sample, double gamma);

struct ScaleFit {
  double scale = 0.0;
  double ci_low = 0.0;
  double ci_high = 0.0;
  double ks = 0.0;  // sup-distance of S/scale to the stable law
};
ScaleFit fit_stable_scale_with_ci(const std::vector<double>& sample, double gamma, std::size_t bootstrap,
                                  RngStream& rng);

double quantile(std::vector<double> x, double q);

}  // namespace rwrc
