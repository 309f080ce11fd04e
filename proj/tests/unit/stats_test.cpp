#include <doctest.h>

#include <cmath>
#include <vector>

#include "rwrc/errors.hpp"
#include "rwrc/rng.hpp"
#include "rwrc/stats.hpp"

using namespace rwrc;

namespace {

std::vector<double> pareto(double gamma, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 0);
  std::vector<double> v(n);
  for (auto& x : v) x = std::pow(rng.uniform_pos(), -1.0 / gamma);
  return v;
}

std::vector<double> stable_draws(double gamma, std::size_t n, std::uint64_t seed) {
  RngStream rng(seed, 1);
  std::vector<double> v(n);
  for (auto& x : v) x = sample_one_sided_stable(gamma, rng);
  return v;
}

}  // namespace

TEST_CASE("Hill estimator examples") {
  const TailFit f = hill_estimator({std::exp(4.0), std::exp(2.0), std::exp(1.0)}, 2);
  CHECK(f.gamma_hat == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(f.k_used == 2);
  CHECK(f.ci_low <= f.gamma_hat);
  CHECK(f.gamma_hat <= f.ci_high);
  auto x = pareto(0.5, 1'000'000, 1);
  const TailFit big = hill_estimator(x, 10'000);
  CHECK(big.gamma_hat >= 0.48);
  CHECK(big.gamma_hat <= 0.52);
  for (auto& v : x) v *= 7.0;
  CHECK(hill_estimator(x, 10'000).gamma_hat == doctest::Approx(big.gamma_hat).epsilon(1e-12));
  CHECK_THROWS_AS(hill_estimator({2.0, 2.0, 2.0}, 2), DegenerateSample);
  CHECK_THROWS_AS(hill_estimator({2.0, 3.0}, 2), DomainError);
}

TEST_CASE("Hill intervals shrink and cover the truth") {
  const auto x = pareto(0.7, 200'000, 2);
  double prev = 1e9;
  for (std::size_t k : {100u, 1000u, 10000u}) {
    const TailFit f = hill_estimator(x, k);
    CHECK(f.ci_high - f.ci_low < prev);
    prev = f.ci_high - f.ci_low;
    CHECK(f.ci_low <= 0.7);
    CHECK(0.7 <= f.ci_high);
  }
}

TEST_CASE("KS distance examples") {
  CHECK(ks_distance({1, 2, 3}, {1, 2, 3}) == 0.0);
  CHECK(ks_distance({1, 2}, {5, 6, 7}) == 1.0);
  CHECK(ks_distance({1, 2, 3}, {1.5, 2.5}) == doctest::Approx(1.0 / 3.0));
  CHECK(ks_distance({1.5, 2.5}, {1, 2, 3}) == doctest::Approx(1.0 / 3.0));
  CHECK(ks_distance({1, 1, 2}, {1, 2, 2}) == doctest::Approx(1.0 / 3.0));
  CHECK_THROWS_AS(ks_distance({}, {1.0}), EmptySample);
  CHECK(ks_distance_to_cdf({0.5}, [](double x) { return x; }) == doctest::Approx(0.5));
  CHECK(ks_critical_value(std::size_t{100}, std::size_t{100}) == doctest::Approx(1.3581 / (std::sqrt(50.0) + 0.12 + 0.11 / std::sqrt(50.0))).epsilon(1e-3));
}

TEST_CASE("scaling fit examples") {
  std::vector<std::pair<double, double>> exact, flat, noisy;
  RngStream rng(3, 3);
  for (int k = 0; k < 8; ++k) {
    const double n = 16.0 * std::pow(2.0, k);
    exact.push_back({n, std::sqrt(n)});
    flat.push_back({n, 3.0});
    noisy.push_back({n, std::sqrt(n) * (1.0 + 0.05 * rng.normal())});
  }
  const SlopeFit e = scaling_exponent_fit(exact);
  CHECK(std::fabs(e.slope - 0.5) < 1e-9);
  CHECK(std::fabs(scaling_exponent_fit(flat).slope) < 1e-12);
  const SlopeFit f = scaling_exponent_fit(noisy);
  CHECK(f.ci_low <= 0.5);
  CHECK(0.5 <= f.ci_high);
  CHECK_THROWS_AS(scaling_exponent_fit({{1, 1}, {2, 0}, {3, 1}}), NonPositiveValue);
  CHECK_THROWS_AS(scaling_exponent_fit({{1, 1}, {2, 1}}), DomainError);
}

TEST_CASE("half-stable sampler matches the Levy law") {
  const auto s = stable_draws(0.5, 100'000, 4);
  RngStream rng(4, 2);
  std::vector<double> levy(100'000);
  for (auto& x : levy) {
    const double z = rng.normal();
    x = 1.0 / (2.0 * z * z);
  }
  CHECK(ks_distance(s, levy) < ks_critical_value(s.size(), levy.size()));
  const double d = ks_distance_to_cdf(s, [](double x) { return one_sided_stable_cdf(x, 0.5); });
  CHECK(d < ks_critical_value(s.size()));
  for (double x : {0.05, 0.3, 1.0, 4.0, 50.0})
    CHECK(one_sided_stable_cdf(x, 0.5) == doctest::Approx(std::erfc(1.0 / (2.0 * std::sqrt(x)))).epsilon(1e-6));
  for (double x : s) CHECK(x > 0.0);
}

TEST_CASE("stable Laplace transform") {
  for (double g : {0.3, 0.5, 0.7}) {
    const auto s = stable_draws(g, 1'000'000, 5);
    for (double lam : {0.5, 1.0, 2.0}) {
      double m = 0.0;
      for (double x : s) m += std::exp(-lam * x);
      m /= s.size();
      CAPTURE(g);
      CAPTURE(lam);
      CHECK(std::fabs(m - std::exp(-std::pow(lam, g))) < 0.01);
    }
  }
}

TEST_CASE("stable scale fit recovers a known scale") {
  auto s = stable_draws(0.5, 50'000, 6);
  for (auto& x : s) x *= 3.0;
  CHECK(fit_stable_scale(s, 0.5) == doctest::Approx(3.0).epsilon(0.05));
  RngStream rng(6, 6);
  const ScaleFit f = fit_stable_scale_with_ci(s, 0.5, 100, rng);
  CHECK(f.ci_low <= 3.0);
  CHECK(3.0 <= f.ci_high);
  CHECK(f.ks < 0.02);
}

TEST_CASE("mean, correlation and rank test") {
  const MeanCI m = mean_ci({1, 2, 3, 4});
  CHECK(m.mean == doctest::Approx(2.5));
  CHECK(m.se == doctest::Approx(std::sqrt(5.0 / 3.0 / 4.0)));
  std::size_t pairs = 0;
  CHECK(lag1_autocorrelation({{1, 2, 3, 4, 5, 6}}, &pairs) == doctest::Approx(1.0));
  CHECK(pairs == 5);
  CHECK(lag1_autocorrelation({{1, -1, 1, -1, 1, -1}}) == doctest::Approx(-1.0));
  RngStream rng(9, 9);
  std::vector<double> x(400), y(400);
  for (auto& v : x) v = rng.normal() + 0.5;
  for (auto& v : y) v = rng.normal();
  CHECK(mann_whitney_greater(x, y).p_value < 0.01);
  CHECK(mann_whitney_greater(y, x).p_value > 0.5);
  CHECK(quantile({1, 2, 3, 4}, 0.5) == doctest::Approx(2.5));
}

TEST_CASE("nested variance on a hierarchical model") {
  RngStream rng(10, 0);
  std::vector<double> estimates;
  for (int rep = 0; rep < 5; ++rep) {
    std::vector<std::vector<double>> values(400, std::vector<double>(20));
    for (auto& env : values) {
      const double mu = rng.normal();
      for (auto& v : env) v = mu + 2.0 * rng.normal();
    }
    const VariancePoint p = nested_variance_from_values(values);
    CHECK(p.ci_low <= 1.0);
    CHECK(1.0 <= p.ci_high);
    CHECK(p.variance >= 0.0);
    CHECK(p.environments == 400);
    CHECK(p.walks == 20);
  }
  std::vector<std::vector<double>> flat(10, std::vector<double>(5, 1.0));
  CHECK(nested_variance_from_values(flat).variance == 0.0);
}

TEST_CASE("truncated moments") {
  RngStream rng(11, 0);
  const MeanCI one = truncated_sum_moment(0.5, 1, 1.0, 0.0, 1000, rng);
  CHECK(one.mean == 1.0);
  CHECK(one.se == 0.0);
  std::vector<std::pair<double, double>> decaying;
  for (int n : {10, 100, 1000}) {
    // E[min(X/n², 1)] = 2/n - 1/n² for γ = 1/2, so the mean is 2 - 1/n.
    const MeanCI bounded = truncated_sum_moment(0.5, n, 1.0, 0.0, 4000, rng);
    CHECK(std::fabs(bounded.mean - (2.0 - 1.0 / n)) < 5.0 * bounded.se);
    decaying.push_back({static_cast<double>(n), truncated_sum_moment(0.5, n, 2.0, 0.5, 4000, rng).mean});
  }
  CHECK(std::fabs(scaling_exponent_fit(decaying).slope + 1.0) < 0.2);
}

TEST_CASE("centered tail probabilities") {
  RngStream rng(12, 0);
  const TailProbability t1 = centered_sum_tail(1, 0.5, 100000, rng);
  CHECK(t1.estimate == doctest::Approx(0.5).epsilon(0.02));
  CHECK(t1.ci_low <= 0.5);
  CHECK(0.5 <= t1.ci_high);
  const TailProbability t100 = centered_sum_tail(100, 10.0, 200000, rng);
  const double exact = 0.1356265;
  CHECK(std::fabs(t100.estimate - exact) < 4.0 * std::sqrt(exact * (1.0 - exact) / 200000.0));
  CHECK(t100.ci_low < t100.estimate);
  CHECK(t100.estimate < t100.ci_high);
  const TailProbability zero = centered_sum_tail(10, 10.0, 1000, rng);
  CHECK(zero.hits == 0);
  CHECK(zero.ci_high > 0.0);
}
