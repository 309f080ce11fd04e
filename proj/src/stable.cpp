#include <algorithm>
#include <boost/math/constants/constants.hpp>
#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <cmath>

#include "rwrc/errors.hpp"
#include "rwrc/kernels.hpp"
#include "rwrc/stats.hpp"

namespace rwrc {

namespace {

constexpr double kPi = boost::math::constants::pi<double>();

void check_gamma(double gamma) {
  if (!(gamma > 0.0 && gamma < 1.0)) throw DomainError("stable index must lie in (0, 1)");
}

// log of Kanter's A(u) = [sin(γu)/sin u]^{1/(1-γ)} · sin((1-γ)u)/sin(γu).
double log_kanter_a(double u, double gamma) {
  const double sg = std::log(std::sin(gamma * u));
  const double s1 = std::log(std::sin(u));
  const double sc = std::log(std::sin((1.0 - gamma) * u));
  return (sg - s1) / (1.0 - gamma) + sc - sg;
}

}  // namespace

double sample_one_sided_stable(double gamma, RngStream& rng) {
  check_gamma(gamma);
  const double u = (rng.uniform() + 0x1.0p-54) * kPi;
  const double e = rng.exponential();
  return std::exp((1.0 - gamma) / gamma * (log_kanter_a(u, gamma) - std::log(e)));
}

double one_sided_stable_cdf(double x, double gamma) {
  check_gamma(gamma);
  if (!(x > 0.0)) return 0.0;
  if (std::isinf(x)) return 1.0;
  const double log_scale = -gamma / (1.0 - gamma) * std::log(x);
  auto f = [&](double u) {
    if (u <= 0.0 || u >= kPi) return 0.0;
    const double a = log_kanter_a(u, gamma) + log_scale;
    if (a > 700.0) return 0.0;
    return std::exp(-std::exp(a));
  };
  const double v = boost::math::quadrature::gauss_kronrod<double, 31>::integrate(f, 0.0, kPi, 15, 1e-12);
  return std::clamp(v / kPi, 0.0, 1.0);
}

double fit_stable_scale(const std::vector<double>& sample, double gamma) {
  check_gamma(gamma);
  if (sample.size() < 2) throw EmptySample("scale fit needs at least two values");
  for (double s : sample)
    if (!(s > 0.0)) throw NonPositiveValue("scale fit needs positive values");
  const double med = quantile(sample, 0.5);
  const double rate = 1.0 / med;
  const double m = kernels().sum_exp_neg(sample.data(), sample.size(), rate) / static_cast<double>(sample.size());
  if (!(m > 0.0 && m < 1.0)) throw DegenerateSample("Laplace transform estimate is degenerate");
  return std::pow(-std::log(m), 1.0 / gamma) / rate;
}

ScaleFit fit_stable_scale_with_ci(const std::vector<double>& sample, double gamma, std::size_t bootstrap,
                                  RngStream& rng) {
  ScaleFit r;
  r.scale = fit_stable_scale(sample, gamma);
  std::vector<double> boots;
  std::vector<double> resample(sample.size());
  for (std::size_t b = 0; b < bootstrap; ++b) {
    for (auto& v : resample) v = sample[rng.below(sample.size())];
    try {
      boots.push_back(fit_stable_scale(resample, gamma));
    } catch (const DegenerateSample&) {
    }
  }
  if (boots.empty()) {
    r.ci_low = r.ci_high = r.scale;
  } else {
    r.ci_low = quantile(boots, 0.025);
    r.ci_high = quantile(boots, 0.975);
  }
  std::vector<double> scaled;
  scaled.reserve(sample.size());
  for (double s : sample) scaled.push_back(s / r.scale);
  r.ks = ks_distance_to_cdf(std::move(scaled), [gamma](double x) { return one_sided_stable_cdf(x, gamma); });
  return r;
}

}  // namespace rwrc
