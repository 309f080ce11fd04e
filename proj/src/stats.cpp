#include "rwrc/stats.hpp"

#include <algorithm>
#include <boost/math/distributions/normal.hpp>
#include <boost/math/distributions/students_t.hpp>
#include <cmath>
#include <numeric>

#include "rwrc/errors.hpp"
#include "rwrc/kernels.hpp"

namespace rwrc {

TailFit hill_estimator(std::vector<double> samples, std::size_t k) {
  if (k == 0 || k >= samples.size()) throw DomainError("Hill estimator needs 0 < k < sample count");
  for (double x : samples)
    if (!(x > 0.0)) throw DomainError("Hill estimator needs positive samples");
  std::nth_element(samples.begin(), samples.begin() + static_cast<std::ptrdiff_t>(k), samples.end(),
                   std::greater<>());
  const double threshold = samples[k];
  if (!(threshold > 0.0)) throw DegenerateSample("X_(k+1) is zero");
  const double s = kernels().sum_log_scaled(samples.data(), k, 1.0 / threshold);
  if (!(s > 0.0)) throw DegenerateSample("top order statistics are all equal");
  TailFit fit;
  fit.k_used = k;
  fit.gamma_hat = static_cast<double>(k) / s;
  const double half = 1.96 / std::sqrt(static_cast<double>(k));
  fit.ci_low = fit.gamma_hat * (1.0 - half);
  fit.ci_high = fit.gamma_hat * (1.0 + half);
  return fit;
}

double ks_distance(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw EmptySample("KS distance needs two non-empty samples");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  const double na = static_cast<double>(a.size());
  const double nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0.0;
  while (i < a.size() && j < b.size()) {
    const double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::fabs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
  }
  return d;
}

double ks_distance_to_cdf(std::vector<double> a, const std::function<double(double)>& cdf) {
  if (a.empty()) throw EmptySample("KS distance needs a non-empty sample");
  std::sort(a.begin(), a.end());
  const double n = static_cast<double>(a.size());
  double d = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double f = cdf(a[i]);
    d = std::max({d, f - static_cast<double>(i) / n, static_cast<double>(i + 1) / n - f});
  }
  return d;
}

namespace {

double ks_coefficient(double alpha) { return std::sqrt(-0.5 * std::log(alpha / 2.0)); }

double ks_scaled(double ne, double alpha) {
  const double r = std::sqrt(ne);
  return ks_coefficient(alpha) / (r + 0.12 + 0.11 / r);
}

}  // namespace

double ks_critical_value(std::size_t n, std::size_t m, double alpha) {
  if (n == 0 || m == 0) throw EmptySample("KS critical value needs non-empty samples");
  const double ne = static_cast<double>(n) * static_cast<double>(m) / static_cast<double>(n + m);
  return ks_scaled(ne, alpha);
}

double ks_critical_value(std::size_t n, double alpha) {
  if (n == 0) throw EmptySample("KS critical value needs a non-empty sample");
  return ks_scaled(static_cast<double>(n), alpha);
}

SlopeFit scaling_exponent_fit(const std::vector<std::pair<double, double>>& points, double level) {
  if (points.size() < 3) throw DomainError("scaling fit needs at least three points");
  std::vector<double> x, y;
  for (const auto& [n, v] : points) {
    if (!(n > 0.0) || !(v > 0.0)) throw NonPositiveValue("log-log fit needs positive scales and values");
    x.push_back(std::log(n));
    y.push_back(std::log(v));
  }
  const double m = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / m;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / m;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxx += (x[i] - mx) * (x[i] - mx);
    sxy += (x[i] - mx) * (y[i] - my);
  }
  if (!(sxx > 0.0)) throw DegenerateSample("scaling fit needs distinct scales");
  SlopeFit f;
  f.points = x.size();
  f.slope = sxy / sxx;
  f.intercept = my - f.slope * mx;
  double ssr = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double r = y[i] - f.intercept - f.slope * x[i];
    ssr += r * r;
  }
  f.se = std::sqrt(ssr / (m - 2.0) / sxx);
  const boost::math::students_t dist(m - 2.0);
  const double tq = boost::math::quantile(dist, 0.5 + level / 2.0);
  f.ci_low = f.slope - tq * f.se;
  f.ci_high = f.slope + tq * f.se;
  return f;
}

MeanCI mean_ci(const std::vector<double>& x, double z) {
  if (x.empty()) throw EmptySample("mean of an empty sample");
  MeanCI c;
  c.count = x.size();
  const double n = static_cast<double>(x.size());
  c.mean = std::accumulate(x.begin(), x.end(), 0.0) / n;
  double ss = 0.0;
  for (double v : x) ss += (v - c.mean) * (v - c.mean);
  c.se = x.size() > 1 ? std::sqrt(ss / (n - 1.0) / n) : 0.0;
  c.ci_low = c.mean - z * c.se;
  c.ci_high = c.mean + z * c.se;
  return c;
}

double lag1_autocorrelation(const std::vector<std::vector<double>>& series, std::size_t* pairs) {
  std::vector<double> a, b;
  for (const auto& s : series)
    for (std::size_t k = 0; k + 1 < s.size(); ++k) {
      a.push_back(s[k]);
      b.push_back(s[k + 1]);
    }
  if (pairs) *pairs = a.size();
  if (a.size() < 3) throw EmptySample("autocorrelation needs at least three lag pairs");
  const double n = static_cast<double>(a.size());
  const double ma = std::accumulate(a.begin(), a.end(), 0.0) / n;
  const double mb = std::accumulate(b.begin(), b.end(), 0.0) / n;
  double sab = 0.0, saa = 0.0, sbb = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  if (!(saa > 0.0) || !(sbb > 0.0)) throw DegenerateSample("constant series");
  return sab / std::sqrt(saa * sbb);
}

RankTest mann_whitney_greater(const std::vector<double>& x, const std::vector<double>& y) {
  if (x.empty() || y.empty()) throw EmptySample("Mann-Whitney needs two non-empty samples");
  std::vector<std::pair<double, int>> all;
  for (double v : x) all.emplace_back(v, 0);
  for (double v : y) all.emplace_back(v, 1);
  std::sort(all.begin(), all.end());
  const double N = static_cast<double>(all.size());
  double rank_x = 0.0, tie_term = 0.0;
  for (std::size_t i = 0; i < all.size();) {
    std::size_t j = i;
    while (j < all.size() && all[j].first == all[i].first) ++j;
    const double avg = (static_cast<double>(i + 1) + static_cast<double>(j)) / 2.0;
    const double t = static_cast<double>(j - i);
    tie_term += t * t * t - t;
    for (std::size_t k = i; k < j; ++k)
      if (all[k].second == 0) rank_x += avg;
    i = j;
  }
  const double n1 = static_cast<double>(x.size());
  const double n2 = static_cast<double>(y.size());
  RankTest r;
  r.U = rank_x - n1 * (n1 + 1.0) / 2.0;
  const double mean = n1 * n2 / 2.0;
  const double var = n1 * n2 / 12.0 * ((N + 1.0) - tie_term / (N * (N - 1.0)));
  if (!(var > 0.0)) return r;
  r.z = (r.U - mean - 0.5) / std::sqrt(var);
  r.p_value = boost::math::cdf(boost::math::complement(boost::math::normal(), r.z));
  return r;
}

namespace {

struct EnvMoments {
  double mean;
  double var_over_w;
};

double nested_raw(const std::vector<EnvMoments>& m, std::size_t skip) {
  double s = 0.0, c = 0.0, count = 0.0;
  for (std::size_t e = 0; e < m.size(); ++e) {
    if (e == skip) continue;
    s += m[e].mean;
    c += m[e].var_over_w;
    count += 1.0;
  }
  const double mean = s / count;
  double ss = 0.0;
  for (std::size_t e = 0; e < m.size(); ++e) {
    if (e == skip) continue;
    ss += (m[e].mean - mean) * (m[e].mean - mean);
  }
  return ss / (count - 1.0) - c / count;
}

}  // namespace

VariancePoint nested_variance_from_values(const std::vector<std::vector<double>>& values) {
  if (values.size() < 3) throw DomainError("nested variance needs at least three environments");
  std::vector<EnvMoments> m;
  std::size_t walks = values.front().size();
  for (const auto& v : values) {
    if (v.size() < 2) throw DomainError("nested variance needs at least two walks per environment");
    walks = std::min(walks, v.size());
    const double w = static_cast<double>(v.size());
    const double mean = std::accumulate(v.begin(), v.end(), 0.0) / w;
    double ss = 0.0;
    for (double x : v) ss += (x - mean) * (x - mean);
    m.push_back({mean, ss / (w - 1.0) / w});
  }
  VariancePoint p;
  p.environments = values.size();
  p.walks = walks;
  const std::size_t none = values.size();
  p.raw = nested_raw(m, none);
  double corr = 0.0;
  for (const auto& e : m) corr += e.var_over_w;
  p.correction = corr / static_cast<double>(m.size());
  p.between = p.raw + p.correction;
  p.variance = std::max(0.0, p.raw);
  const double E = static_cast<double>(m.size());
  std::vector<double> jack;
  for (std::size_t e = 0; e < m.size(); ++e) jack.push_back(nested_raw(m, e));
  const double jm = std::accumulate(jack.begin(), jack.end(), 0.0) / E;
  double ss = 0.0;
  for (double j : jack) ss += (j - jm) * (j - jm);
  const double se = std::sqrt((E - 1.0) / E * ss);
  p.ci_low = std::max(0.0, p.raw - 1.96 * se);
  p.ci_high = std::max(0.0, p.raw + 1.96 * se);
  return p;
}

double quantile(std::vector<double> x, double q) {
  if (x.empty()) throw EmptySample("quantile of an empty sample");
  std::sort(x.begin(), x.end());
  const double pos = q * static_cast<double>(x.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(pos));
  const std::size_t hi = std::min(lo + 1, x.size() - 1);
  const double frac = pos - static_cast<double>(lo);
  return x[lo] + frac * (x[hi] - x[lo]);
}

}  // namespace rwrc
