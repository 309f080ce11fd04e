#include "rwrc/processes.hpp"

#include <cmath>
#include <iomanip>

#include "rwrc/environment.hpp"
#include "rwrc/errors.hpp"

namespace rwrc {

namespace {

void evaluate(ProcessSample& w) {
  const std::size_t m = w.t_grid.size();
  w.Y.assign(m, Vec{});
  w.Z.assign(m, Vec{});
  w.S.assign(m, 0.0);
  for (std::size_t i = 0; i < m; ++i) {
    w.Y[i] = w.Y_at(w.t_grid[i]);
    w.Z[i] = w.Z_at(w.t_grid[i]);
    w.S[i] = w.S_at(w.t_grid[i]);
  }
}

}  // namespace

std::size_t ProcessSample::index_at(double t) const {
  if (t < 0.0) throw DomainError("process time must be non-negative");
  const auto k = static_cast<std::size_t>(std::floor(t * n + 1e-9));
  if (k >= X.size()) throw GridTooShort("time beyond the available regeneration records");
  return k;
}

Vec ProcessSample::Y_at(double t) const {
  const Point& x = X[index_at(t)];
  Vec y{};
  for (int i = 0; i < d; ++i) y[i] = x[i] / static_cast<double>(n);
  return y;
}

Vec ProcessSample::Z_at(double t) const {
  const Point& x = X[index_at(t)];
  Vec z{};
  const double root = std::sqrt(static_cast<double>(n));
  for (int i = 0; i < d; ++i) z[i] = (x[i] - v_hat[i] * n * t) / root;
  return z;
}

double ProcessSample::S_at(double t) const { return static_cast<double>(tau[index_at(t)]) / inv_n; }

Vec estimate_drift(const std::vector<RegenerationRecord>& records, int d) {
  Vec v{};
  std::size_t count = 0;
  for (std::size_t k = 1; k < records.size(); ++k) {
    if (records[k].censored) break;
    for (int i = 0; i < d; ++i) v[i] += records[k].point[i] - records[k - 1].point[i];
    ++count;
  }
  if (count == 0) throw InsufficientRecords("drift estimate needs two confirmed records");
  for (int i = 0; i < d; ++i) v[i] /= static_cast<double>(count);
  return v;
}

std::vector<double> step_grid(int n, double T) {
  const auto kmax = static_cast<std::size_t>(std::floor(T * n + 1e-9));
  std::vector<double> g(kmax + 1);
  for (std::size_t k = 0; k <= kmax; ++k) g[k] = static_cast<double>(k) / n;
  return g;
}

ProcessSample build_processes(const std::vector<RegenerationRecord>& records, const Point& start, int n,
                              double T, double gamma, std::optional<Vec> v_hat, int d,
                              std::vector<double> t_grid) {
  if (n < 1) throw DomainError("process scale n must be positive");
  if (T < 0.0) throw DomainError("process horizon T must be non-negative");
  const auto needed = static_cast<std::size_t>(std::floor(T * n + 1e-9));
  if (confirmed_count(records) < needed)
    throw InsufficientRecords("need " + std::to_string(needed) + " confirmed regeneration records");
  ProcessSample w;
  w.d = d;
  w.n = n;
  w.gamma = gamma;
  w.inv_n = inv_scale(static_cast<double>(n), gamma);
  w.v_hat = v_hat ? *v_hat : estimate_drift(records, d);
  w.X.push_back(start);
  w.tau.push_back(0);
  for (std::size_t k = 0; k < needed; ++k) {
    w.X.push_back(records[k].point);
    w.tau.push_back(records[k].tau);
  }
  w.t_grid = t_grid.empty() ? step_grid(n, T) : std::move(t_grid);
  for (double t : w.t_grid)
    if (t > T + 1e-12) throw GridTooShort("grid extends beyond T");
  evaluate(w);
  return w;
}

ProcessSample shift_process(const ProcessSample& w) {
  if (w.X.size() < 2) throw GridTooShort("shift needs the process on [0, 1/n]");
  ProcessSample s = w;
  s.X.clear();
  s.tau.clear();
  for (std::size_t k = 1; k < w.X.size(); ++k) {
    s.X.push_back(w.X[k] - w.X[1]);
    s.tau.push_back(w.tau[k] - w.tau[1]);
  }
  s.t_grid.clear();
  const double limit = s.horizon();
  for (double t : w.t_grid)
    if (std::floor(t * w.n + 1e-9) <= std::floor(limit * w.n + 1e-9)) s.t_grid.push_back(t);
  if (s.t_grid.empty()) throw GridTooShort("no grid point survives the shift");
  evaluate(s);
  return s;
}

void write_process_csv(std::ostream& os, const ProcessSample& w) {
  os << "t";
  for (int i = 0; i < w.d; ++i) os << ",Y" << i + 1;
  for (int i = 0; i < w.d; ++i) os << ",Z" << i + 1;
  os << ",S\n";
  os << std::setprecision(17);
  for (std::size_t r = 0; r < w.t_grid.size(); ++r) {
    os << w.t_grid[r];
    for (int i = 0; i < w.d; ++i) os << ',' << w.Y[r][i];
    for (int i = 0; i < w.d; ++i) os << ',' << w.Z[r][i];
    os << ',' << w.S[r] << '\n';
  }
}

}  // namespace rwrc
