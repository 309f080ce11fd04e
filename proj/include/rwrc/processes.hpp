#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <ostream>
#include <vector>

#include "rwrc/lattice.hpp"
#include "rwrc/regeneration.hpp"

namespace rwrc {

using Vec = std::array<double, kMaxDim>;

// Y_n(t) = X_{τ_⌊tn⌋}/n, Z_n(t) = (X_{τ_⌊tn⌋} − v̂nt)/√n, S_n(t) = τ_⌊tn⌋/Inv(n)
// on a time grid.  The step data (X_{τ_k}, τ_k), k = 0..K, is kept so the
// process can be re-evaluated or shifted; index 0 is the walk's start.
struct ProcessSample {
  int d = 2;
  int n = 1;
  double gamma = 0.5;
  double inv_n = 1.0;  // Inv(n)
  Vec v_hat{};
  std::vector<double> t_grid;
  std::vector<Vec> Y;
  std::vector<Vec> Z;
  std::vector<double> S;
  std::vector<Point> X;
  std::vector<std::int64_t> tau;

  std::size_t index_at(double t) const;
  Vec Y_at(double t) const;
  Vec Z_at(double t) const;
  double S_at(double t) const;
  double horizon() const { return static_cast<double>(X.size() - 1) / n; }
};

// Mean of X_{τ_{k+1}} − X_{τ_k} over k >= 1 among confirmed records.
Vec estimate_drift(const std::vector<RegenerationRecord>& records, int d);

// Default grid: t = k/n for k = 0..⌊Tn⌋.
std::vector<double> step_grid(int n, double T);

// Needs ⌊Tn⌋ confirmed records after the start (τ_1 .. τ_⌊Tn⌋).
ProcessSample build_processes(const std::vector<RegenerationRecord>& records, const Point& start, int n,
                              double T, double gamma, std::optional<Vec> v_hat, int d,
                              std::vector<double> t_grid = {});

// W*_n(t) = W_n(t + 1/n) − W_n(1/n) on the grid points t with t + 1/n inside
// the original horizon.
ProcessSample shift_process(const ProcessSample& w);

void write_process_csv(std::ostream& os, const ProcessSample& w);

}  // namespace rwrc
