#pragma once

#include <array>
#include <cstdint>
#include <memory>
#include <optional>
#include <unordered_map>

#include "rwrc/config.hpp"
#include "rwrc/lattice.hpp"

namespace rwrc {

// Undirected nearest-neighbour edge in normal form: lo < hi lexicographically.
struct EdgeKey {
  Point lo;
  Point hi;
  friend bool operator==(const EdgeKey&, const EdgeKey&) = default;
};

struct EdgeKeyHash {
  std::size_t operator()(const EdgeKey& e) const noexcept;
};

EdgeKey canonical_edge(const Point& x, const Point& y);

// 16-bit two's complement per axis; throws RangeExceeded outside the window.
std::uint64_t pack_point(const Point& p);

// Inverse-CDF map of the Pareto(γ) law on [1, ∞): u ∈ (0,1] -> u^{-1/γ}.
double conductance_from_uniform(double u, double gamma);
// Uniform in (0, 1] assigned to edge e under the given seed.
double edge_uniform(std::uint64_t seed, const EdgeKey& e);

double base_conductance(const EnvConfig& cfg, const EdgeKey& e);
double biased_conductance(const EnvConfig& cfg, const EdgeKey& e);
bool is_k_open(const EnvConfig& cfg, const Point& x);
double inv_scale(double u, double gamma);

// Pinned conductances that replace the hashed field (test fixtures and
// controlled experiments).  `fill` applies to every edge not listed.
struct ConductanceOverrides {
  std::optional<double> fill;
  std::unordered_map<EdgeKey, double, EdgeKeyHash> edges;
};

// Hashed field plus precomputed bias factors; immutable and thread-safe.
class Environment {
 public:
  explicit Environment(const EnvConfig& cfg,
                       std::shared_ptr<const ConductanceOverrides> overrides = nullptr);

  const EnvConfig& config() const { return cfg_; }
  int dim() const { return cfg_.d; }

  double base(const EdgeKey& e) const;
  double biased(const EdgeKey& e) const;
  // Base conductances of the 2d edges at x in direction order.
  void incident_base(const Point& x, double* out) const;
  // Relative weights c_*(x, x+e) e^{e·ℓ}; proportional to c([x, x+e]).
  void site_weights(const Point& x, double* base_out, double* weight_out) const;
  bool is_k_open(const Point& x) const;

  double bias_factor(int dir) const { return bias_[dir]; }
  std::int64_t level_key(const Point& x) const { return cfg_.level_key(x); }
  double level(const Point& x) const { return static_cast<double>(level_key(x)) / ell_norm_; }
  double ell_norm() const { return ell_norm_; }

 private:
  EnvConfig cfg_;
  std::uint64_t mixed_seed_;
  double inv_gamma_;
  double ell_norm_;
  std::array<double, 2 * kMaxDim> bias_{};
  std::shared_ptr<const ConductanceOverrides> overrides_;
};

}  // namespace rwrc
