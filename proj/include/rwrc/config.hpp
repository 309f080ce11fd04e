#pragma once

#include <array>
#include <cstdint>
#include <string>

#include "rwrc/lattice.hpp"

namespace YAML {
class Node;
}

namespace rwrc {

// How the K-channel sub-kernel p_K of the enhanced walk is formed.
//   Printed: (c_* ∧ 1/K) e^{(x+y)ℓ} / Σ_z (c_* ∨ K) e^{(x+z)ℓ}
//   Clamped: min(p, p̄) where p̄ uses conductances clamped to [1/K, K]
enum class ChannelMode { Printed, Clamped };

std::string to_string(ChannelMode m);
ChannelMode parse_channel_mode(const std::string& s);

struct EnvConfig {
  int d = 2;
  double gamma = 0.5;
  double lambda = 0.5;
  Point ell_dir = unit(0);
  double K = 10.0;
  double alpha = 8.0;
  std::uint64_t seed = 0;
  ChannelMode channel = ChannelMode::Clamped;

  // Throws ConfigError naming the offending field.
  void validate() const;

  double ell_norm() const;
  std::array<double, kMaxDim> ell_unit() const;
  // Integer level key x·ℓ⃗ (unnormalised); level(x) = key / ell_norm().
  std::int64_t level_key(const Point& x) const { return dot(x, ell_dir); }
  double level(const Point& x) const { return static_cast<double>(level_key(x)) / ell_norm(); }
};

// Reads the flat environment keys (d, gamma, lambda, ell, K, alpha, seed and
// the optional channel) from a YAML mapping.  Errors carry line and key.
EnvConfig env_config_from_yaml(const YAML::Node& root);

// Applies RWRC_SEED from the process environment, if set.
void apply_seed_override(EnvConfig& cfg);

}  // namespace rwrc
