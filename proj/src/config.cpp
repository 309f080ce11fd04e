#include "rwrc/config.hpp"

#include <yaml-cpp/yaml.h>

#include <cmath>
#include <cstdlib>

#include "rwrc/errors.hpp"
#include "rwrc/yaml_util.hpp"

namespace rwrc {

std::string to_string(ChannelMode m) { return m == ChannelMode::Printed ? "printed" : "clamped"; }

ChannelMode parse_channel_mode(const std::string& s) {
  if (s == "printed") return ChannelMode::Printed;
  if (s == "clamped") return ChannelMode::Clamped;
  throw ConfigError("unknown channel mode '" + s + "' (expected printed or clamped)");
}

void EnvConfig::validate() const {
  if (d < 2 || d > kMaxDim)
    throw ConfigError("d must be in [2, " + std::to_string(kMaxDim) + "], got " + std::to_string(d));
  if (!(gamma > 0.0 && gamma < 1.0)) throw ConfigError("gamma must lie in (0,1)");
  if (!(lambda >= 0.0) || !std::isfinite(lambda)) throw ConfigError("lambda must be finite and >= 0");
  if (!(K >= 1.0) || !std::isfinite(K)) throw ConfigError("K must be finite and >= 1");
  if (!(alpha > d + 3)) throw ConfigError("alpha must exceed d + 3");
  bool any = false;
  for (int i = 0; i < kMaxDim; ++i) {
    if (i >= d && ell_dir[i] != 0) throw ConfigError("ell has more components than d");
    if (ell_dir[i] < 0) throw ConfigError("ell components must be non-negative");
    if (i > 0 && i < d && ell_dir[i] > ell_dir[i - 1])
      throw ConfigError("ell components must be non-increasing");
    any = any || ell_dir[i] != 0;
  }
  if (!any) throw ConfigError("ell must be non-zero");
}

double EnvConfig::ell_norm() const { return norm2(ell_dir); }

std::array<double, kMaxDim> EnvConfig::ell_unit() const {
  std::array<double, kMaxDim> u{};
  const double n = ell_norm();
  for (int i = 0; i < kMaxDim; ++i) u[i] = ell_dir[i] / n;
  return u;
}

EnvConfig env_config_from_yaml(const YAML::Node& root) {
  if (!root.IsMap()) throw ConfigError("config root must be a mapping");
  EnvConfig cfg;
  cfg.d = yaml_required<int>(root, "d");
  cfg.gamma = yaml_required<double>(root, "gamma");
  cfg.lambda = yaml_required<double>(root, "lambda");
  cfg.K = yaml_required<double>(root, "K");
  cfg.alpha = yaml_required<double>(root, "alpha");
  cfg.seed = yaml_required<std::uint64_t>(root, "seed");
  cfg.ell_dir = Point{};
  if (root["ell"]) {
    const YAML::Node ell = root["ell"];
    if (!ell.IsSequence() || ell.size() == 0 || static_cast<int>(ell.size()) > cfg.d)
      throw ConfigError(yaml_where(ell, "ell") + "expected a list of at most d integers");
    for (std::size_t i = 0; i < ell.size(); ++i)
      cfg.ell_dir[i] = yaml_as<int>(ell[i], "ell");
  } else {
    cfg.ell_dir = unit(0);
  }
  if (root["channel"]) {
    try {
      cfg.channel = parse_channel_mode(yaml_as<std::string>(root["channel"], "channel"));
    } catch (const ConfigError& e) {
      throw ConfigError(yaml_where(root["channel"], "channel") + e.what());
    }
  }
  try {
    cfg.validate();
  } catch (const ConfigError& e) {
    throw ConfigError(yaml_where(root, "") + e.what());
  }
  return cfg;
}

void apply_seed_override(EnvConfig& cfg) {
  const char* s = std::getenv("RWRC_SEED");
  if (!s || !*s) return;
  char* end = nullptr;
  const unsigned long long v = std::strtoull(s, &end, 0);
  if (*end != '\0') throw ConfigError(std::string("RWRC_SEED is not an integer: ") + s);
  cfg.seed = v;
}

}  // namespace rwrc
