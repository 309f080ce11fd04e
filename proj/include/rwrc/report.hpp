#pragma once

#include <cstdint>
#include <json.hpp>
#include <string>
#include <vector>

#include "rwrc/config.hpp"
#include "rwrc/stats.hpp"

namespace rwrc {

// Estimator outputs with the configuration and seeds that produced them.
// Wall-clock data lives under "run" so the rest is reproducible bit-exact.
struct StatsReport {
  std::string experiment;
  nlohmann::json config = nlohmann::json::object();
  nlohmann::json metrics = nlohmann::json::object();
  std::vector<std::uint64_t> seeds;
  double runtime_seconds = 0.0;

  nlohmann::json to_json() const;
};

nlohmann::json to_json(const EnvConfig& cfg);
nlohmann::json to_json(const TailFit& f);
nlohmann::json to_json(const SlopeFit& f);
nlohmann::json to_json(const MeanCI& m);
nlohmann::json to_json(const VariancePoint& p);
nlohmann::json to_json(const ScaleFit& f);
nlohmann::json to_json(const TailProbability& t);

}  // namespace rwrc
