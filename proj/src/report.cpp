#include "rwrc/report.hpp"

namespace rwrc {

using nlohmann::json;

json StatsReport::to_json() const {
  return json{{"experiment", experiment},
              {"tool_version", RWRC_VERSION},
              {"config", config},
              {"metrics", metrics},
              {"seeds", seeds},
              {"run", {{"runtime_seconds", runtime_seconds}}}};
}

json to_json(const EnvConfig& cfg) {
  json ell = json::array();
  for (int i = 0; i < cfg.d; ++i) ell.push_back(cfg.ell_dir[i]);
  return json{{"d", cfg.d},         {"gamma", cfg.gamma}, {"lambda", cfg.lambda},
              {"ell", ell},         {"K", cfg.K},         {"alpha", cfg.alpha},
              {"seed", cfg.seed},   {"channel", to_string(cfg.channel)}};
}

json to_json(const TailFit& f) {
  return json{{"gamma_hat", f.gamma_hat}, {"k_used", f.k_used}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}};
}

json to_json(const SlopeFit& f) {
  return json{{"slope", f.slope}, {"intercept", f.intercept}, {"se", f.se},
              {"ci_low", f.ci_low}, {"ci_high", f.ci_high}, {"points", f.points}};
}

json to_json(const MeanCI& m) {
  return json{{"mean", m.mean}, {"se", m.se}, {"ci_low", m.ci_low}, {"ci_high", m.ci_high}, {"count", m.count}};
}

json to_json(const VariancePoint& p) {
  return json{{"n", p.n},           {"variance", p.variance},       {"raw", p.raw},
              {"between", p.between}, {"correction", p.correction}, {"ci_low", p.ci_low},
              {"ci_high", p.ci_high}, {"environments", p.environments}, {"walks", p.walks}};
}

json to_json(const ScaleFit& f) {
  return json{{"scale", f.scale}, {"ci_low", f.ci_low}, {"ci_high", f.ci_high}, {"ks", f.ks}};
}

json to_json(const TailProbability& t) {
  return json{{"hits", t.hits}, {"reps", t.reps}, {"estimate", t.estimate}, {"ci_low", t.ci_low},
              {"ci_high", t.ci_high}};
}

}  // namespace rwrc
