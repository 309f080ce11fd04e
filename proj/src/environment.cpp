#include "rwrc/environment.hpp"

#include <cmath>

#include "rwrc/errors.hpp"
#include "rwrc/hash.hpp"
#include "rwrc/kernels.hpp"

namespace rwrc {

namespace {

std::uint64_t mix_seed(std::uint64_t seed) { return mix64(seed ^ 0x6a09e667f3bcc909ULL); }

}  // namespace

std::size_t EdgeKeyHash::operator()(const EdgeKey& e) const noexcept {
  PointHash h;
  return h(e.lo) ^ (h(e.hi) * 0x9e3779b97f4a7c15ULL);
}

EdgeKey canonical_edge(const Point& x, const Point& y) {
  if (l1_distance(x, y) != 1) throw NonAdjacent("edge endpoints are not nearest neighbours");
  return x < y ? EdgeKey{x, y} : EdgeKey{y, x};
}

std::uint64_t pack_point(const Point& p) {
  if (!in_window(p)) throw RangeExceeded("lattice coordinate outside the encodable window |x_i| < 2^15");
  std::uint64_t v = 0;
  for (int i = 0; i < kMaxDim; ++i) v |= std::uint64_t(std::uint16_t(std::int16_t(p.c[i]))) << (16 * i);
  return v;
}

double conductance_from_uniform(double u, double gamma) {
  return kmath::exp(-kmath::log(u) * (1.0 / gamma));
}

double edge_uniform(std::uint64_t seed, const EdgeKey& e) {
  return kmath::hash_to_unit(kmath::edge_hash(mix_seed(seed), pack_point(e.lo), pack_point(e.hi)));
}

double base_conductance(const EnvConfig& cfg, const EdgeKey& e) {
  return conductance_from_uniform(edge_uniform(cfg.seed, e), cfg.gamma);
}

double biased_conductance(const EnvConfig& cfg, const EdgeKey& e) {
  const double s = dot(e.lo + e.hi, cfg.ell_unit());
  return base_conductance(cfg, e) * std::exp(cfg.lambda * s);
}

bool is_k_open(const EnvConfig& cfg, const Point& x) { return Environment(cfg).is_k_open(x); }

double inv_scale(double u, double gamma) {
  if (!(u >= 1.0)) throw DomainError("Inv(u) requires u >= 1");
  return std::pow(u, 1.0 / gamma);
}

Environment::Environment(const EnvConfig& cfg, std::shared_ptr<const ConductanceOverrides> overrides)
    : cfg_(cfg),
      mixed_seed_(mix_seed(cfg.seed)),
      inv_gamma_(1.0 / cfg.gamma),
      ell_norm_(cfg.ell_norm()),
      overrides_(std::move(overrides)) {
  cfg_.validate();
  const auto u = cfg_.ell_unit();
  for (int j = 0; j < cfg_.d; ++j) {
    bias_[j] = std::exp(cfg_.lambda * u[j]);
    bias_[j + cfg_.d] = std::exp(-cfg_.lambda * u[j]);
  }
}

double Environment::base(const EdgeKey& e) const {
  if (overrides_) {
    const auto it = overrides_->edges.find(e);
    if (it != overrides_->edges.end()) return it->second;
    if (overrides_->fill) return *overrides_->fill;
  }
  return conductance_from_uniform(edge_uniform(cfg_.seed, e), cfg_.gamma);
}

double Environment::biased(const EdgeKey& e) const {
  return base(e) * std::exp(cfg_.lambda * dot(e.lo + e.hi, cfg_.ell_unit()));
}

void Environment::incident_base(const Point& x, double* out) const {
  const int d = cfg_.d;
  std::uint64_t lo[2 * kMaxDim];
  std::uint64_t hi[2 * kMaxDim];
  const std::uint64_t px = pack_point(x);
  for (int j = 0; j < d; ++j) {
    lo[j] = px;
    hi[j] = pack_point(neighbor(x, d, j));
    lo[j + d] = pack_point(neighbor(x, d, j + d));
    hi[j + d] = px;
  }
  if (overrides_) {
    for (int j = 0; j < 2 * d; ++j) out[j] = base(canonical_edge(x, neighbor(x, d, j)));
    return;
  }
  kernels().edge_conductances(mixed_seed_, lo, hi, 2 * d, inv_gamma_, out);
}

void Environment::site_weights(const Point& x, double* base_out, double* weight_out) const {
  incident_base(x, base_out);
  for (int j = 0; j < 2 * cfg_.d; ++j) weight_out[j] = base_out[j] * bias_[j];
}

bool Environment::is_k_open(const Point& x) const {
  double c[2 * kMaxDim];
  incident_base(x, c);
  const double lo = 1.0 / cfg_.K;
  for (int j = 0; j < 2 * cfg_.d; ++j)
    if (c[j] < lo || c[j] > cfg_.K) return false;
  return true;
}

}  // namespace rwrc
