#include "rwrc/walk.hpp"

#include <algorithm>
#include <cmath>

#include "rwrc/errors.hpp"

namespace rwrc {

namespace {

// K-channel weights in the same units as w (so p_K = kw / Σw).
void channel_weights(const Environment& env, const double* base, const double* w, double* kw) {
  const EnvConfig& cfg = env.config();
  const int n = 2 * cfg.d;
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += w[j];
  const double kinv = 1.0 / cfg.K;
  if (cfg.channel == ChannelMode::Printed) {
    double den = 0.0;
    for (int j = 0; j < n; ++j) den += std::max(base[j], cfg.K) * env.bias_factor(j);
    for (int j = 0; j < n; ++j) kw[j] = std::min(base[j], kinv) * env.bias_factor(j) / den * total;
  } else {
    double clamped[2 * kMaxDim];
    double den = 0.0;
    for (int j = 0; j < n; ++j) {
      clamped[j] = std::clamp(base[j], kinv, cfg.K) * env.bias_factor(j);
      den += clamped[j];
    }
    for (int j = 0; j < n; ++j) kw[j] = std::min(w[j], clamped[j] / den * total);
  }
  for (int j = 0; j < n; ++j) kw[j] = std::min(kw[j], w[j]);
}

// Number of successes before the first failure when each trial fails with
// probability q, given a uniform u in (0, 1].
double geometric_count(double u, double q) {
  if (q <= 0.0) return std::numeric_limits<double>::infinity();
  if (q >= 1.0) return 0.0;
  return std::floor(std::log(u) / std::log1p(-q));
}

}  // namespace

std::vector<double> transition_distribution(const Environment& env, const Point& x) {
  const int n = 2 * env.dim();
  double base[2 * kMaxDim];
  double w[2 * kMaxDim];
  env.site_weights(x, base, w);
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += w[j];
  std::vector<double> p(n);
  for (int j = 0; j < n; ++j) p[j] = w[j] / total;
  return p;
}

EnhancedTransition enhanced_transition(const Environment& env, const Point& x) {
  const int n = 2 * env.dim();
  double base[2 * kMaxDim];
  double w[2 * kMaxDim];
  double kw[2 * kMaxDim];
  env.site_weights(x, base, w);
  channel_weights(env, base, w, kw);
  double total = 0.0;
  for (int j = 0; j < n; ++j) total += w[j];
  EnhancedTransition out;
  out.k_channel.resize(n);
  out.defect.resize(n);
  for (int j = 0; j < n; ++j) {
    out.k_channel[j] = kw[j] / total;
    out.defect[j] = w[j] / total - out.k_channel[j];
  }
  return out;
}

Walker::Walker(const Environment& env, const Point& start, RngStream rng, const WalkOptions& opts)
    : env_(&env),
      rng_(std::move(rng)),
      opts_(opts),
      traj_(start, rng_.stream_id(), opts.enhanced),
      d_(env.dim()) {
  load(cur_, start);
  max_key_ = env.level_key(start);
}

void Walker::load(SiteState& s, const Point& x) const {
  double base[2 * kMaxDim];
  s.x = x;
  env_->site_weights(x, base, s.w.data());
  if (opts_.enhanced) channel_weights(*env_, base, s.w.data(), s.kw.data());
}

int Walker::sample(const SiteState& s, int excluded, bool& bit) {
  const int n = 2 * d_;
  double total = 0.0;
  for (int j = 0; j < n; ++j)
    if (j != excluded) total += s.w[j];
  const double target = rng_.uniform() * total;
  double acc = 0.0;
  int pick = -1;
  double offset = 0.0;
  for (int j = 0; j < n; ++j) {
    if (j == excluded) continue;
    if (target < acc + s.w[j]) {
      pick = j;
      offset = target - acc;
      break;
    }
    acc += s.w[j];
  }
  if (pick < 0) {
    for (int j = n - 1; j >= 0; --j)
      if (j != excluded && s.w[j] > 0.0) {
        pick = j;
        offset = 0.0;
        break;
      }
  }
  bit = !opts_.enhanced || offset < s.kw[pick];
  return pick;
}

void Walker::move(int dir, bool bit) {
  const Point y = neighbor(cur_.x, d_, dir);
  if (last_dir_ >= 0 && dir == opposite_dir(last_dir_, d_)) {
    std::swap(cur_, prv_);
  } else {
    std::swap(cur_, prv_);
    load(cur_, y);
  }
  last_dir_ = dir;
  traj_.append(y, bit);
  max_key_ = std::max(max_key_, env_->level_key(y));
}

// Samples the back-and-forth run after arriving at cur_ from prv_.
// Returns false when the run was cut at max_time.
bool Walker::bounce(std::int64_t max_time) {
  const int fwd = last_dir_;
  const int back = opposite_dir(fwd, d_);
  const int n = 2 * d_;
  double tot_a = 0.0, other_a = 0.0, tot_b = 0.0, other_b = 0.0;
  for (int j = 0; j < n; ++j) {
    tot_a += prv_.w[j];
    tot_b += cur_.w[j];
    if (j != fwd) other_a += prv_.w[j];
    if (j != back) other_b += cur_.w[j];
  }
  const double p_ba = cur_.w[back] / tot_b;
  const double q_a = other_a / tot_a;
  const double q_b = other_b / tot_b;
  const double escape = q_b + p_ba * q_a;
  const double m = geometric_count(rng_.uniform_pos(), escape);
  const bool odd = rng_.uniform() * escape < p_ba * q_a;
  double len = 2.0 * m + (odd ? 1.0 : 0.0);
  const double room = static_cast<double>(max_time - traj_.duration());
  bool cut = false;
  if (len > room) {
    len = room;
    cut = true;
  }
  const auto extra = static_cast<std::int64_t>(len);
  std::int64_t defect_back = 0, defect_forth = 0;
  if (opts_.enhanced) {
    const double qd_b = 1.0 - cur_.kw[back] / cur_.w[back];
    const double qd_a = 1.0 - prv_.kw[fwd] / prv_.w[fwd];
    const double jb = geometric_count(rng_.uniform_pos(), qd_b);
    const double ja = geometric_count(rng_.uniform_pos(), qd_a);
    const std::int64_t n_back = (extra + 1) / 2;
    const std::int64_t n_forth = extra / 2;
    if (jb < static_cast<double>(n_back)) defect_back = 2 * static_cast<std::int64_t>(jb) + 1;
    if (ja < static_cast<double>(n_forth)) defect_forth = 2 * static_cast<std::int64_t>(ja) + 2;
  }
  traj_.append_bounce(extra, defect_back, defect_forth);
  if (extra & 1) {
    std::swap(cur_, prv_);
    last_dir_ = back;
  }
  return !cut;
}

StopReason Walker::run(std::int64_t max_time, std::optional<std::int64_t> stop_level_key) {
  if (exhausted_) return traj_.stop_reason();
  StopReason reason = StopReason::None;
  while (reason == StopReason::None) {
    if (traj_.duration() >= max_time) {
      reason = StopReason::Steps;
      break;
    }
    if (traj_.skeleton_size() >= opts_.max_skeleton) {
      reason = StopReason::Capacity;
      exhausted_ = true;
      break;
    }
    int excluded = -1;
    if (opts_.accelerate && last_dir_ >= 0) {
      const int back = opposite_dir(last_dir_, d_);
      double tot_a = 0.0, tot_b = 0.0;
      for (int j = 0; j < 2 * d_; ++j) {
        tot_a += prv_.w[j];
        tot_b += cur_.w[j];
      }
      const double r = (prv_.w[last_dir_] / tot_a) * (cur_.w[back] / tot_b);
      if (r >= opts_.bounce_threshold) {
        if (!bounce(max_time)) {
          reason = StopReason::Steps;
          exhausted_ = true;
          break;
        }
        if (traj_.duration() >= max_time) {
          reason = StopReason::Steps;
          break;
        }
        excluded = opposite_dir(last_dir_, d_);
      }
    }
    bool bit = true;
    const int dir = sample(cur_, excluded, bit);
    move(dir, bit);
    if (stop_level_key && env_->level_key(cur_.x) >= *stop_level_key) reason = StopReason::Level;
  }
  traj_.set_stop_reason(reason);
  return reason;
}

namespace {

Trajectory dense_walk(const Environment& env, const Point& x0, RngStream& rng, std::int64_t steps,
                      bool enhanced) {
  if (steps < 0) throw DomainError("steps must be non-negative");
  WalkOptions opts;
  opts.enhanced = enhanced;
  opts.accelerate = false;
  opts.max_skeleton = std::numeric_limits<std::size_t>::max();
  Walker w(env, x0, rng, opts);
  w.run(steps);
  rng = w.rng();
  return w.take();
}

}  // namespace

Trajectory simulate_path(const Environment& env, const Point& x0, RngStream& rng, std::int64_t steps) {
  return dense_walk(env, x0, rng, steps, false);
}

Trajectory simulate_enhanced(const Environment& env, const Point& x0, RngStream& rng, std::int64_t steps) {
  return dense_walk(env, x0, rng, steps, true);
}

Frame Frame::from(const EnvConfig& cfg) {
  Frame fr;
  fr.d = cfg.d;
  fr.ell = cfg.ell_unit();
  std::vector<std::array<double, kMaxDim>> basis{fr.ell};
  for (int axis = 0; axis < cfg.d && static_cast<int>(basis.size()) < cfg.d; ++axis) {
    std::array<double, kMaxDim> v{};
    v[axis] = 1.0;
    for (const auto& b : basis) {
      double p = 0.0;
      for (int i = 0; i < kMaxDim; ++i) p += v[i] * b[i];
      for (int i = 0; i < kMaxDim; ++i) v[i] -= p * b[i];
    }
    double nn = 0.0;
    for (double c : v) nn += c * c;
    if (nn < 1e-12) continue;
    nn = std::sqrt(nn);
    for (double& c : v) c /= nn;
    basis.push_back(v);
  }
  for (std::size_t j = 1; j < basis.size(); ++j) fr.f[j - 1] = basis[j];
  return fr;
}

double Frame::along(const Point& v) const { return dot(v, ell); }

double Frame::across(const Point& v) const {
  double m = 0.0;
  for (int j = 0; j + 1 < d; ++j) m = std::max(m, std::fabs(dot(v, f[j])));
  return m;
}

bool TiltedBox::contains(const Frame& frame, const Point& x) const {
  constexpr double eps = 1e-9;
  const Point v = x - center;
  return std::fabs(frame.along(v)) <= L + eps && frame.across(v) <= Lp + eps;
}

std::optional<std::int64_t> hitting_time(const Trajectory& traj, const PointPredicate& in_set, bool strict) {
  if (!strict && in_set(traj.start())) return 0;
  std::optional<std::int64_t> hit;
  traj.for_each_event(0, [&](const StepEvent& ev) {
    if (in_set(ev.to)) {
      hit = ev.n;
      return false;
    }
    return true;
  });
  return hit;
}

std::optional<std::int64_t> level_hitting_time(const Trajectory& traj, const Environment& env, double R) {
  return hitting_time(traj, [&](const Point& x) { return env.level(x) > R; });
}

std::optional<std::int64_t> exit_time(const Trajectory& traj, const Frame& frame, const TiltedBox& box) {
  return hitting_time(traj, [&](const Point& x) { return !box.contains(frame, x); });
}

}  // namespace rwrc
