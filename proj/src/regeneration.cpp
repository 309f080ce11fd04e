#include "rwrc/regeneration.hpp"

#include <cmath>
#include <deque>
#include <unordered_map>

#include "rwrc/errors.hpp"

namespace rwrc {

namespace {

std::size_t origin_index(const Trajectory& traj, std::int64_t origin_time) {
  const std::size_t i = traj.piece_of(origin_time);
  if (traj.time(i) != origin_time) throw DomainError("D origin must be a skeleton arrival time");
  return i;
}

}  // namespace

DOutcome detect_D(const Environment& env, const Trajectory& etraj, std::int64_t origin_time,
                  std::int64_t horizon) {
  if (horizon < 0) throw DomainError("horizon must be non-negative");
  if (origin_time + horizon > etraj.duration())
    throw HorizonTooShort("trajectory ends before origin + horizon");
  const std::size_t i0 = origin_index(etraj, origin_time);
  const Point x0 = etraj.site(i0);
  const std::int64_t key0 = env.level_key(x0);
  const std::int64_t last = origin_time + horizon;
  DOutcome out;
  etraj.for_each_event(i0, [&](const StepEvent& ev) {
    if (ev.n > last) return false;
    const bool back = env.level_key(ev.to) <= key0;
    const bool ori = ev.defect && l1_distance(ev.from, x0) <= 1;
    if (back || ori) {
      out.finite = true;
      out.value = ev.n - origin_time;
      out.by_back = back;
      return false;
    }
    return true;
  });
  return out;
}

std::vector<CandidateFate> candidate_fates(const Environment& env, const Trajectory& etraj,
                                           double confirm_distance, std::int64_t horizon) {
  const int d = env.dim();
  const double confirm_key = confirm_distance * env.ell_norm() - 1e-9;
  std::vector<CandidateFate> fates;
  std::deque<std::size_t> active;
  std::unordered_map<Point, std::size_t, PointHash> by_site;
  std::int64_t running_max = env.level_key(etraj.start());

  auto settle = [&](std::size_t idx, CandidateStatus st, std::int64_t n, bool by_back) {
    CandidateFate& f = fates[idx];
    f.status = st;
    f.event_time = n;
    f.by_back = by_back;
    by_site.erase(f.point);
  };

  etraj.for_each_event(0, [&](const StepEvent& ev) {
    if (ev.n > horizon) return false;
    if (ev.defect && !by_site.empty()) {
      for_each_vicinity(ev.from, d, [&](const Point& z) {
        const auto it = by_site.find(z);
        if (it != by_site.end()) settle(it->second, CandidateStatus::Failed, ev.n, false);
      });
    }
    const std::int64_t key = env.level_key(ev.to);
    while (!active.empty()) {
      const std::size_t idx = active.back();
      if (fates[idx].status != CandidateStatus::Open) {
        active.pop_back();
        continue;
      }
      if (fates[idx].level_key < key) break;
      settle(idx, CandidateStatus::Failed, ev.n, true);
      active.pop_back();
    }
    if (key > running_max) {
      const std::int64_t prev_max = running_max;
      running_max = key;
      while (!active.empty()) {
        const std::size_t idx = active.front();
        if (fates[idx].status != CandidateStatus::Open) {
          active.pop_front();
          continue;
        }
        if (static_cast<double>(key - fates[idx].level_key) < confirm_key) break;
        settle(idx, CandidateStatus::Confirmed, ev.n, false);
        active.pop_front();
      }
      if (ev.skeleton && env.is_k_open(ev.to)) {
        CandidateFate f;
        f.index = ev.index;
        f.time = ev.n;
        f.point = ev.to;
        f.level_key = key;
        f.prev_max_key = prev_max;
        fates.push_back(f);
        active.push_back(fates.size() - 1);
        by_site.emplace(ev.to, fates.size() - 1);
      }
    }
    return true;
  });
  return fates;
}

std::int64_t regeneration_box(const Frame& frame, const Trajectory& traj, std::int64_t from, std::int64_t to,
                              double alpha) {
  if (from > to) throw DomainError("regeneration_box requires from <= to");
  const Point base = traj.at(from);
  double along = 0.0, across = 0.0;
  for_each_position(traj, from, to, [&](const Point& x) {
    const Point v = x - base;
    along = std::max(along, std::fabs(frame.along(v)));
    across = std::max(across, frame.across(v));
  });
  auto m = static_cast<std::int64_t>(std::ceil(along - 1e-9));
  if (m < 1) m = 1;
  while (std::pow(static_cast<double>(m), alpha) < across - 1e-9) ++m;
  return m;
}

std::vector<RegenerationRecord> scan_regenerations(const Environment& env, const Trajectory& etraj,
                                                   double confirm_distance, std::int64_t horizon) {
  const std::int64_t limit = std::min(horizon, etraj.duration());
  const auto fates = candidate_fates(env, etraj, confirm_distance, limit);
  const double gap_key = 2.0 / std::sqrt(static_cast<double>(env.dim())) * env.ell_norm() - 1e-9;
  const Frame frame = Frame::from(env.config());
  std::vector<RegenerationRecord> out;
  for (const CandidateFate& f : fates) {
    if (f.status == CandidateStatus::Failed) continue;
    if (!out.empty() && static_cast<double>(f.level_key - out.back().level_key) < gap_key) continue;
    RegenerationRecord r;
    r.tau = f.time;
    r.point = f.point;
    r.censored = f.status == CandidateStatus::Open;
    r.index = f.index;
    r.level_key = f.level_key;
    r.prev_max_key = f.prev_max_key;
    const std::int64_t from = out.empty() ? 0 : out.back().tau;
    r.chi = regeneration_box(frame, etraj, from, r.tau, env.config().alpha);
    out.push_back(r);
  }
  for (std::size_t k = 1; k < out.size(); ++k) {
    const bool ok = out[k].tau > out[k - 1].tau &&
                    static_cast<double>(out[k].level_key - out[k - 1].level_key) >= gap_key &&
                    (!out[k - 1].censored || out[k].censored);
    if (!ok) throw ConsistencyError("regeneration records violate ordering or level spacing");
  }
  return out;
}

std::vector<RegenerationRecord> extract_regenerations(const Environment& env, const Trajectory& etraj,
                                                      double confirm_distance, std::int64_t horizon) {
  auto records = scan_regenerations(env, etraj, confirm_distance, horizon);
  if (confirmed_count(records) == 0) throw NoRegenerationFound("no confirmed regeneration within the horizon");
  return records;
}

std::size_t confirmed_count(const std::vector<RegenerationRecord>& records) {
  std::size_t n = 0;
  for (const auto& r : records) n += r.censored ? 0 : 1;
  return n;
}

RegenerationRun run_until_regenerations(const Environment& env, const Point& start, RngStream rng,
                                        const RegenerationRunOptions& opts) {
  WalkOptions wo = opts.walk;
  wo.enhanced = true;
  Walker walker(env, start, std::move(rng), wo);
  const double cd_key = opts.confirm_distance * env.ell_norm();
  std::int64_t chunk = std::max<std::int64_t>(opts.initial_level_chunk, 1);
  std::int64_t target = env.level_key(start) + chunk + static_cast<std::int64_t>(std::ceil(cd_key));
  RegenerationRun run;
  for (;;) {
    const StopReason why = walker.run(opts.max_time, target);
    run.records = scan_regenerations(env, walker.trajectory(), opts.confirm_distance, kNoTimeLimit);
    if (confirmed_count(run.records) >= opts.wanted && walker.trajectory().duration() >= opts.min_time) {
      run.complete = true;
      break;
    }
    if (why != StopReason::Level) break;
    const std::size_t have = confirmed_count(run.records);
    chunk *= 2;
    if (have >= 8 && have < opts.wanted) {
      // Extrapolate the level still needed from the rate seen so far.
      const double per = static_cast<double>(walker.max_level_key() - env.level_key(start)) / have;
      const auto need = static_cast<std::int64_t>(std::ceil(1.25 * per * (opts.wanted - have) + cd_key));
      chunk = std::clamp<std::int64_t>(need, opts.initial_level_chunk, chunk);
    }
    target = walker.max_level_key() + chunk;
  }
  run.traj = walker.take();
  return run;
}

}  // namespace rwrc
