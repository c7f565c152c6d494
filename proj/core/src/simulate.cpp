#include <algorithm>
#include <cassert>
#include <cmath>
#include <stdexcept>

#include "asep/simulate.hpp"

namespace asep {

DynamicsSpec DynamicsSpec::bulk(const ModelParams& m) { return {m.p, m.q, m.p, m.q, {}}; }

DynamicsSpec DynamicsSpec::tilted(const ModelParams& m, const TiltedRates& t) {
  return {m.p, m.q, t.pPrime, t.qPrime, {}};
}

void DynamicsSpec::validate() const {
  auto check = [&](double r, double l) {
    if (!(r >= 0.0 && l >= 0.0)) throw std::invalid_argument("rates must be nonnegative");
    if ((p == 0.0 && r > 0.0) || (q == 0.0 && l > 0.0))
      throw std::invalid_argument("modified rate is positive where the bulk rate vanishes");
  };
  if (!(p >= 0.0 && q >= 0.0 && p + q > 0.0)) throw std::invalid_argument("bulk rates must be nonnegative");
  check(pTagged, qTagged);
  for (const auto& o : overrides) check(o.rightRate, o.leftRate);
}

Site Trajectory::tagged_position_at(double microTime) const {
  Site x = initialTaggedSite;
  for (const auto& j : taggedPath) {
    if (j.time > microTime) break;
    x = j.position;
  }
  return x;
}

std::int64_t current(const Trajectory& traj, Site x, double t) {
  for (const auto& c : traj.currents) {
    if (c.site != x) continue;
    std::int64_t j = 0;
    for (const auto& [time, d] : c.crossings) {
      if (time > t) break;
      j += d;
    }
    return j;
  }
  throw std::invalid_argument("site " + std::to_string(x) + " was not tracked");
}

namespace {

struct RateClass {
  double r;
  double l;
  double logR;
  double logL;
  bool modified;
  std::vector<std::uint32_t> members;
};

class Engine {
 public:
  Engine(const LatticeState& s, const DynamicsSpec& spec, double horizon, const SimOptions& opt)
      : spec_(spec), opt_(opt), pos_(s.particles), tag_(s.tagged), n_(s.particles.size()) {
    spec.validate();
    s.validate();
    if (!(horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
    traj_.horizon = horizon;
    traj_.scale = s.scale;
    traj_.initialTaggedSite = s.tagged_site();
    T_ = horizon * static_cast<double>(s.scale);
    windowLo_ = s.windowLo;
    windowHi_ = s.windowHi;

    classOf_.assign(n_, 0);
    slotOf_.assign(n_, 0);
    baseClass_.assign(n_, 0);
    expireOnJump_.assign(n_, 0);
    contrib_.assign(n_, 0.0);

    class_index(spec.p, spec.q);
    const std::uint32_t tagClass = class_index(spec.pTagged, spec.qTagged);
    for (std::size_t i = 0; i < n_; ++i) baseClass_[i] = (i == tag_) ? tagClass : 0;
    std::vector<std::uint32_t> cls = baseClass_;
    for (const auto& o : spec.overrides) {
      auto it = std::lower_bound(pos_.begin(), pos_.end(), o.site);
      if (it == pos_.end() || *it != o.site) throw std::invalid_argument("override site is not occupied");
      const auto i = static_cast<std::size_t>(it - pos_.begin());
      cls[i] = class_index(o.rightRate, o.leftRate);
      expireOnJump_[i] = o.expireOnJump ? 1 : 0;
      if (o.expiryTime < RateOverride::kNever) expiries_.push_back({o.expiryTime, static_cast<std::uint32_t>(i)});
    }
    std::sort(expiries_.begin(), expiries_.end());
    for (std::size_t i = 0; i < n_; ++i) join(static_cast<std::uint32_t>(i), cls[i]);

    snapTimes_ = opt.snapshotTimes;
    std::sort(snapTimes_.begin(), snapTimes_.end());
    for (double& st : snapTimes_) st *= static_cast<double>(s.scale);

    for (Site x : opt.trackedSites) traj_.currents.push_back({x, 0, {}});
    std::sort(traj_.currents.begin(), traj_.currents.end(),
              [](const CurrentRecord& a, const CurrentRecord& b) { return a.site < b.site; });
    for (const auto& c : traj_.currents) trackedSites_.push_back(c.site);

    for (std::size_t i = 0; i < n_; ++i) refresh_contrib(i);
    tagFreeR_ = free_right(tag_);
    tagFreeL_ = free_left(tag_);
  }

  Trajectory run(Rng& rng) {
    double t = 0.0;
    std::size_t snapIdx = 0;
    std::size_t expIdx = 0;
    while (true) {
      while (snapIdx < snapTimes_.size() && snapTimes_[snapIdx] <= t) take_snapshot(snapTimes_[snapIdx++]);
      const double nextSnap = snapIdx < snapTimes_.size() ? snapTimes_[snapIdx] : T_;
      const double nextExp = expIdx < expiries_.size() ? expiries_[expIdx].first : T_;
      const double stop = std::min({T_, nextSnap, nextExp});
      const double dt = total_ > 0.0 ? rng.exponential(total_) : RateOverride::kNever;
      if (t + dt >= stop) {
        t = stop;
        if (stop == nextExp && expIdx < expiries_.size()) {
          flush(t);
          const std::uint32_t i = expiries_[expIdx++].second;
          revert(i);
        }
        if (t >= T_) break;
        continue;
      }
      t += dt;
      ++traj_.events;

      std::uint32_t i;
      bool right;
      double x = rng.uniform() * total_;
      if (classes_.size() == 1) {
        const RateClass& c = classes_[0];
        const double w = c.r + c.l;
        std::size_t k = static_cast<std::size_t>(x / w);
        if (k >= c.members.size()) k = c.members.size() - 1;
        right = (x - static_cast<double>(k) * w) < c.r;
        i = c.members[k];
      } else {
        std::size_t ci = 0;
        for (; ci + 1 < classes_.size(); ++ci) {
          const double w = static_cast<double>(classes_[ci].members.size()) * (classes_[ci].r + classes_[ci].l);
          if (x < w) break;
          x -= w;
        }
        const RateClass& c = classes_[ci];
        const double w = c.r + c.l;
        std::size_t k = static_cast<std::size_t>(x / w);
        if (k >= c.members.size()) k = c.members.size() - 1;
        right = (x - static_cast<double>(k) * w) < c.r;
        i = c.members[k];
      }

      if (right) {
        if (i + 1 < n_ && pos_[i + 1] == pos_[i] + 1) continue;
      } else {
        if (i > 0 && pos_[i - 1] == pos_[i] - 1) continue;
      }
      apply_move(i, right, t);
      if (traj_.boundaryViolation) break;
    }
    flush(t);
    if (!traj_.boundaryViolation) {
      while (snapIdx < snapTimes_.size() && snapTimes_[snapIdx] <= T_) take_snapshot(snapTimes_[snapIdx++]);
    }
    traj_.elapsed = t;
    traj_.occupancyRight = occR_;
    traj_.occupancyLeft = occL_;
    traj_.logDynamicWeight = logJumps_ - weightIntegral_;
    traj_.finalTaggedSite = pos_[tag_];
    traj_.finalState = current_state();
    return std::move(traj_);
  }

 private:
  std::uint32_t class_index(double r, double l) {
    for (std::uint32_t c = 0; c < classes_.size(); ++c) {
      if (classes_[c].r == r && classes_[c].l == l) return c;
    }
    const bool modified = !(r == spec_.p && l == spec_.q);
    const double logR = (r > 0.0 && spec_.p > 0.0) ? std::log(r / spec_.p) : 0.0;
    const double logL = (l > 0.0 && spec_.q > 0.0) ? std::log(l / spec_.q) : 0.0;
    classes_.push_back({r, l, logR, logL, modified, {}});
    return static_cast<std::uint32_t>(classes_.size() - 1);
  }

  void join(std::uint32_t i, std::uint32_t c) {
    classOf_[i] = c;
    slotOf_[i] = static_cast<std::uint32_t>(classes_[c].members.size());
    classes_[c].members.push_back(i);
    total_ += classes_[c].r + classes_[c].l;
  }

  void leave(std::uint32_t i) {
    RateClass& c = classes_[classOf_[i]];
    const std::uint32_t slot = slotOf_[i];
    const std::uint32_t last = c.members.back();
    c.members[slot] = last;
    slotOf_[last] = slot;
    c.members.pop_back();
    total_ -= c.r + c.l;
  }

  void revert(std::uint32_t i) {
    if (classOf_[i] == baseClass_[i]) return;
    leave(i);
    join(i, baseClass_[i]);
    expireOnJump_[i] = 0;
    refresh_contrib(i);
    if (i == tag_) refresh_tag_flags();
    if (total_ < 1e-9) total_ = recompute_total();
  }

  double recompute_total() const {
    double s = 0.0;
    for (const auto& c : classes_) s += static_cast<double>(c.members.size()) * (c.r + c.l);
    return s;
  }

  bool free_right(std::size_t i) const { return i + 1 >= n_ || pos_[i + 1] != pos_[i] + 1; }
  bool free_left(std::size_t i) const { return i == 0 || pos_[i - 1] != pos_[i] - 1; }

  void refresh_contrib(std::size_t i) {
    const RateClass& c = classes_[classOf_[i]];
    double v = 0.0;
    if (c.modified) {
      if (free_right(i)) v += c.r - spec_.p;
      if (free_left(i)) v += c.l - spec_.q;
    }
    rateDev_ += v - contrib_[i];
    contrib_[i] = v;
  }

  void refresh_tag_flags() {
    tagFreeR_ = free_right(tag_);
    tagFreeL_ = free_left(tag_);
  }

  void flush(double t) {
    const double dt = t - lastFlush_;
    if (dt > 0.0) {
      weightIntegral_ += rateDev_ * dt;
      if (tagFreeR_) occR_ += dt;
      if (tagFreeL_) occL_ += dt;
      lastFlush_ = t;
    }
  }

  bool touches_modified(std::size_t i) const {
    if (classes_[classOf_[i]].modified) return true;
    if (i > 0 && classes_[classOf_[i - 1]].modified) return true;
    if (i + 1 < n_ && classes_[classOf_[i + 1]].modified) return true;
    return false;
  }

  void apply_move(std::uint32_t i, bool right, double t) {
    const bool nearTag = (i + 1 >= tag_) && (i <= tag_ + 1);
    const bool weightTouch = touches_modified(i);
    if (nearTag || weightTouch) flush(t);
    const Site from = pos_[i];
    const RateClass& c = classes_[classOf_[i]];
    if (right) {
      pos_[i] = from + 1;
      logJumps_ += c.logR;
      record_crossing(from, +1, t);
    } else {
      pos_[i] = from - 1;
      logJumps_ += c.logL;
      record_crossing(from - 1, -1, t);
    }
    assert(i + 1 >= n_ || pos_[i] < pos_[i + 1]);
    assert(i == 0 || pos_[i - 1] < pos_[i]);
    if (expireOnJump_[i]) {
      expireOnJump_[i] = 0;
      leave(i);
      join(i, baseClass_[i]);
    }
    if (weightTouch) {
      if (i > 0) refresh_contrib(i - 1);
      refresh_contrib(i);
      if (i + 1 < n_) refresh_contrib(i + 1);
    }
    if (nearTag) refresh_tag_flags();
    if (i == tag_) {
      if (right) ++traj_.taggedRightJumps; else ++traj_.taggedLeftJumps;
      if (opt_.recordTaggedPath) traj_.taggedPath.push_back({t, pos_[i]});
      if (pos_[i] <= windowLo_ || pos_[i] >= windowHi_) traj_.boundaryViolation = true;
    }
  }

  void record_crossing(Site bond, int d, double t) {
    if (trackedSites_.empty()) return;
    auto it = std::lower_bound(trackedSites_.begin(), trackedSites_.end(), bond);
    if (it == trackedSites_.end() || *it != bond) return;
    auto& rec = traj_.currents[static_cast<std::size_t>(it - trackedSites_.begin())];
    rec.total += d;
    rec.crossings.push_back({t, d});
  }

  LatticeState current_state() const {
    LatticeState s;
    s.particles = pos_;
    s.tagged = tag_;
    s.scale = traj_.scale;
    s.windowLo = std::min(windowLo_, pos_.front());
    s.windowHi = std::max(windowHi_, pos_.back());
    return s;
  }

  void take_snapshot(double microTime) {
    traj_.snapshots.push_back({microTime / static_cast<double>(traj_.scale), current_state()});
  }

  const DynamicsSpec& spec_;
  const SimOptions& opt_;
  std::vector<Site> pos_;
  std::size_t tag_;
  std::size_t n_;
  Site windowLo_ = 0;
  Site windowHi_ = 0;
  double T_ = 0.0;

  std::vector<RateClass> classes_;
  std::vector<std::uint32_t> classOf_;
  std::vector<std::uint32_t> slotOf_;
  std::vector<std::uint32_t> baseClass_;
  std::vector<std::uint8_t> expireOnJump_;
  std::vector<std::pair<double, std::uint32_t>> expiries_;
  double total_ = 0.0;

  std::vector<double> contrib_;
  double rateDev_ = 0.0;
  double weightIntegral_ = 0.0;
  double logJumps_ = 0.0;
  double lastFlush_ = 0.0;
  bool tagFreeR_ = true;
  bool tagFreeL_ = true;
  double occR_ = 0.0;
  double occL_ = 0.0;

  std::vector<double> snapTimes_;
  std::vector<Site> trackedSites_;
  Trajectory traj_;
};

#ifndef NDEBUG
void check_current_identity(const LatticeState& initial, const Trajectory& traj) {
  for (std::size_t a = 0; a + 1 < traj.currents.size(); ++a) {
    const auto& cx = traj.currents[a];
    const auto& cy = traj.currents[a + 1];
    const auto mass0 = static_cast<std::int64_t>(initial.count_up_to(cy.site)) -
                       static_cast<std::int64_t>(initial.count_up_to(cx.site));
    const auto mass1 = static_cast<std::int64_t>(traj.finalState.count_up_to(cy.site)) -
                       static_cast<std::int64_t>(traj.finalState.count_up_to(cx.site));
    assert(cy.total - cx.total == mass0 - mass1);
    (void)mass0;
    (void)mass1;
  }
}
#endif

}  // namespace

Trajectory simulate(const LatticeState& state, const DynamicsSpec& spec, double horizon, Rng& rng,
                    const SimOptions& options) {
  Engine engine(state, spec, horizon, options);
  Trajectory traj = engine.run(rng);
#ifndef NDEBUG
  check_current_identity(state, traj);
#endif
  return traj;
}

Trajectory simulate(const LatticeState& state, const DynamicsSpec& spec, double horizon, std::uint64_t seed,
                    const SimOptions& options) {
  Rng rng(seed);
  return simulate(state, spec, horizon, rng, options);
}

}  // namespace asep
