#include "asep/profile.hpp"

#include <algorithm>
#include <stdexcept>
#include <string>

#include "asep/numeric.hpp"

namespace asep {

namespace {

void check_density(double d) {
  if (!(d >= -kKnotTolerance && d <= 1.0 + kKnotTolerance))
    throw std::domain_error("profile density outside [0,1]: " + std::to_string(d));
}

double clamp01(double d) { return std::clamp(d, 0.0, 1.0); }

}  // namespace

Profile::Profile(std::vector<Knot> knots, double leftTail, double rightTail)
    : leftTail_(leftTail), rightTail_(rightTail) {
  check_density(leftTail);
  check_density(rightTail);
  leftTail_ = clamp01(leftTail);
  rightTail_ = clamp01(rightTail);
  for (std::size_t i = 0; i < knots.size(); ++i) {
    Knot k = knots[i];
    check_density(k.value);
    k.value = clamp01(k.value);
    if (!knots_.empty()) {
      const double prev = knots_.back().u;
      if (k.u < prev - kKnotTolerance) throw std::invalid_argument("profile knots must be ordered");
      if (k.u <= prev + kKnotTolerance) {
        k.u = prev;
        if (knots_.size() >= 2 && knots_[knots_.size() - 2].u == prev) {
          // Three knots at one spot: keep the outer two.
          knots_.back() = k;
          continue;
        }
      }
    }
    knots_.push_back(k);
  }
  if (knots_.empty() && leftTail_ != rightTail_)
    throw std::invalid_argument("profile without knots must have equal tails");
}

Profile Profile::constant(double value) { return Profile({}, value, value); }

double Profile::first_knot() const {
  if (knots_.empty()) throw std::logic_error("profile has no knots");
  return knots_.front().u;
}

double Profile::last_knot() const {
  if (knots_.empty()) throw std::logic_error("profile has no knots");
  return knots_.back().u;
}

double Profile::operator()(double u) const {
  if (knots_.empty() || u < knots_.front().u) return leftTail_;
  auto it = std::upper_bound(knots_.begin(), knots_.end(), u,
                             [](double x, const Knot& k) { return x < k.u; });
  const std::size_t i = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (i + 1 == knots_.size()) return rightTail_;
  const Knot& a = knots_[i];
  const Knot& b = knots_[i + 1];
  return a.value + (b.value - a.value) * (u - a.u) / (b.u - a.u);
}

double Profile::left_limit(double u) const {
  if (knots_.empty() || u <= knots_.front().u) return leftTail_;
  auto it = std::lower_bound(knots_.begin(), knots_.end(), u,
                             [](const Knot& k, double x) { return k.u < x; });
  const std::size_t j = static_cast<std::size_t>(it - knots_.begin());
  if (j == knots_.size()) return rightTail_;
  const Knot& a = knots_[j - 1];
  const Knot& b = knots_[j];
  return a.value + (b.value - a.value) * (u - a.u) / (b.u - a.u);
}

std::vector<ProfilePiece> Profile::pieces(double a, double b) const {
  std::vector<ProfilePiece> out;
  if (!(b > a)) return out;
  auto emit = [&](double x0, double x1, double d0, double d1) {
    const double lo = std::max(x0, a);
    const double hi = std::min(x1, b);
    if (!(hi > lo)) return;
    auto at = [&](double x) {
      if (x1 == x0 || !std::isfinite(x0) || !std::isfinite(x1)) return d0;
      return d0 + (d1 - d0) * (x - x0) / (x1 - x0);
    };
    out.push_back({lo, hi, at(lo), at(hi)});
  };
  const double inf = kInfiniteCost;
  if (knots_.empty()) {
    emit(-inf, inf, rightTail_, rightTail_);
    return out;
  }
  emit(-inf, knots_.front().u, leftTail_, leftTail_);
  for (std::size_t i = 0; i + 1 < knots_.size(); ++i) {
    if (knots_[i + 1].u > knots_[i].u)
      emit(knots_[i].u, knots_[i + 1].u, knots_[i].value, knots_[i + 1].value);
  }
  emit(knots_.back().u, inf, rightTail_, rightTail_);
  return out;
}

double Profile::integral(double a, double b) const {
  double s = 0.0;
  for (const auto& pc : pieces(a, b)) s += 0.5 * (pc.d0 + pc.d1) * (pc.x1 - pc.x0);
  return s;
}

Profile floored(const Profile& profile, double floor) {
  if (!(floor >= 0.0 && floor <= 1.0)) throw std::invalid_argument("floor must lie in [0, 1]");
  const auto& ks = profile.knots();
  std::vector<Knot> out;
  for (std::size_t i = 0; i < ks.size(); ++i) {
    if (i > 0 && ks[i].u > ks[i - 1].u) {
      const Knot& a = ks[i - 1];
      const Knot& b = ks[i];
      if ((a.value - floor) * (b.value - floor) < 0.0) {
        const double u = a.u + (floor - a.value) * (b.u - a.u) / (b.value - a.value);
        out.push_back({u, floor});
      }
    }
    out.push_back({ks[i].u, std::max(ks[i].value, floor)});
  }
  return Profile(std::move(out), std::max(profile.left_tail(), floor), std::max(profile.right_tail(), floor));
}

}  // namespace asep
