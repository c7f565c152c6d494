#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asep/hydro.hpp"
#include "asep/numeric.hpp"

namespace asep {

CumulativeProfile::CumulativeProfile(Profile density, double base, double baseValue)
    : density_(std::move(density)), base_(base) {
  for (const auto& k : density_.knots()) {
    if (knots_.empty() || k.u > knots_.back()) knots_.push_back(k.u);
  }
  if (knots_.empty()) {
    knots_.push_back(base);
  }
  values_.resize(knots_.size());
  const double x0 = knots_.front();
  values_[0] = x0 <= base ? baseValue - density_.integral(x0, base) : baseValue + density_.integral(base, x0);
  for (std::size_t j = 0; j + 1 < knots_.size(); ++j) {
    const double a = knots_[j];
    const double b = knots_[j + 1];
    values_[j + 1] = values_[j] + 0.5 * (density_(a) + density_.left_limit(b)) * (b - a);
  }
}

double CumulativeProfile::operator()(double u) const {
  if (u < knots_.front()) return values_.front() - density_.left_tail() * (knots_.front() - u);
  auto it = std::upper_bound(knots_.begin(), knots_.end(), u);
  const auto j = static_cast<std::size_t>(it - knots_.begin()) - 1;
  if (j + 1 == knots_.size()) return values_.back() + density_.right_tail() * (u - knots_.back());
  const double a = knots_[j];
  const double b = knots_[j + 1];
  const double d0 = density_(a);
  const double d1 = density_.left_limit(b);
  const double s = u - a;
  return values_[j] + d0 * s + 0.5 * (d1 - d0) / (b - a) * s * s;
}

std::vector<CumulativeProfile::Segment> CumulativeProfile::segments(double lo, double hi) const {
  std::vector<double> br{lo};
  for (auto it = std::upper_bound(knots_.begin(), knots_.end(), lo); it != knots_.end() && *it < hi; ++it) {
    br.push_back(*it);
  }
  br.push_back(hi);
  std::vector<Segment> out;
  out.reserve(br.size());
  for (std::size_t i = 0; i + 1 < br.size(); ++i) {
    const double a = br[i];
    const double b = br[i + 1];
    if (!(b > a)) continue;
    const double d0 = density_(a);
    const double k = (density_.left_limit(b) - d0) / (b - a);
    out.push_back({a, b, (*this)(a), d0, k});
  }
  return out;
}

namespace {

HopfLaxResult hopf_lax_search(const CumulativeProfile& v0, const ModelParams& m, double t, double u, double W) {
  if (!(t > 0.0)) throw std::invalid_argument("hopf_lax_value requires t > 0");
  const double g = m.gamma;
  const double gt = g * t;
  const double lo = u - gt - W;
  const double hi = u + gt + W;
  const double zl = u - gt;
  const double zr = u + gt;

  double best = -kInfiniteCost;
  double arg = lo;
  auto consider = [&](double y, double val) {
    if (val > best + 1e-13) {
      best = val;
      arg = y;
    }
  };

  for (const auto& seg : v0.segments(lo, hi)) {
    double cuts[4] = {seg.x0, 0.0, 0.0, seg.x1};
    int nc = 1;
    if (zl > seg.x0 && zl < seg.x1) cuts[nc++] = zl;
    if (zr > seg.x0 && zr < seg.x1) cuts[nc++] = zr;
    cuts[nc++] = seg.x1;
    for (int c = 0; c + 1 < nc; ++c) {
      const double a = cuts[c];
      const double b = cuts[c + 1];
      const double L = b - a;
      if (!(L > 0.0)) continue;
      const double sa = a - seg.x0;
      const double va = seg.v0 + seg.d0 * sa + 0.5 * seg.k * sa * sa;
      const double da = seg.d0 + seg.k * sa;
      const double mid = 0.5 * (a + b);
      double P0 = 0.0, P1 = 0.0, P2 = 0.0;
      if (mid >= zr) {
        P0 = a - u;
        P1 = 1.0;
      } else if (mid > zl) {
        const double w = gt + a - u;
        P0 = w * w / (4.0 * gt);
        P1 = w / (2.0 * gt);
        P2 = 1.0 / (2.0 * gt);
      }
      const double f0 = va - P0;
      const double f1 = da - P1;
      const double f2 = seg.k - P2;
      auto f = [&](double s) { return f0 + f1 * s + 0.5 * f2 * s * s; };
      consider(a, f0);
      if (f2 < 0.0) {
        const double s = -f1 / f2;
        if (s > 0.0 && s < L) consider(a + s, f(s));
      }
      consider(b, f(L));
    }
  }
  return {best, arg};
}

}  // namespace

HopfLaxResult hopf_lax_value(const CumulativeProfile& v0, const ModelParams& m, double t, double u) {
  return hopf_lax_search(v0, m, t, u, v0.last_knot() - v0.first_knot());
}

HopfLaxResult hopf_lax_value_local(const CumulativeProfile& v0, const ModelParams& m, double t, double u) {
  return hopf_lax_search(v0, m, t, u, 0.0);
}

Profile entropic_density(const CumulativeProfile& v0, const ModelParams& m, double t, const std::vector<double>& grid,
                         double h) {
  if (grid.empty()) throw std::invalid_argument("entropic_density requires a grid");
  std::vector<Knot> knots;
  knots.reserve(grid.size());
  for (double u : grid) {
    const double d = (hopf_lax_value(v0, m, t, u + h).value - hopf_lax_value(v0, m, t, u - h).value) / (2.0 * h);
    knots.push_back({u, std::clamp(d, 0.0, 1.0)});
  }
  return Profile(knots, knots.front().value, knots.back().value);
}

}  // namespace asep
