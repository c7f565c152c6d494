#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "asep/lattice.hpp"

namespace asep {

EmpiricalMeasure empirical_measure(const LatticeState& s) {
  EmpiricalMeasure mu;
  mu.mass = 1.0 / static_cast<double>(s.scale);
  mu.atoms.reserve(s.particles.size());
  for (Site x : s.particles) mu.atoms.push_back(static_cast<double>(x) * mu.mass);
  return mu;
}

BumpFamily::BumpFamily(double R, std::size_t terms) {
  if (!(R > 0.0)) throw std::invalid_argument("bump family radius must be positive");
  const double span = R + 1.0;
  for (int level = 0; centres_.size() < terms; ++level) {
    const double h = span / std::ldexp(1.0, level);
    const long count = (1L << (level + 1));
    for (long k = 0; k <= count && centres_.size() < terms; ++k) {
      centres_.push_back(-span + static_cast<double>(k) * h);
      halfWidths_.push_back(h);
    }
  }
}

double BumpFamily::eval(std::size_t j, double u) const {
  const double r = std::abs(u - centres_[j]) / halfWidths_[j];
  return r >= 1.0 ? 0.0 : 1.0 - r;
}

std::vector<double> BumpFamily::expectations(const EmpiricalMeasure& in) const {
  EmpiricalMeasure sorted;
  const EmpiricalMeasure* src = &in;
  if (!std::is_sorted(in.atoms.begin(), in.atoms.end())) {
    sorted = in;
    std::sort(sorted.atoms.begin(), sorted.atoms.end());
    src = &sorted;
  }
  const EmpiricalMeasure& mu = *src;
  std::vector<double> e(size(), 0.0);
  for (std::size_t j = 0; j < size(); ++j) {
    const double c = centres_[j];
    const double h = halfWidths_[j];
    auto lo = std::lower_bound(mu.atoms.begin(), mu.atoms.end(), c - h);
    double s = 0.0;
    for (auto it = lo; it != mu.atoms.end() && *it < c + h; ++it) s += eval(j, *it);
    e[j] = s * mu.mass;
  }
  return e;
}

std::vector<double> BumpFamily::expectations(const Profile& density) const {
  std::vector<double> e(size(), 0.0);
  for (std::size_t j = 0; j < size(); ++j) {
    const double c = centres_[j];
    const double h = halfWidths_[j];
    double s = 0.0;
    // Bump and density are both linear between these breakpoints, so Simpson is exact.
    for (double a0 : {c - h, c}) {
      for (const auto& pc : density.pieces(a0, a0 + h)) {
        const double m = 0.5 * (pc.x0 + pc.x1);
        const double dm = 0.5 * (pc.d0 + pc.d1);
        s += (pc.x1 - pc.x0) / 6.0 *
             (eval(j, pc.x0) * pc.d0 + 4.0 * eval(j, m) * dm + eval(j, pc.x1) * pc.d1);
      }
    }
    e[j] = s;
  }
  return e;
}

double BumpFamily::distance(const std::vector<double>& a, const std::vector<double>& b) const {
  double d = 0.0;
  double w = 0.5;
  for (std::size_t j = 0; j < size(); ++j, w *= 0.5) d += w * std::abs(a[j] - b[j]);
  return d;
}

double measure_distance(const EmpiricalMeasure& mu, const EmpiricalMeasure& nu, double R) {
  const BumpFamily f(R);
  return f.distance(f.expectations(mu), f.expectations(nu));
}

double measure_distance(const EmpiricalMeasure& mu, const Profile& density, double R) {
  const BumpFamily f(R);
  return f.distance(f.expectations(mu), f.expectations(density));
}

}  // namespace asep
