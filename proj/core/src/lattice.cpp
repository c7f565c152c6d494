#include <algorithm>
#include <cmath>
#include <stdexcept>
#include <string>

#include "asep/lattice.hpp"

namespace asep {

bool LatticeState::occupied(Site x) const { return std::binary_search(particles.begin(), particles.end(), x); }

std::size_t LatticeState::count_up_to(Site x) const {
  return static_cast<std::size_t>(std::upper_bound(particles.begin(), particles.end(), x) - particles.begin());
}

std::vector<std::uint8_t> LatticeState::occupancy() const {
  std::vector<std::uint8_t> occ(static_cast<std::size_t>(windowHi - windowLo + 1), 0);
  for (Site x : particles) occ[static_cast<std::size_t>(x - windowLo)] = 1;
  return occ;
}

void LatticeState::validate() const {
  if (particles.empty() || tagged >= particles.size()) throw std::logic_error("lattice state without tagged particle");
  for (std::size_t i = 0; i < particles.size(); ++i) {
    if (particles[i] < windowLo || particles[i] > windowHi) throw std::logic_error("particle outside window");
    if (i && particles[i] <= particles[i - 1]) throw std::logic_error("particles not strictly ordered");
  }
}

LatticeState LatticeState::from_occupancy(Site windowLo, const std::vector<std::uint8_t>& occ, Site taggedSite,
                                          std::int64_t scale) {
  LatticeState s;
  s.windowLo = windowLo;
  s.windowHi = windowLo + static_cast<Site>(occ.size()) - 1;
  s.scale = scale;
  for (std::size_t i = 0; i < occ.size(); ++i) {
    if (occ[i]) s.particles.push_back(windowLo + static_cast<Site>(i));
  }
  auto it = std::lower_bound(s.particles.begin(), s.particles.end(), taggedSite);
  if (it == s.particles.end() || *it != taggedSite) throw std::invalid_argument("tagged site is not occupied");
  s.tagged = static_cast<std::size_t>(it - s.particles.begin());
  return s;
}

bool operator==(const LatticeState& a, const LatticeState& b) {
  return a.windowLo == b.windowLo && a.windowHi == b.windowHi && a.particles == b.particles &&
         a.tagged == b.tagged && a.scale == b.scale;
}

Site Window::lo(std::int64_t N) const { return -static_cast<Site>(std::floor(left * static_cast<double>(N) + 1e-9)); }
Site Window::hi(std::int64_t N) const { return static_cast<Site>(std::floor(right * static_cast<double>(N) + 1e-9)); }

InitialSample sample_initial(const Profile& profile, double rho, std::int64_t N, Window window, Rng& rng) {
  if (N < 1) throw std::invalid_argument("N must be >= 1");
  if (!(rho > 0.0 && rho < 1.0)) throw std::invalid_argument("rho must lie in (0, 1)");
  InitialSample out{};
  LatticeState& s = out.state;
  s.windowLo = window.lo(N);
  s.windowHi = window.hi(N);
  s.scale = N;
  if (s.windowLo > 0 || s.windowHi < 0) throw std::invalid_argument("window must contain the origin");
  const double lr = std::log(rho);
  const double l1r = std::log1p(-rho);
  const double invN = 1.0 / static_cast<double>(N);
  double logW = 0.0;
  for (Site x = s.windowLo; x <= s.windowHi; ++x) {
    if (x == 0) {
      s.tagged = s.particles.size();
      s.particles.push_back(0);
      continue;
    }
    const double d = profile(static_cast<double>(x) * invN);
    const bool occ = rng.bernoulli(d);
    if (occ) s.particles.push_back(x);
    if (d != rho) logW += occ ? std::log(d) - lr : std::log1p(-d) - l1r;
  }
  out.logWeight = logW;
  return out;
}

InitialSample sample_initial(const Profile& profile, double rho, std::int64_t N, Window window,
                             std::uint64_t seed) {
  Rng rng(seed);
  return sample_initial(profile, rho, N, window, rng);
}

LatticeState step_configuration(std::int64_t N, Window window) {
  LatticeState s;
  s.windowLo = window.lo(N);
  s.windowHi = window.hi(N);
  s.scale = N;
  for (Site x = s.windowLo; x <= 0; ++x) s.particles.push_back(x);
  s.tagged = s.particles.size() - 1;
  return s;
}

ZeroRangeView to_zero_range(const LatticeState& s) {
  if (s.particles.empty() || s.tagged >= s.particles.size()) throw std::invalid_argument("tagged particle missing");
  ZeroRangeView v;
  v.windowLo = s.windowLo;
  v.windowHi = s.windowHi;
  v.scale = s.scale;
  for (std::size_t i = s.tagged + 1; i < s.particles.size(); ++i) v.ahead.push_back(s.particles[i] - s.particles[i - 1] - 1);
  for (std::size_t i = s.tagged; i > 0; --i) v.behind.push_back(s.particles[i] - s.particles[i - 1] - 1);
  return v;
}

LatticeState from_zero_range(const ZeroRangeView& v, Site taggedSite) {
  LatticeState s;
  s.windowLo = v.windowLo;
  s.windowHi = v.windowHi;
  s.scale = v.scale;
  Site x = taggedSite;
  std::vector<Site> back;
  for (auto g : v.behind) {
    x -= g + 1;
    back.push_back(x);
  }
  s.particles.assign(back.rbegin(), back.rend());
  s.tagged = s.particles.size();
  s.particles.push_back(taggedSite);
  x = taggedSite;
  for (auto g : v.ahead) {
    if (g < 0) throw std::invalid_argument("negative gap");
    x += g + 1;
    s.particles.push_back(x);
  }
  s.windowLo = std::min(s.windowLo, s.particles.front());
  s.windowHi = std::max(s.windowHi, s.particles.back());
  return s;
}

LatticeState from_zero_range(const std::vector<std::int64_t>& gaps, Site taggedSite) {
  ZeroRangeView v;
  v.ahead = gaps;
  v.windowLo = taggedSite;
  v.windowHi = taggedSite;
  return from_zero_range(v, taggedSite);
}

std::string run_length_encode(const LatticeState& s) {
  std::string out = std::to_string(s.windowLo) + ":";
  const auto occ = s.occupancy();
  std::size_t i = 0;
  while (i < occ.size()) {
    std::size_t j = i;
    while (j < occ.size() && occ[j] == occ[i]) ++j;
    out += std::to_string(j - i);
    out += occ[i] ? '#' : '.';
    i = j;
  }
  out += "@" + std::to_string(s.tagged_site());
  return out;
}

}  // namespace asep
