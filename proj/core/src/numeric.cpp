#include "asep/numeric.hpp"

#include <algorithm>
#include <array>
#include <stdexcept>

namespace asep {

namespace {

constexpr std::array<double, 8> kGLNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGLWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

// Antiderivative of entropy_density in theta.
double entropy_antiderivative(double th, double rho) {
  auto xlx = [](double x) { return x == 0.0 ? 0.0 : 0.5 * x * x * std::log(x) - 0.25 * x * x; };
  const double w = 1.0 - th;
  return xlx(th) - xlx(w) - 0.5 * th * th * std::log(rho) + 0.5 * w * w * std::log(1.0 - rho);
}

double simpson_rec(const std::function<double(double)>& f, double a, double b, double fa, double fm,
                   double fb, double whole, double tol, int depth) {
  const double m = 0.5 * (a + b);
  const double lm = 0.5 * (a + m);
  const double rm = 0.5 * (m + b);
  const double flm = f(lm);
  const double frm = f(rm);
  const double left = (m - a) / 6.0 * (fa + 4.0 * flm + fm);
  const double right = (b - m) / 6.0 * (fm + 4.0 * frm + fb);
  const double diff = left + right - whole;
  if (depth <= 0 || std::abs(diff) <= 15.0 * tol) return left + right + diff / 15.0;
  return simpson_rec(f, a, m, fa, flm, fm, left, 0.5 * tol, depth - 1) +
         simpson_rec(f, m, b, fm, frm, fb, right, 0.5 * tol, depth - 1);
}

}  // namespace

double entropy_density_derivative(double theta, double rho) {
  if (theta <= 0.0) return -kInfiniteCost;
  if (theta >= 1.0) return kInfiniteCost;
  return std::log(theta / rho) - std::log((1.0 - theta) / (1.0 - rho));
}

double entropy_of_linear_piece(double d0, double d1, double length, double rho) {
  if (length <= 0.0) return 0.0;
  if (std::abs(d1 - d0) < 1e-5) {
    return gauss_legendre([&](double s) { return entropy_density(d0 + (d1 - d0) * s, rho); }, 0.0,
                          1.0) *
           length;
  }
  return length * (entropy_antiderivative(d1, rho) - entropy_antiderivative(d0, rho)) / (d1 - d0);
}

double gauss_legendre(const std::function<double(double)>& f, double a, double b) {
  const double half = 0.5 * (b - a);
  const double mid = 0.5 * (a + b);
  double s = 0.0;
  for (std::size_t i = 0; i < kGLNodes.size(); ++i) s += kGLWeights[i] * f(mid + half * kGLNodes[i]);
  return s * half;
}

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int maxDepth) {
  if (b <= a) return 0.0;
  const double fa = f(a);
  const double fb = f(b);
  const double fm = f(0.5 * (a + b));
  const double whole = (b - a) / 6.0 * (fa + 4.0 * fm + fb);
  return simpson_rec(f, a, b, fa, fm, fb, whole, tol, maxDepth);
}

double log_sum_exp(std::span<const double> xs) {
  if (xs.empty()) return -kInfiniteCost;
  const double m = *std::max_element(xs.begin(), xs.end());
  if (!std::isfinite(m)) return m;
  double s = 0.0;
  for (double x : xs) s += std::exp(x - m);
  return m + std::log(s);
}

double log_sum_exp(double a, double b) {
  const double m = std::max(a, b);
  if (!std::isfinite(m)) return m;
  return m + std::log1p(std::exp(std::min(a, b) - m));
}

double bisect(const std::function<double(double)>& f, double lo, double hi, double tol, int maxIter) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo > 0) == (fhi > 0)) throw std::domain_error("bisect: no sign change on interval");
  for (int i = 0; i < maxIter && hi - lo > tol; ++i) {
    const double mid = 0.5 * (lo + hi);
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm > 0) == (flo > 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

}  // namespace asep
