#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <string>

#include "asep/numeric.hpp"
#include "asep/variational.hpp"

namespace asep {

namespace {

double phi(double s, double rho) { return entropy_density(s, rho); }
double dphi(double s, double rho) { return std::log(s / rho) - std::log((1.0 - s) / (1.0 - rho)); }
double d2phi(double s) { return 1.0 / (s * (1.0 - s)); }

// Discrete functional on nodes u_0 = a + delta, ..., u_n = b:
//   F(v) = sum h phi(s_i) + sum w_i h exp(-lambda (H_i - v_i)),  s_i = (v_{i+1} - v_i) / h.
// Unknowns x = (v_0, s_0, ..., s_{n-1}) with box constraints; projected Newton with the Hessian
// assembled in node space, where it is tridiagonal.
class RegularizedSolver {
 public:
  RegularizedSolver(const ObstacleSpec& spec, double lambda, double delta, double eps, double h)
      : spec_(spec), lambda_(lambda), eps_(eps) {
    const double u0 = spec.a + delta;
    n_ = static_cast<std::size_t>(std::ceil((spec.b - u0) / h - 1e-9));
    if (n_ < 2) throw std::invalid_argument("grid too coarse for the obstacle interval");
    h_ = (spec.b - u0) / static_cast<double>(n_);
    u_.resize(n_ + 1);
    H_.resize(n_ + 1);
    w_.assign(n_ + 1, 1.0);
    w_.front() = w_.back() = 0.5;
    for (std::size_t i = 0; i <= n_; ++i) {
      u_[i] = u0 + static_cast<double>(i) * h_;
      H_[i] = spec.H(u_[i]);
    }
    v0Max_ = std::min(spec.H(u0), delta);
    v0_ = 0.0;
    s_.assign(n_, eps);
  }

  void solve(RegularizedReport& rep) {
    std::vector<double> v = nodes(v0_, s_);
    double F = objective(v, s_);
    int it = 0;
    double res = 0.0;
    for (; it < kRegularizedMaxIterations; ++it) {
      std::vector<double> g = node_gradient(v, s_);
      // Gradient in x-space.
      std::vector<double> tail(n_ + 2, 0.0);
      for (std::size_t i = n_ + 1; i-- > 0;) tail[i] = tail[i + 1] + g[i];
      const double Gv0 = tail[0];
      std::vector<double> Gs(n_);
      for (std::size_t j = 0; j < n_; ++j) Gs[j] = h_ * tail[j + 1];

      const double pg = projected_gradient_norm(Gv0, Gs);
      res = residual(g);
      if (pg <= 1e-10 && res <= 1e-9) break;
      const double actTol = std::min(1e-6, pg);
      const bool v0Active = (v0_ <= actTol && Gv0 >= 0.0) || (v0_ >= v0Max_ - actTol && Gv0 <= 0.0);
      std::vector<char> sActive(n_);
      for (std::size_t j = 0; j < n_; ++j) {
        sActive[j] = (s_[j] <= eps_ + actTol && Gs[j] > 0.0) || (s_[j] >= 1.0 - eps_ - actTol && Gs[j] < 0.0);
      }

      std::vector<double> d = newton_direction(v, g, v0Active, sActive);
      double dv0 = v0Active ? 0.0 : d[0];
      std::vector<double> ds(n_);
      for (std::size_t j = 0; j < n_; ++j) ds[j] = sActive[j] ? 0.0 : (d[j + 1] - d[j]) / h_;

      double alpha = 1.0;
      bool accepted = false;
      for (int ls = 0; ls < 60; ++ls, alpha *= 0.5) {
        const double nv0 = std::clamp(v0_ + alpha * dv0, 0.0, v0Max_);
        std::vector<double> ns(n_);
        double dec = Gv0 * (nv0 - v0_);
        for (std::size_t j = 0; j < n_; ++j) {
          ns[j] = std::clamp(s_[j] + alpha * ds[j], eps_, 1.0 - eps_);
          dec += Gs[j] * (ns[j] - s_[j]);
        }
        const std::vector<double> nvNodes = nodes(nv0, ns);
        const double nF = objective(nvNodes, ns);
        if (std::isfinite(nF) && nF <= F + 1e-4 * dec + 1e-15 * std::abs(F)) {
          v0_ = nv0;
          s_ = std::move(ns);
          v = nvNodes;
          F = nF;
          accepted = true;
          break;
        }
      }
      if (!accepted) break;
    }
    const std::vector<double> g = node_gradient(v, s_);
    res = residual(g);
    rep.iterations = it;
    rep.residual = res;
    rep.objective = F;
    rep.converged = res <= 1e-6;
    rep.convex = true;
    for (std::size_t j = 1; j < n_; ++j) {
      if (s_[j] < s_[j - 1] - 1e-8) rep.convex = false;
    }
    rep.grid = u_;
    rep.values = v;
  }

  double v0() const { return v0_; }

 private:
  std::vector<double> nodes(double v0, const std::vector<double>& s) const {
    std::vector<double> v(n_ + 1);
    v[0] = v0;
    for (std::size_t j = 0; j < n_; ++j) v[j + 1] = v[j] + h_ * s[j];
    return v;
  }

  double objective(const std::vector<double>& v, const std::vector<double>& s) const {
    double F = 0.0;
    for (std::size_t j = 0; j < n_; ++j) F += h_ * phi(s[j], spec_.rho);
    for (std::size_t i = 0; i <= n_; ++i) F += w_[i] * h_ * std::exp(-lambda_ * (H_[i] - v[i]));
    return F;
  }

  std::vector<double> node_gradient(const std::vector<double>& v, const std::vector<double>& s) const {
    std::vector<double> g(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) g[i] = w_[i] * h_ * lambda_ * std::exp(-lambda_ * (H_[i] - v[i]));
    for (std::size_t j = 0; j < n_; ++j) {
      const double d = dphi(s[j], spec_.rho);
      g[j] -= d;
      g[j + 1] += d;
    }
    return g;
  }

  // Scaled node gradient at nodes whose adjacent constraints are inactive.
  double residual(const std::vector<double>& g) const {
    const double tol = 1e-12;
    auto sFree = [&](std::size_t j) { return s_[j] > eps_ + tol && s_[j] < 1.0 - eps_ - tol; };
    const bool v0Free = v0_ > tol && v0_ < v0Max_ - tol;
    double r = 0.0;
    for (std::size_t i = 0; i <= n_; ++i) {
      const bool leftOk = i == 0 ? v0Free : sFree(i - 1);
      const bool rightOk = i == n_ || sFree(i);
      if (!leftOk || !rightOk) continue;
      r = std::max(r, std::abs(g[i]) / (w_[i] * h_));
    }
    return r;
  }

  double projected_gradient_norm(double Gv0, const std::vector<double>& Gs) const {
    double m = std::abs(std::clamp(v0_ - Gv0 / h_, 0.0, v0Max_) - v0_);
    for (std::size_t j = 0; j < n_; ++j) {
      m = std::max(m, std::abs(std::clamp(s_[j] - Gs[j] / h_, eps_, 1.0 - eps_) - s_[j]));
    }
    return m;
  }

  // Newton step in node space restricted to directions with d_{j+1} = d_j for active slopes
  // and d_0 = 0 when v_0 is active. Nodes tied by active slopes form groups; the reduced
  // Hessian over groups is tridiagonal.
  std::vector<double> newton_direction(const std::vector<double>& v, const std::vector<double>& g, bool v0Active,
                                       const std::vector<char>& sActive) const {
    std::vector<std::size_t> groupOf(n_ + 1);
    std::size_t K = 0;
    groupOf[0] = 0;
    for (std::size_t j = 0; j < n_; ++j) {
      if (!sActive[j]) ++K;
      groupOf[j + 1] = K;
    }
    ++K;
    std::vector<double> diag(K, 0.0), off(K, 0.0), rhs(K, 0.0);
    for (std::size_t i = 0; i <= n_; ++i) {
      const std::size_t k = groupOf[i];
      diag[k] += w_[i] * h_ * lambda_ * lambda_ * std::exp(-lambda_ * (H_[i] - v[i]));
      rhs[k] -= g[i];
    }
    for (std::size_t j = 0; j < n_; ++j) {
      if (sActive[j]) continue;
      const double c = d2phi(s_[j]) / h_;
      const std::size_t k = groupOf[j];
      diag[k] += c;
      diag[k + 1] += c;
      off[k] -= c;  // coupling between k and k+1
    }
    const double damping = 1e-12 * *std::max_element(diag.begin(), diag.end());
    for (double& x : diag) x += damping;
    const std::size_t first = v0Active ? 1 : 0;
    std::vector<double> D(K, 0.0);
    if (first < K) {
      // Thomas algorithm on groups first..K-1.
      const std::size_t m = K - first;
      std::vector<double> cp(m, 0.0), dp(m, 0.0);
      for (std::size_t r = 0; r < m; ++r) {
        const std::size_t k = first + r;
        const double lower = r == 0 ? 0.0 : off[k - 1];
        const double denom = diag[k] - (r == 0 ? 0.0 : lower * cp[r - 1]);
        cp[r] = (k + 1 < K) ? off[k] / denom : 0.0;
        dp[r] = (rhs[k] - (r == 0 ? 0.0 : lower * dp[r - 1])) / denom;
      }
      for (std::size_t r = m; r-- > 0;) {
        D[first + r] = dp[r] - (r + 1 < m ? cp[r] * D[first + r + 1] : 0.0);
      }
    }
    std::vector<double> d(n_ + 1);
    for (std::size_t i = 0; i <= n_; ++i) d[i] = D[groupOf[i]];
    return d;
  }

  const ObstacleSpec& spec_;
  double lambda_;
  double eps_;
  std::size_t n_ = 0;
  double h_ = 0.0;
  std::vector<double> u_, H_, w_;
  double v0Max_ = 0.0;
  double v0_ = 0.0;
  std::vector<double> s_;
};

}  // namespace

PiecewiseFn solve_lambda_regularized(const ObstacleSpec& spec, double lambda, double delta, double eps, double h,
                                     RegularizedReport* report) {
  spec.validate();
  if (!(lambda > 0.0)) throw std::invalid_argument("lambda must be positive");
  if (!(delta > 0.0 && delta < spec.b - spec.a)) throw std::invalid_argument("delta must lie in (0, b - a)");
  if (!(eps > 0.0 && eps <= spec.dH(spec.a + delta) * (1.0 + 1e-12) && eps < 0.5))
    throw std::invalid_argument("eps must satisfy 0 < eps <= H'(a + delta)");
  RegularizedSolver solver(spec, lambda, delta, eps, h);
  RegularizedReport rep;
  solver.solve(rep);
  if (!rep.converged) {
    throw std::runtime_error("regularized solver did not converge within " +
                             std::to_string(kRegularizedMaxIterations) + " iterations (residual " +
                             std::to_string(rep.residual) + ")");
  }
  // On [a, a + delta] extend by min(linear, H).
  std::vector<double> us, vs;
  const double slope = rep.values.front() / delta;
  constexpr int kSub = 16;
  for (int k = 0; k < kSub; ++k) {
    const double u = spec.a + delta * k / kSub;
    us.push_back(u);
    vs.push_back(std::min(slope * (u - spec.a), std::max(0.0, spec.H(u))));
  }
  vs.front() = 0.0;
  us.insert(us.end(), rep.grid.begin(), rep.grid.end());
  vs.insert(vs.end(), rep.values.begin(), rep.values.end());
  if (report) *report = std::move(rep);
  return PiecewiseFn::polyline(us, vs);
}

}  // namespace asep
