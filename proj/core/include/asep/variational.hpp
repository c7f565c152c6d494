#pragma once

#include <functional>
#include <optional>
#include <ostream>
#include <string_view>
#include <vector>

#include "asep/model.hpp"

namespace asep {

struct ObstacleSpec {
  double a = 0.0;
  double b = 1.0;
  std::function<double(double)> H;
  std::function<double(double)> dH;
  double rho = 0.5;

  // Nonnegativity, grid midpoint convexity and monotonicity of H.
  void validate(double gridStep = 1e-3) const;
};

enum class Problem { One, Two };

// H(u) = G(u - A). Problem One lives on [A - gamma, A + gamma], Problem Two on [0, A + gamma].
ObstacleSpec problem_obstacle(Problem problem, double A, const ModelParams& params);

struct CriticalPoints {
  std::optional<double> zRho;
  std::optional<double> yTan;
};

CriticalPoints critical_points(const ObstacleSpec& spec);

// Continuous function made of quadratic pieces c0 + c1 s + c2 s^2 (s = u - x0) or stored analytic pieces.
class PiecewiseFn {
 public:
  struct Segment {
    double x0;
    double x1;
    bool analytic;
    double c0, c1, c2;
    std::function<double(double)> f;
    std::function<double(double)> df;
  };

  void add_poly(double x0, double x1, double c0, double c1, double c2 = 0.0);
  void add_analytic(double x0, double x1, std::function<double(double)> f, std::function<double(double)> df);
  static PiecewiseFn polyline(const std::vector<double>& us, const std::vector<double>& vs);

  double operator()(double u) const;
  double derivative(double u) const;
  double start() const { return segs_.front().x0; }
  double end() const { return segs_.back().x1; }
  const std::vector<Segment>& segments() const { return segs_; }
  std::vector<double> junctions() const;
  bool empty() const { return segs_.empty(); }

 private:
  const Segment& find(double u) const;
  std::vector<Segment> segs_;
};

double cost_K(const PiecewiseFn& v, const ModelParams& params);

// Problem One includes the forced vacuum v = 0 on [0, A - gamma], so it starts at 0 like Problem Two.
PiecewiseFn analytic_minimizer(Problem problem, double A, const ModelParams& params);

struct RegularizedReport {
  int iterations = 0;
  double residual = 0.0;  // max discrete Euler-Lagrange residual over unconstrained nodes
  double objective = 0.0;
  bool converged = false;
  bool convex = false;
  std::vector<double> grid;
  std::vector<double> values;
};

inline constexpr int kRegularizedMaxIterations = 2000;

PiecewiseFn solve_lambda_regularized(const ObstacleSpec& spec, double lambda, double delta, double eps, double h,
                                     RegularizedReport* report = nullptr);

enum class MinimizerCase { ZeroCost, ObstacleThenSlope, Obstacle, TangentObstacleSlope };

std::string_view to_string(MinimizerCase c);
MinimizerCase detect_minimizer_case(const ObstacleSpec& spec);
PiecewiseFn general_minimizer(const ObstacleSpec& spec, MinimizerCase* detected = nullptr);

void write_minimizer_csv(std::ostream& os, const PiecewiseFn& v, const ObstacleSpec& spec, double step);

}  // namespace asep
