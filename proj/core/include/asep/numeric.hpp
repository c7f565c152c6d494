#pragma once

#include <cmath>
#include <functional>
#include <limits>
#include <span>

namespace asep {

// Infinite costs are returned as this value, never thrown.
inline constexpr double kInfiniteCost = std::numeric_limits<double>::infinity();

// Knot positions closer than this are treated as equal.
inline constexpr double kKnotTolerance = 1e-12;

// x*ln(x/y) with 0*ln(0) = 0.
inline double xlogxy(double x, double y) {
  return x == 0.0 ? 0.0 : x * std::log(x / y);
}

// Bernoulli relative entropy density theta*ln(theta/rho) + (1-theta)*ln((1-theta)/(1-rho)).
inline double entropy_density(double theta, double rho) {
  return xlogxy(theta, rho) + xlogxy(1.0 - theta, 1.0 - rho);
}

double entropy_density_derivative(double theta, double rho);

// Integral of entropy_density along a density that is linear from d0 to d1 over a piece of given length.
double entropy_of_linear_piece(double d0, double d1, double length, double rho);

double gauss_legendre(const std::function<double(double)>& f, double a, double b);

double adaptive_simpson(const std::function<double(double)>& f, double a, double b, double tol,
                        int maxDepth = 50);

double log_sum_exp(std::span<const double> xs);
double log_sum_exp(double a, double b);

// Finds a root of a monotone function on [lo, hi] that changes sign there.
double bisect(const std::function<double(double)>& f, double lo, double hi, double tol = 1e-12,
              int maxIter = 200);

}  // namespace asep
