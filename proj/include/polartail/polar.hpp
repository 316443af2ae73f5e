#pragma once

#include <span>
#include <vector>

#include "polartail/problem.hpp"

namespace polartail {

// L1 polar coordinates: s = sum(x), theta = x / s. theta sums to one and may
// have negative entries.
struct PolarPoint {
  double s = 0.0;
  std::vector<double> theta;
};

PolarPoint to_polar(std::span<const double> x);
std::vector<double> from_polar(const PolarPoint& p);

// log f_(S,Theta)(s, theta) = log f_X(s theta) + (d-1) log|s|, as a density
// in the first d-1 coordinates of theta.
double polar_joint_log_pdf(const ProblemSpec& spec, double s, std::span<const double> theta);
double polar_joint_log_pdf(const ProblemSpec& spec, const PolarPoint& p);

// Throws std::invalid_argument unless |sum(theta) - 1| <= tol.
void require_simplex(std::span<const double> theta, double tol = 1e-9);

}  // namespace polartail
