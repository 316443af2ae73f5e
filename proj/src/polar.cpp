#include "polartail/polar.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace polartail {

PolarPoint to_polar(std::span<const double> x) {
  if (x.empty()) throw std::invalid_argument("to_polar: empty vector");
  double s = 0.0;
  for (double v : x) s += v;
  if (s == 0.0 || !std::isfinite(s)) throw std::invalid_argument("to_polar: sum must be finite and nonzero");
  PolarPoint p{s, std::vector<double>(x.size())};
  for (std::size_t i = 0; i < x.size(); ++i) p.theta[i] = x[i] / s;
  return p;
}

std::vector<double> from_polar(const PolarPoint& p) {
  std::vector<double> x(p.theta.size());
  for (std::size_t i = 0; i < x.size(); ++i) x[i] = p.s * p.theta[i];
  return x;
}

void require_simplex(std::span<const double> theta, double tol) {
  double sum = 0.0;
  double scale = 1.0;
  for (double t : theta) {
    sum += t;
    scale += std::abs(t);
  }
  if (!(std::abs(sum - 1.0) <= tol * scale))
    throw std::invalid_argument("angle does not lie on the simplex sum(theta) = 1");
}

double polar_joint_log_pdf(const ProblemSpec& spec, double s, std::span<const double> theta) {
  const int d = spec.dim();
  if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("polar_joint_log_pdf: wrong dimension");
  if (s == 0.0) return -std::numeric_limits<double>::infinity();
  std::vector<double> x(d);
  for (int i = 0; i < d; ++i) x[i] = s * theta[i];
  const double lf = joint_log_pdf(spec, x);
  return d == 1 ? lf : lf + (d - 1) * std::log(std::abs(s));
}

double polar_joint_log_pdf(const ProblemSpec& spec, const PolarPoint& p) {
  return polar_joint_log_pdf(spec, p.s, p.theta);
}

}  // namespace polartail
