#include "polartail/oracle.hpp"

#include <boost/math/tools/roots.hpp>
#include <cmath>
#include <limits>
#include <stdexcept>

#include "polartail/quadrature.hpp"

namespace polartail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kInnerTol = 1e-11;
constexpr double kOuterTol = 1e-10;
constexpr int kInnerPanels = 24;

void require_2d(const ProblemSpec& spec) {
  if (spec.dim() != 2) throw std::invalid_argument("two-dimensional oracle needs d = 2");
}

// s - 2 + (2 + s) e^-s, with the series sum_{m>=3} (-1)^m (2-m) s^m / m! for
// small s where the closed form cancels.
double clayton_angular_norm(double s) {
  if (s >= 1.0) return s - 2.0 + (2.0 + s) * std::exp(-s);
  double term = s * s / 2.0;
  double acc = 0.0;
  for (int m = 3; m < 40; ++m) {
    term *= -s / m;
    acc += (2.0 - m) * term;
  }
  return acc;
}

// Integral of g over [0, width] on panels of doubling size from 0; the first
// panel uses tanh-sinh to tolerate integrable endpoint singularities.
template <class G>
double integrate_from_edge(G&& g, double width) {
  const double first = std::ldexp(width, -kInnerPanels);
  double total = quad::integrate_singular(g, 0.0, first, kInnerTol);
  total += quad::integrate_panels<31>(g, first, width, first, kInnerTol);
  return total;
}

}  // namespace

ProblemSpec exp_example_spec(ExpExample kind) {
  std::vector<Marginal> m{Marginal::exponential(1.0), Marginal::exponential(1.0)};
  switch (kind) {
    case ExpExample::Ind: return {m, Copula::independent(2)};
    case ExpExample::Clayton1: return {m, Copula::clayton(1.0, 2)};
    case ExpExample::AMHneg1: return {m, Copula::amh(-1.0, 2)};
  }
  throw std::invalid_argument("unknown example");
}

double exp_sum_density(ExpExample kind, double s) {
  if (!(s > 0.0)) throw std::invalid_argument("exp_sum_density needs s > 0");
  if (s == kInf) return 0.0;
  const double q = std::exp(-s);
  const double one_minus_q = -std::expm1(-s);
  switch (kind) {
    case ExpExample::Ind:
      return s * q;
    case ExpExample::Clayton1: {
      if (s >= 1.0) return 4.0 * q * (0.5 * s * (1.0 + q) - one_minus_q) / std::pow(one_minus_q, 3);
      // (2 - 2 cosh s + s sinh s) / (cosh s - 1)^2 with both pieces as
      // series and s^4 divided out of each, so tiny s neither cancels nor
      // underflows.
      double num = 0.0;
      double term = 1.0 / 24.0;
      for (int n = 2; n < 30; ++n) {
        num += (2.0 * n - 2.0) * term;
        term *= s * s / ((2.0 * n + 1.0) * (2.0 * n + 2.0));
      }
      const double half = 0.5 * s;
      const double r = half > 0.0 ? std::sinh(half) / half : 1.0;
      return 4.0 * num / (r * r * r * r);
    }
    case ExpExample::AMHneg1:
      return 4.0 * q * one_minus_q / std::pow(1.0 + q, 3);
  }
  throw std::invalid_argument("unknown example");
}

double exp_angular_density(ExpExample kind, double s, double theta) {
  if (!(s > 0.0)) throw std::invalid_argument("exp_angular_density needs s > 0");
  if (!(theta > 0.0 && theta < 1.0)) throw std::invalid_argument("exp_angular_density needs theta in (0,1)");
  switch (kind) {
    case ExpExample::Ind:
      return 1.0;
    case ExpExample::Clayton1:
      return s * -std::expm1(-s * (1.0 - theta)) * -std::expm1(-s * theta) / clayton_angular_norm(s);
    case ExpExample::AMHneg1:
      return s * (std::exp(-s * theta) + std::exp(-s * (1.0 - theta))) / (-2.0 * std::expm1(-s));
  }
  throw std::invalid_argument("unknown example");
}

double sum_density_2d(const ProblemSpec& spec, double s) {
  require_2d(spec);
  const double a = spec.marginal(0).support_min();
  const double b = s - spec.marginal(1).support_min();
  if (!(b > a)) return 0.0;
  const double half = 0.5 * (b - a);
  // Each side is parametrised by its distance y to the edge so that the
  // small coordinate is exact; s - x1 would carry an absolute error of
  // eps * s, which swamps the tolerance where that coordinate is tiny.
  auto f = [&](double x1, double x2) {
    const double x[2] = {x1, x2};
    return std::exp(joint_log_pdf(spec, x));
  };
  const double m1 = spec.marginal(1).support_min();
  const double left = integrate_from_edge([&](double y) { return f(a + y, s - (a + y)); }, half);
  const double right = integrate_from_edge([&](double y) { return f(b - y, m1 + y); }, half);
  return left + right;
}

double brute_truth_2d(const ProblemSpec& spec, double gamma) {
  require_2d(spec);
  if (std::isnan(gamma)) throw std::invalid_argument("brute_truth_2d: gamma is NaN");
  const double s_min = spec.marginal(0).support_min() + spec.marginal(1).support_min();
  const double lo = std::max(gamma, s_min);
  auto density = [&](double s) { return sum_density_2d(spec, s); };
  const double width = 0.1 * std::max(1.0, std::abs(lo));
  const double v = quad::integrate_panels<31>(density, lo, kInf, width, kOuterTol);
  if (!std::isfinite(v) || v < 0.0) throw std::runtime_error("brute_truth_2d: quadrature failed");
  return std::min(v, 1.0);
}

double gamma_for_target_2d(const ProblemSpec& spec, double target) {
  if (!(target > 0.0 && target < 1.0)) throw std::invalid_argument("target probability must lie in (0,1)");
  const double log_target = std::log(target);
  auto f = [&](double log_g) { return std::log(brute_truth_2d(spec, std::exp(log_g))) - log_target; };
  double lo = 0.0;
  double f_lo = f(lo);
  for (int i = 0; f_lo < 0.0; ++i) {
    if (i > 200) throw std::runtime_error("gamma_for_target_2d: cannot bracket");
    lo -= 1.0;
    f_lo = f(lo);
  }
  double hi = lo + 1.0;
  double f_hi = f(hi);
  for (int i = 0; f_hi > 0.0; ++i) {
    if (i > 200) throw std::runtime_error("gamma_for_target_2d: cannot bracket");
    lo = hi;
    f_lo = f_hi;
    hi += 1.0;
    f_hi = f(hi);
  }
  std::uintmax_t iters = 100;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi,
      [](double x, double y) { return std::abs(x - y) <= 1e-10; }, iters);
  return std::exp(0.5 * (r.first + r.second));
}

ProblemSpec fig1_spec() {
  return ProblemSpec::independent({Marginal::lognormal(0.0, 1.0), Marginal::lognormal(0.0, 0.75)});
}

double fig1_ratio(double gamma, AsymTerms terms) {
  const ProblemSpec spec = fig1_spec();
  double asym = spec.marginal(0).survival(gamma);
  if (terms == AsymTerms::TwoTerms) asym += spec.marginal(1).survival(gamma);
  return asym / brute_truth_2d(spec, gamma);
}

std::vector<Fig1Point> fig1_curve(int points) {
  if (points < 2) throw std::invalid_argument("fig1_curve needs at least two points");
  const ProblemSpec spec = fig1_spec();
  const double lo = std::log(gamma_for_target_2d(spec, 1e-2));
  const double hi = std::log(gamma_for_target_2d(spec, 1e-12));
  std::vector<Fig1Point> out;
  for (int k = 0; k < points; ++k) {
    const double g = std::exp(lo + (hi - lo) * k / (points - 1));
    const double truth = brute_truth_2d(spec, g);
    const double one = spec.marginal(0).survival(g);
    const double two = one + spec.marginal(1).survival(g);
    out.push_back({g, truth, one / truth, two / truth});
  }
  return out;
}

}  // namespace polartail
