#pragma once

#include <boost/math/quadrature/gauss_kronrod.hpp>
#include <boost/math/quadrature/tanh_sinh.hpp>
#include <cmath>
#include <algorithm>
#include <limits>
#include <stdexcept>

namespace polartail::quad {

inline constexpr double kNegligibleL1 = 1e-290;

// Adaptive Gauss-Kronrod on a finite interval, resolved to the larger of
// rel_tol |integral| and abs_tol (the relative part capped at 1e-3).
template <unsigned Points = 61, class F>
double integrate_abs(F&& f, double a, double b, double rel_tol, double abs_tol, int max_depth = 20) {
  if (a == b) return 0.0;
  using GK = boost::math::quadrature::gauss_kronrod<double, Points>;
  double err = 0.0;
  double l1 = 0.0;
  // Integrate over [0, 1] with the Jacobian folded in: Boost's adaptive
  // refinement compares an error estimate taken on the reference interval
  // against a tolerance in user units, which never converges on narrow panels.
  const double width = b - a;
  auto unit = [&](double u) -> double { return width * f(a + width * u); };
  const double coarse = GK::integrate(unit, 0.0, 1.0, 0, rel_tol, &err, &l1);
  if (!std::isfinite(coarse)) throw std::runtime_error("quadrature produced a non-finite value");
  // Denormal integrands have no meaningful relative error; refining them
  // would run to max_depth.
  if (l1 < kNegligibleL1 || err <= std::max(rel_tol * l1, abs_tol) || max_depth == 0) return coarse;
  const double tol = std::clamp(abs_tol / l1, rel_tol, std::max(rel_tol, 1e-3));
  const double v = GK::integrate(unit, 0.0, 1.0, static_cast<unsigned>(max_depth), tol, &err, &l1);
  if (!std::isfinite(v)) throw std::runtime_error("quadrature produced a non-finite value");
  return v;
}

template <unsigned Points = 61, class F>
double integrate(F&& f, double a, double b, double rel_tol = 1e-12, int max_depth = 20) {
  return integrate_abs<Points>(f, a, b, rel_tol, 0.0, max_depth);
}

// tanh-sinh, for integrands with endpoint singularities.
template <class F>
double integrate_singular(F&& f, double a, double b, double rel_tol = 1e-10) {
  thread_local boost::math::quadrature::tanh_sinh<double> ts;
  auto fn = [&f](double x) -> double { return f(x); };
  return ts.integrate(fn, a, b, rel_tol);
}

// Integral over [a, b) (b may be +inf) on panels of doubling width starting
// at `first_width`; each panel is resolved to rel_tol of the larger of itself
// and the running total. With an infinite b it stops once three consecutive
// panels each add less than rel_tol of a nonzero total. Suited to integrands
// whose mass sits near a at an unknown scale.
template <unsigned Points = 61, class F>
double integrate_panels(F&& f, double a, double b, double first_width, double rel_tol = 1e-12,
                        int max_panels = 2000) {
  double total = 0.0;
  double lo = a;
  double width = first_width;
  int quiet = 0;
  for (int k = 0; k < max_panels && lo < b; ++k) {
    const double hi = std::min(b, lo + width);
    // A panel holding a negligible share of the mass need not be resolved
    // to rel_tol of itself.
    const double part = integrate_abs<Points>(f, lo, hi, rel_tol, rel_tol * std::abs(total));
    total += part;
    quiet = (total != 0.0 && std::abs(part) <= rel_tol * std::abs(total)) ? quiet + 1 : 0;
    if (quiet >= 3 && !std::isfinite(b)) break;
    lo = hi;
    width *= 2.0;
    if (!std::isfinite(lo)) break;
  }
  return total;
}

}  // namespace polartail::quad
