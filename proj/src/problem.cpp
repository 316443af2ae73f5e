#include "polartail/problem.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace polartail {

namespace {
constexpr double kInf = std::numeric_limits<double>::infinity();
}

ProblemSpec::ProblemSpec(std::vector<Marginal> marginals, Copula copula)
    : marginals_(std::move(marginals)), copula_(std::move(copula)) {
  if (marginals_.empty()) throw std::invalid_argument("problem needs at least one marginal");
  if (copula_.dim() != dim())
    throw std::invalid_argument("copula dimension does not match number of marginals");
}

ProblemSpec ProblemSpec::independent(std::vector<Marginal> marginals) {
  const int d = static_cast<int>(marginals.size());
  return {std::move(marginals), Copula::independent(d)};
}

bool ProblemSpec::iid() const {
  return independent() &&
         std::all_of(marginals_.begin(), marginals_.end(),
                     [&](const Marginal& m) { return m == marginals_.front(); });
}

double joint_log_pdf(const ProblemSpec& spec, std::span<const double> x) {
  const int d = spec.dim();
  if (static_cast<int>(x.size()) != d) throw std::invalid_argument("joint_log_pdf: wrong dimension");
  double acc = 0.0;
  for (int i = 0; i < d; ++i) {
    const double lp = spec.marginal(i).log_pdf(x[i]);
    if (lp == -kInf) return -kInf;
    acc += lp;
  }
  if (spec.independent()) return acc;
  std::vector<double> u(d);
  std::vector<double> u_bar(d);
  for (int i = 0; i < d; ++i) {
    u[i] = spec.marginal(i).cdf(x[i]);
    u_bar[i] = spec.marginal(i).survival(x[i]);
  }
  return acc + spec.copula().log_density(u, u_bar);
}

void sample_joint(const ProblemSpec& spec, Rng& rng, std::span<double> x) {
  const int d = spec.dim();
  if (spec.independent()) {
    for (int i = 0; i < d; ++i) x[i] = spec.marginal(i).sample(rng);
    return;
  }
  std::vector<double> u(d);
  std::vector<double> u_bar(d);
  spec.copula().sample(rng, u, u_bar);
  for (int i = 0; i < d; ++i) x[i] = spec.marginal(i).quantile_pair(u[i], u_bar[i]);
}

std::vector<double> sample_joint(const ProblemSpec& spec, Rng& rng) {
  std::vector<double> x(spec.dim());
  sample_joint(spec, rng, x);
  return x;
}

double conditional_survival(const ProblemSpec& spec, int i, double x,
                            std::span<const double> x_rest) {
  const int d = spec.dim();
  if (i < 0 || i >= d) throw std::out_of_range("conditional_survival: index out of range");
  if (static_cast<int>(x_rest.size()) != d - 1)
    throw std::invalid_argument("conditional_survival: x_rest must hold d-1 values");
  const Marginal& mi = spec.marginal(i);
  if (d == 1 || spec.independent()) return mi.survival(x);

  const Copula& c = spec.copula();
  double rest = 0.0;
  for (int j = 0, r = 0; j < d; ++j) {
    if (j == i) continue;
    const Marginal& mj = spec.marginal(j);
    rest += c.generator(mj.cdf(x_rest[r]), mj.survival(x_rest[r]));
    ++r;
  }
  const SignedLog den = c.inverse_generator_deriv(d - 1, rest);
  if (!std::isfinite(den.log_abs))
    throw std::domain_error("conditional_survival: conditioning density underflows");
  const double b = c.generator(mi.cdf(x), mi.survival(x));
  double log_ratio;
  if (b < 1e-3) {
    // Deep tail: the two logs nearly cancel, so integrate
    // d/dt log|psi^{(d-1)}| over [rest, rest + b] by Simpson's rule instead.
    auto slope = [&](double t) {
      const SignedLog hi = c.inverse_generator_deriv(d, t);
      const SignedLog lo = c.inverse_generator_deriv(d - 1, t);
      return hi.sign * lo.sign * std::exp(hi.log_abs - lo.log_abs);
    };
    log_ratio = b / 6.0 * (slope(rest) + 4.0 * slope(rest + 0.5 * b) + slope(rest + b));
  } else {
    log_ratio = c.inverse_generator_deriv(d - 1, rest + b).log_abs - den.log_abs;
  }
  return std::clamp(-std::expm1(log_ratio), 0.0, 1.0);
}

}  // namespace polartail
