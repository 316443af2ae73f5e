#include "polartail/baselines.hpp"

#include <algorithm>
#include <boost/math/distributions/gamma.hpp>
#include <cmath>
#include <limits>
#include <random>
#include <stdexcept>
#include <vector>

#include "polartail/quadrature.hpp"

namespace polartail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_replicates(std::size_t R) {
  if (R < 2) throw std::invalid_argument("estimators need R >= 2");
}

}  // namespace

EstimatorResult cmc_estimate(const ProblemSpec& spec, double gamma, std::size_t R,
                             std::uint64_t seed, const Execution& exec) {
  require_replicates(R);
  const int d = spec.dim();
  const Moments m = run_replicates(R, seed, exec, [&]() -> ReplicateFn {
    return [&, x = std::vector<double>(d)](Rng& rng) mutable {
      sample_joint(spec, rng, x);
      double s = 0.0;
      for (double v : x) s += v;
      return s > gamma ? 1.0 : 0.0;
    };
  });
  return make_result(m, 1.0, seed);
}

double ak_replicate(const ProblemSpec& spec, double gamma, std::span<const double> x) {
  const int d = spec.dim();
  // Leave-one-out maxima and sums from prefix/suffix scans.
  std::vector<double> max_pre(d + 1, -kInf), max_suf(d + 1, -kInf);
  std::vector<double> sum_pre(d + 1, 0.0), sum_suf(d + 1, 0.0);
  for (int j = 0; j < d; ++j) {
    max_pre[j + 1] = std::max(max_pre[j], x[j]);
    sum_pre[j + 1] = sum_pre[j] + x[j];
  }
  for (int j = d - 1; j >= 0; --j) {
    max_suf[j] = std::max(max_suf[j + 1], x[j]);
    sum_suf[j] = sum_suf[j + 1] + x[j];
  }
  std::vector<double> rest;
  if (!spec.independent()) rest.resize(d - 1);
  double total = 0.0;
  for (int i = 0; i < d; ++i) {
    const double threshold = std::max(std::max(max_pre[i], max_suf[i + 1]),
                                      gamma - (sum_pre[i] + sum_suf[i + 1]));
    if (spec.independent()) {
      total += spec.marginal(i).survival(threshold);
    } else {
      for (int j = 0, r = 0; j < d; ++j)
        if (j != i) rest[r++] = x[j];
      total += conditional_survival(spec, i, threshold, rest);
    }
  }
  return total;
}

EstimatorResult ak_estimate(const ProblemSpec& spec, double gamma, std::size_t R,
                            std::uint64_t seed, const Execution& exec) {
  require_replicates(R);
  const int d = spec.dim();
  const bool iid = spec.iid();
  const Moments m = run_replicates(R, seed, exec, [&]() -> ReplicateFn {
    return [&, x = std::vector<double>(d)](Rng& rng) mutable {
      if (!iid) {
        sample_joint(spec, rng, x);
        return ak_replicate(spec, gamma, x);
      }
      const Marginal& f = spec.marginal(0);
      double s = 0.0;
      double mx = -kInf;
      for (int j = 0; j < d - 1; ++j) {
        const double v = f.sample(rng);
        s += v;
        mx = std::max(mx, v);
      }
      return d * f.survival(std::max(mx, gamma - s));
    };
  });
  return make_result(m, 1.0, seed);
}

TiltedMoments tilted_moments(double beta, double lambda, double theta) {
  if (theta == 0.0) {
    const double mean = lambda * std::tgamma(1.0 + 1.0 / beta);
    const double second = lambda * lambda * std::tgamma(1.0 + 2.0 / beta);
    return {0.0, mean, second - mean * mean};
  }
  // x = lambda u^(1/beta) turns the Weibull law into Exp(1) in u; the tilted
  // integrand exp(theta x - u) peaks at u* and is scaled by its peak value.
  const double inv_beta = 1.0 / beta;
  const double u_peak = theta > 0.0 ? std::pow(theta * lambda * inv_beta, beta / (beta - 1.0)) : 0.0;
  const double h_peak = theta * lambda * std::pow(u_peak, inv_beta) - u_peak;
  // theta x and u cancel to h_peak, so the integrand carries a relative
  // rounding noise of about eps (theta x + u); asking for less never converges.
  const double tol = std::max(1e-13, 64.0 * std::numeric_limits<double>::epsilon() * (std::abs(h_peak) + 2.0 * u_peak));
  auto integral = [&](auto&& g) {
    auto f = [&](double u) {
      const double x = lambda * std::pow(u, inv_beta);
      return g(x) * std::exp(theta * x - u - h_peak);
    };
    const double width = 1.0 + std::sqrt(u_peak);
    double v = quad::integrate_panels(f, u_peak, kInf, width, tol);
    if (u_peak > 0.0) v += quad::integrate(f, 0.0, u_peak, tol);
    return v;
  };
  const double i0 = integral([](double) { return 1.0; });
  const double mean = integral([](double x) { return x; }) / i0;
  const double var = integral([&](double x) { return (x - mean) * (x - mean); }) / i0;
  if (!(i0 > 0.0) || !std::isfinite(mean) || !(var > 0.0))
    throw std::runtime_error("tilted moment quadrature failed");
  return {std::log(i0) + h_peak, mean, var};
}

double tilted_log_density(const TiltingParams& p, double x) {
  if (!(x > 0.0)) return -kInf;
  const double y = x / p.lambda;
  return std::log(p.beta / p.lambda) + (p.beta - 1.0) * std::log(y) - std::pow(y, p.beta) +
         p.theta_star * x - p.kappa;
}

double proposal_log_density(const TiltingParams& p, double x) {
  if (!(x > 0.0)) return -kInf;
  const double k = p.proposal_shape;
  return k * std::log(p.proposal_rate) - std::lgamma(k) + (k - 1.0) * std::log(x) - p.proposal_rate * x;
}

namespace {

double log_ratio(const TiltingParams& p, double x) {
  return tilted_log_density(p, x) - proposal_log_density(p, x);
}

// Stationary point of log_ratio; its derivative (beta - k)/x + theta + rate
// - beta x^(beta-1) / lambda^beta is decreasing in x for k <= beta.
double ratio_argmax(const TiltingParams& p) {
  const double beta = p.beta;
  const double slope = p.theta_star + p.proposal_rate;
  const double lb = std::pow(p.lambda, beta);
  if (p.proposal_shape == beta) return std::pow(lb * slope / beta, 1.0 / (beta - 1.0));
  auto deriv = [&](double x) {
    return (beta - p.proposal_shape) / x + slope - beta * std::pow(x, beta - 1.0) / lb;
  };
  double lo = p.tilted_mean;
  double hi = p.tilted_mean;
  for (int i = 0; i < 200 && deriv(lo) <= 0.0; ++i) lo *= 0.5;
  for (int i = 0; i < 200 && deriv(hi) >= 0.0; ++i) hi *= 2.0;
  for (int i = 0; i < 200; ++i) {
    const double mid = std::sqrt(lo * hi);
    (deriv(mid) > 0.0 ? lo : hi) = mid;
    if (hi / lo - 1.0 < 1e-14) break;
  }
  return std::sqrt(lo * hi);
}

std::vector<double> proposal_grid(const TiltingParams& p, int n) {
  const boost::math::gamma_distribution<double> g(p.proposal_shape, 1.0 / p.proposal_rate);
  std::vector<double> xs(n);
  for (int i = 0; i < n; ++i) {
    // Quantile levels spread in log-odds from 1e-9 to 1 - 1e-9.
    const double z = -20.7 + 41.4 * i / (n - 1);
    const double q = 1.0 / (1.0 + std::exp(-z));
    xs[i] = boost::math::quantile(g, q);
  }
  return xs;
}

}  // namespace

TiltingParams tilt_solve(double beta, double lambda, int d, double gamma) {
  if (!(beta > 1.0)) throw std::invalid_argument("tilting needs beta > 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("tilting needs lambda > 0");
  if (d < 1) throw std::invalid_argument("tilting needs d >= 1");
  TiltingParams p;
  p.beta = beta;
  p.lambda = lambda;
  p.d = d;
  p.gamma = gamma;

  const TiltedMoments m0 = tilted_moments(beta, lambda, 0.0);
  const double base = d * m0.mean;
  if (!(gamma >= base * (1.0 - 1e-12)))
    throw std::invalid_argument("tilting needs gamma at or above the untilted mean of the sum");

  TiltedMoments m = m0;
  double theta = 0.0;
  if (gamma > base * (1.0 + 1e-12)) {
    double lo = 0.0;
    double hi = 1.0;
    int it = 0;
    while (d * tilted_moments(beta, lambda, hi).mean < gamma) {
      lo = hi;
      hi *= 2.0;
      if (++it > 200) throw std::runtime_error("tilt_solve: root not bracketed");
    }
    theta = 0.5 * (lo + hi);
    for (it = 0; it < 200; ++it) {
      m = tilted_moments(beta, lambda, theta);
      const double g = d * m.mean - gamma;
      if (std::abs(g) <= 1e-12 * gamma) break;
      (g < 0.0 ? lo : hi) = theta;
      double next = theta - g / (d * m.var);
      if (!(next > lo && next < hi)) next = 0.5 * (lo + hi);
      theta = next;
      if (it == 199) throw std::runtime_error("tilt_solve: Newton iteration did not converge");
    }
  }
  p.theta_star = theta;
  p.kappa = m.kappa;
  p.tilted_mean = m.mean;
  p.tilted_var = m.var;

  // Gamma proposal matched to the tilted mean and variance, with the shape
  // capped at beta so the density ratio stays bounded at the origin.
  const double shape = m.mean * m.mean / m.var;
  if (shape > beta) {
    p.proposal_shape = beta;
    p.proposal_rate = beta / m.mean;
  } else {
    p.proposal_shape = shape;
    p.proposal_rate = m.mean / m.var;
  }

  double sup = log_ratio(p, ratio_argmax(p));
  for (double x : proposal_grid(p, 1000)) sup = std::max(sup, log_ratio(p, x));
  p.envelope_log = sup + 1e-3;
  for (double x : proposal_grid(p, 10000))
    if (log_ratio(p, x) > p.envelope_log)
      throw std::runtime_error("tilt_solve: acceptance-rejection envelope failed validation");
  return p;
}

double sample_tilted(const TiltingParams& p, Rng& rng, std::size_t* proposals) {
  std::gamma_distribution<double> proposal(p.proposal_shape, 1.0 / p.proposal_rate);
  for (int attempt = 1; attempt <= 1000000; ++attempt) {
    const double x = proposal(rng);
    if (std::log(uniform_open(rng)) <= log_ratio(p, x) - p.envelope_log) {
      if (proposals) *proposals += static_cast<std::size_t>(attempt);
      return x;
    }
  }
  throw std::runtime_error("sample_tilted: acceptance-rejection did not accept");
}

EstimatorResult tilt_estimate(const TiltingParams& p, std::size_t R, std::uint64_t seed,
                              const Execution& exec) {
  require_replicates(R);
  const double log_scale = p.d * p.kappa;
  const Moments m = run_replicates(R, seed, exec, [&]() -> ReplicateFn {
    return [&](Rng& rng) {
      double s = 0.0;
      for (int j = 0; j < p.d; ++j) s += sample_tilted(p, rng);
      return s > p.gamma ? std::exp(-p.theta_star * s + log_scale) : 0.0;
    };
  });
  return make_result(m, 1.0, seed);
}

EstimatorResult tilt_estimate(double beta, double lambda, int d, double gamma, std::size_t R,
                              std::uint64_t seed, const Execution& exec) {
  return tilt_estimate(tilt_solve(beta, lambda, d, gamma), R, seed, exec);
}

}  // namespace polartail
