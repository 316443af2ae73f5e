#include "polartail/marginal.hpp"

#include <boost/math/special_functions/erf.hpp>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace polartail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

void require_positive(double v, const char* what) {
  if (!(v > 0.0) || !std::isfinite(v))
    throw std::invalid_argument(std::string("marginal parameter ") + what +
                                " must be finite and > 0");
}

void reject_nan(double x) {
  if (std::isnan(x)) throw std::invalid_argument("marginal evaluated at NaN");
}

}  // namespace

double normal_log_pdf(double z) {
  return -0.5 * z * z - 0.5 * std::log(2.0 * std::numbers::pi);
}

double normal_log_survival(double z) {
  if (z < 30.0) return std::log(0.5 * std::erfc(z / std::numbers::sqrt2));
  // Asymptotic (Mills ratio) series; erfc underflows past z ~ 37.
  const double r = 1.0 / (z * z);
  const double series = 1.0 - r * (1.0 - 3.0 * r * (1.0 - 5.0 * r * (1.0 - 7.0 * r)));
  return normal_log_pdf(z) - std::log(z) + std::log(series);
}

double normal_upper_quantile(double log_p) {
  if (std::isnan(log_p) || log_p > 0.0)
    throw std::invalid_argument("normal_upper_quantile: log probability must be <= 0");
  if (log_p == 0.0) return -kInf;
  if (log_p == -kInf) return kInf;
  if (log_p > -std::numbers::ln2)
    return -normal_upper_quantile(std::log(-std::expm1(log_p)));

  double z;
  const double p = std::exp(log_p);
  if (p > 1e-300) {
    z = std::numbers::sqrt2 * boost::math::erfc_inv(2.0 * p);
  } else {
    const double t = -2.0 * log_p;
    z = std::sqrt(t - std::log(t) - std::log(2.0 * std::numbers::pi));
  }
  // Newton on log survival; converges in one step from the erfc_inv start.
  for (int it = 0; it < 20; ++it) {
    const double ls = normal_log_survival(z);
    const double hazard = std::exp(normal_log_pdf(z) - ls);
    const double step = (ls - log_p) / hazard;
    z += step;
    if (std::abs(step) <= 1e-15 * std::max(1.0, std::abs(z))) break;
  }
  return z;
}

Marginal Marginal::lognormal(double mu, double sigma) {
  if (!std::isfinite(mu)) throw std::invalid_argument("lognormal mu must be finite");
  require_positive(sigma, "sigma");
  return {Family::Lognormal, mu, sigma, 0.0};
}

Marginal Marginal::pareto(double k, double alpha, double mu) {
  require_positive(k, "k");
  require_positive(alpha, "alpha");
  if (!std::isfinite(mu)) throw std::invalid_argument("pareto mu must be finite");
  return {Family::Pareto, k, alpha, mu};
}

Marginal Marginal::weibull(double beta, double lambda) {
  require_positive(beta, "beta");
  require_positive(lambda, "lambda");
  return {Family::Weibull, beta, lambda, 0.0};
}

Marginal Marginal::exponential(double rate) {
  require_positive(rate, "rate");
  return {Family::Exponential, rate, 0.0, 0.0};
}

Marginal Marginal::from_params(std::string_view family, const std::vector<double>& p) {
  auto need = [&](std::size_t lo, std::size_t hi) {
    if (p.size() < lo || p.size() > hi)
      throw std::invalid_argument("wrong number of parameters for " + std::string(family));
  };
  if (family == "lognormal") {
    need(2, 2);
    return lognormal(p[0], p[1]);
  }
  if (family == "pareto") {
    need(2, 3);
    return pareto(p[0], p[1], p.size() == 3 ? p[2] : 0.0);
  }
  if (family == "weibull") {
    need(2, 2);
    return weibull(p[0], p[1]);
  }
  if (family == "exponential") {
    need(1, 1);
    return exponential(p[0]);
  }
  throw std::invalid_argument("unknown marginal family: " + std::string(family));
}

std::string Marginal::family_name() const {
  switch (family_) {
    case Family::Lognormal: return "lognormal";
    case Family::Pareto: return "pareto";
    case Family::Weibull: return "weibull";
    case Family::Exponential: return "exponential";
  }
  return {};
}

std::vector<double> Marginal::params() const {
  switch (family_) {
    case Family::Lognormal: return {a_, b_};
    case Family::Pareto: return {a_, b_, c_};
    case Family::Weibull: return {a_, b_};
    case Family::Exponential: return {a_};
  }
  return {};
}

double Marginal::log_pdf(double x) const {
  reject_nan(x);
  switch (family_) {
    case Family::Lognormal: {
      if (x <= 0.0) return -kInf;
      if (x == kInf) return -kInf;
      const double lx = std::log(x);
      const double z = (lx - a_) / b_;
      return normal_log_pdf(z) - lx - std::log(b_);
    }
    case Family::Pareto: {
      if (x < c_ || x == kInf) return -kInf;
      return std::log(b_ / a_) - (b_ + 1.0) * std::log1p((x - c_) / a_);
    }
    case Family::Weibull: {
      if (x < 0.0 || x == kInf) return -kInf;
      const double y = x / b_;
      if (y == 0.0) {
        if (a_ > 1.0) return -kInf;
        if (a_ < 1.0) return kInf;
        return -std::log(b_);
      }
      return std::log(a_ / b_) + (a_ - 1.0) * std::log(y) - std::pow(y, a_);
    }
    case Family::Exponential: {
      if (x < 0.0 || x == kInf) return -kInf;
      return std::log(a_) - a_ * x;
    }
  }
  return -kInf;
}

double Marginal::pdf(double x) const { return std::exp(log_pdf(x)); }

double Marginal::log_survival(double x) const {
  reject_nan(x);
  switch (family_) {
    case Family::Lognormal:
      if (x <= 0.0) return 0.0;
      return normal_log_survival((std::log(x) - a_) / b_);
    case Family::Pareto:
      if (x <= c_) return 0.0;
      return -b_ * std::log1p((x - c_) / a_);
    case Family::Weibull:
      if (x <= 0.0) return 0.0;
      return -std::pow(x / b_, a_);
    case Family::Exponential:
      if (x <= 0.0) return 0.0;
      return -a_ * x;
  }
  return 0.0;
}

double Marginal::survival(double x) const { return std::exp(log_survival(x)); }

double Marginal::cdf(double x) const {
  reject_nan(x);
  if (family_ == Family::Lognormal) {
    if (x <= 0.0) return 0.0;
    const double z = (std::log(x) - a_) / b_;
    return 0.5 * std::erfc(-z / std::numbers::sqrt2);
  }
  return -std::expm1(log_survival(x));
}

double Marginal::quantile(double u) const {
  if (!(u > 0.0 && u < 1.0)) throw std::invalid_argument("quantile requires u in (0,1)");
  switch (family_) {
    case Family::Lognormal: {
      const double z = u < 0.5 ? -normal_upper_quantile(std::log(u))
                                : normal_upper_quantile(std::log1p(-u));
      return std::exp(a_ + b_ * z);
    }
    case Family::Pareto:
      return c_ + a_ * std::expm1(-std::log1p(-u) / b_);
    case Family::Weibull:
      return b_ * std::pow(-std::log1p(-u), 1.0 / a_);
    case Family::Exponential:
      return -std::log1p(-u) / a_;
  }
  return 0.0;
}

double Marginal::quantile_from_log_survival(double log_s) const {
  if (std::isnan(log_s) || log_s > 0.0)
    throw std::invalid_argument("log survival must be <= 0");
  switch (family_) {
    case Family::Lognormal:
      return std::exp(a_ + b_ * normal_upper_quantile(log_s));
    case Family::Pareto:
      return c_ + a_ * std::expm1(-log_s / b_);
    case Family::Weibull:
      return b_ * std::pow(-log_s, 1.0 / a_);
    case Family::Exponential:
      return -log_s / a_;
  }
  return 0.0;
}

double Marginal::quantile_pair(double u, double u_bar) const {
  if (u > 0.0 && u < 0.5) return quantile(u);
  return quantile_from_log_survival(std::log(u_bar));
}

double Marginal::sample(Rng& rng) const {
  if (family_ == Family::Lognormal) return std::exp(a_ + b_ * standard_normal(rng));
  return quantile(uniform_open(rng));
}

double Marginal::sample_tail(double gamma, Rng& rng) const {
  const double ls = log_survival(gamma);
  if (ls == -kInf) throw std::domain_error("sample_tail: survival underflows at gamma");
  if (ls == 0.0 && gamma < support_min()) return sample(rng);
  const double x = quantile_from_log_survival(ls + std::log(uniform_open(rng)));
  return x > gamma ? x : std::nextafter(gamma, kInf);
}

double Marginal::support_min() const {
  return family_ == Family::Pareto ? c_ : 0.0;
}

double Marginal::mean() const {
  switch (family_) {
    case Family::Lognormal: return std::exp(a_ + 0.5 * b_ * b_);
    case Family::Pareto: return b_ > 1.0 ? c_ + a_ / (b_ - 1.0) : kInf;
    case Family::Weibull: return b_ * std::tgamma(1.0 + 1.0 / a_);
    case Family::Exponential: return 1.0 / a_;
  }
  return 0.0;
}

double eval(const Marginal& m, Quantity which, double x) {
  switch (which) {
    case Quantity::Pdf: return m.pdf(x);
    case Quantity::Cdf: return m.cdf(x);
    case Quantity::Survival: return m.survival(x);
    case Quantity::LogPdf: return m.log_pdf(x);
  }
  return 0.0;
}

}  // namespace polartail
