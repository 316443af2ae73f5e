#pragma once

#include <string>
#include <string_view>
#include <vector>

#include "polartail/rng.hpp"

namespace polartail {

// Standard normal tail helpers, exposed for reuse by tests and the oracle.
double normal_log_survival(double z);
double normal_log_pdf(double z);
// z such that P(Z > z) = exp(log_p).
double normal_upper_quantile(double log_p);

// Univariate continuous law. Parameterisations:
//   Lognormal(mu, sigma)     exp(Normal(mu, sigma))
//   Pareto(k, alpha, mu)     survival (1 + (x - mu)/k)^-alpha for x >= mu
//   Weibull(beta, lambda)    survival exp(-(x/lambda)^beta) for x >= 0
//   Exponential(rate)
// Tail quantities are computed in log space; survival() and cdf() are the
// linear-scale edges. Immutable, so safe to share across threads.
class Marginal {
 public:
  enum class Family { Lognormal, Pareto, Weibull, Exponential };

  static Marginal lognormal(double mu, double sigma);
  static Marginal pareto(double k, double alpha, double mu = 0.0);
  static Marginal weibull(double beta, double lambda);
  static Marginal exponential(double rate);
  // Builds from a family name ("lognormal", "pareto", "weibull",
  // "exponential") and its parameter list, validating both.
  static Marginal from_params(std::string_view family, const std::vector<double>& params);

  Family family() const { return family_; }
  std::string family_name() const;
  std::vector<double> params() const;

  double log_pdf(double x) const;
  double pdf(double x) const;
  double cdf(double x) const;
  double survival(double x) const;
  double log_survival(double x) const;

  double quantile(double u) const;
  // x with log survival(x) == log_s; log_s <= 0.
  double quantile_from_log_survival(double log_s) const;
  // Quantile given both u and 1 - u, using whichever is better conditioned.
  double quantile_pair(double u, double u_bar) const;

  double sample(Rng& rng) const;
  // Draw from the law conditioned on X > gamma by log-space inversion.
  // Throws std::domain_error when log survival(gamma) is -inf.
  double sample_tail(double gamma, Rng& rng) const;

  double support_min() const;
  double mean() const;

  bool operator==(const Marginal& other) const = default;

 private:
  Marginal(Family f, double a, double b, double c) : family_(f), a_(a), b_(b), c_(c) {}

  Family family_;
  // Lognormal: mu, sigma; Pareto: k, alpha, mu; Weibull: beta, lambda;
  // Exponential: rate.
  double a_;
  double b_;
  double c_;
};

enum class Quantity { Pdf, Cdf, Survival, LogPdf };

double eval(const Marginal& m, Quantity which, double x);

}  // namespace polartail
