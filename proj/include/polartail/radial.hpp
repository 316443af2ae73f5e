#pragma once

#include <functional>
#include <limits>
#include <string>
#include <vector>

#include "polartail/problem.hpp"
#include "polartail/rng.hpp"

namespace polartail {

// Asymptotic form c_S * f_S of the density of S = sum(X), used as the radial
// proposal. Tail and density are returned in log space.
//
//   SubexpDominant     sum over a dominant index set I of the marginal
//                      densities and tails; c_S = 1.
//   LightWeibullProp1  A s^p exp(-b s^beta) with p = beta (d-1)/2,
//                      b = d^(1-beta) lambda^-beta; valid only for s > s*.
//   ExactSum           caller-supplied exact log density and log tail.
class RadialModel {
 public:
  enum class Kind { SubexpDominant, LightWeibullProp1, ExactSum };
  using LogFn = std::function<double(double)>;

  // `dominant` holds 0-based indices into spec's marginals.
  static RadialModel subexp_dominant(const ProblemSpec& spec, std::vector<int> dominant);
  static RadialModel light_weibull(double beta, double lambda, int d);
  // support_min: log_tail is 0 at and below it.
  static RadialModel exact_sum(std::string name, LogFn log_pdf, LogFn log_tail,
                               double support_min = -std::numeric_limits<double>::infinity());
  // Erlang(d, rate): the law of a sum of d iid Exponential(rate).
  static RadialModel exact_exponential_sum(int d, double rate = 1.0);

  Kind kind() const { return kind_; }
  std::string name() const;
  double c_s() const { return 1.0; }
  const std::vector<int>& dominant() const { return dominant_; }

  // Infimum of the validity domain (s*, or -inf).
  double validity_min() const { return s_star_; }

  double log_tail(double gamma) const;
  double log_pdf(double s) const;
  // Draw from f_S conditioned on S > gamma; every draw exceeds gamma.
  double sample(double gamma, Rng& rng) const;

 private:
  RadialModel() = default;
  void require_valid(double s) const;

  Kind kind_ = Kind::ExactSum;
  std::string label_;
  // SubexpDominant
  std::vector<Marginal> terms_;
  std::vector<int> dominant_;
  // LightWeibullProp1
  double beta_ = 0.0;
  double lambda_ = 0.0;
  int d_ = 0;
  double log_a_ = 0.0;
  double p_ = 0.0;
  double b_ = 0.0;
  double s_star_ = -std::numeric_limits<double>::infinity();
  // ExactSum
  LogFn exact_log_pdf_;
  LogFn exact_log_tail_;
  double support_min_ = -std::numeric_limits<double>::infinity();
};

double radial_tail(const RadialModel& rm, double gamma);
double radial_pdf(const RadialModel& rm, double s);
double sample_radial(const RadialModel& rm, double gamma, Rng& rng);

// Solves log_tail(s) = target for s > lo, given target < log_tail(lo), by
// bracketing and safeguarded Newton with slope -exp(log_pdf - log_tail).
// Relative tolerance 1e-12; throws std::runtime_error after 200 iterations.
double invert_log_tail(const std::function<double(double)>& log_tail,
                       const std::function<double(double)>& log_pdf, double lo, double target);

}  // namespace polartail
