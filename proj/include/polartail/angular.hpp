#pragma once

#include <functional>
#include <span>
#include <string>
#include <vector>

#include "polartail/problem.hpp"
#include "polartail/rng.hpp"

namespace polartail {

// p_i(s) proportional to the marginal survivals at s, via log-sum-exp.
// Throws std::domain_error when every survival underflows.
std::vector<double> optimistic_weights(const ProblemSpec& spec, double s);

// One draw of theta given S = s: pick I with probability p_I(s),
// draw the other coordinates (jointly from f_X when the copula is not the
// independence copula), and close the sum with coordinate I.
void sample_optimistic(const ProblemSpec& spec, double s, Rng& rng, std::span<double> theta);
std::vector<double> sample_optimistic(const ProblemSpec& spec, double s, Rng& rng);

// log g(theta | s) = log |s|^{d-1} sum_i p_i(s) f_{X_-i}(s theta_-i), as a
// density in the first d-1 coordinates. Requires sum(theta) = 1 within 1e-9.
double optimistic_log_pdf(const ProblemSpec& spec, double s, std::span<const double> theta);

// Gaussian angular law for iid Weibull(beta, lambda), beta > 1:
// theta_i = 1/d + W_i / (omega(s) s) with W ~ N(0, (1-rho) I + rho 11^T),
// rho = -1/(d-1).
double weibull_omega(double s, double beta, double lambda, int d);
void sample_weibull_angular(double s, double beta, double lambda, int d, Rng& rng,
                            std::span<double> theta);
std::vector<double> sample_weibull_angular(double s, double beta, double lambda, int d, Rng& rng);
double weibull_angular_log_pdf(double s, double beta, double lambda, int d,
                               std::span<const double> theta);

// Conditional law of Theta given S used as the angular proposal.
class AngularModel {
 public:
  enum class Kind { OptimisticInd, OptimisticDep, LightWeibullGaussian, ExactConditional };
  // theta_1 density given s, and a sampler for it (d = 2).
  using ConditionalLogPdf = std::function<double(double s, double theta1)>;
  using ConditionalSampler = std::function<double(double s, Rng& rng)>;

  static AngularModel optimistic_independent();
  static AngularModel optimistic_dependent();
  // Independent or dependent variant according to spec's copula.
  static AngularModel optimistic_for(const ProblemSpec& spec);
  static AngularModel light_weibull_gaussian(double beta, double lambda, int d);
  static AngularModel exact_conditional(std::string name, ConditionalLogPdf log_pdf,
                                        ConditionalSampler sampler);
  // theta_1 | s uniform on (0,1): exact for two iid exponentials.
  static AngularModel exact_uniform();

  Kind kind() const { return kind_; }
  std::string name() const;

  // Checks that the model applies to spec (dimension, copula).
  void check(const ProblemSpec& spec) const;

  void sample(const ProblemSpec& spec, double s, Rng& rng, std::span<double> theta) const;
  double log_pdf(const ProblemSpec& spec, double s, std::span<const double> theta) const;

 private:
  AngularModel() = default;

  Kind kind_ = Kind::OptimisticInd;
  std::string label_;
  double beta_ = 0.0;
  double lambda_ = 0.0;
  int d_ = 0;
  ConditionalLogPdf cond_log_pdf_;
  ConditionalSampler cond_sampler_;
};

}  // namespace polartail
