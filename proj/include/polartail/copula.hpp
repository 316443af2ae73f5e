#pragma once

#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "polartail/rng.hpp"

namespace polartail {

// A real number carried as (log|value|, sign).
struct SignedLog {
  double log_abs;
  int sign;
};

// Archimedean copula C(u) = psi(sum_i phi(u_i)) in dimension d.
//
// Generator inverses (psi):
//   Independent         exp(-t)
//   Clayton(theta>0)    (1 + t)^(-1/theta)
//   Frank(theta!=0)     -log(1 - (1 - e^-theta) e^-t) / theta
//   GumbelHougaard      exp(-t^(1/theta)),  theta >= 1
//   AMH(-1<=theta<1)    (1 - theta) / (e^t - theta)
// Negative theta (Frank, AMH) is only a valid d-copula for d = 2.
//
// Generator evaluations take u together with u_bar = 1 - u so that points
// deep in the upper tail (u rounding to 1) keep their precision.
class Copula {
 public:
  enum class Family { Independent, Clayton, Frank, GumbelHougaard, AMH };

  static Copula independent(int d);
  static Copula clayton(double theta, int d);
  static Copula frank(double theta, int d);
  static Copula gumbel_hougaard(double theta, int d);
  static Copula amh(double theta, int d);
  static Copula from_params(std::string_view family, double theta, int d);

  Family family() const { return family_; }
  std::string family_name() const;
  double theta() const { return theta_; }
  int dim() const { return d_; }
  bool is_independent() const { return family_ == Family::Independent; }

  // Same family and parameter in dimension k (Archimedean margins).
  Copula margin(int k) const;

  double generator(double u, double u_bar) const;
  double log_abs_generator_deriv(double u, double u_bar) const;
  double inverse_generator(double t) const;
  // 1 - psi(t), accurate for small t.
  double inverse_generator_complement(double t) const;
  // k-th derivative of psi at t >= 0. Sign is (-1)^k wherever psi is
  // completely monotone.
  SignedLog inverse_generator_deriv(int k, double t) const;

  // log c(u); every u_i must lie strictly inside (0,1).
  double log_density(std::span<const double> u) const;
  // Same with explicit complements; returns -inf on the boundary.
  double log_density(std::span<const double> u, std::span<const double> u_bar) const;
  double cdf(std::span<const double> u) const;

  // Marshall-Olkin frailty sampling; d = 2 with negative theta falls back to
  // conditional inversion.
  void sample(Rng& rng, std::span<double> u, std::span<double> u_bar) const;
  std::vector<double> sample(Rng& rng) const;

 private:
  Copula(Family f, double theta, int d);

  SignedLog polylog_deriv(int n, double w, double log_abs_w) const;
  double sample_frailty(Rng& rng) const;
  double conditional_inverse(double u, double u_bar, double w) const;

  Family family_;
  double theta_;
  int d_;
  // Eulerian numbers A(n, m), n = 0..d (Frank, AMH).
  std::vector<std::vector<double>> eulerian_;
  // log a_{k,j} for psi^{(k)} of Gumbel-Hougaard, k = 0..d.
  std::vector<std::vector<double>> gumbel_log_coef_;
};

SignedLog generator_inverse_deriv(const Copula& c, int k, double t);
double copula_density(const Copula& c, std::span<const double> u);
std::vector<double> sample_copula(const Copula& c, Rng& rng);

}  // namespace polartail
