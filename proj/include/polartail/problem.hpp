#pragma once

#include <span>
#include <vector>

#include "polartail/copula.hpp"
#include "polartail/marginal.hpp"
#include "polartail/rng.hpp"

namespace polartail {

// Joint law of X = (X_1, ..., X_d): marginals glued by an Archimedean copula.
class ProblemSpec {
 public:
  ProblemSpec(std::vector<Marginal> marginals, Copula copula);
  static ProblemSpec independent(std::vector<Marginal> marginals);

  int dim() const { return static_cast<int>(marginals_.size()); }
  const std::vector<Marginal>& marginals() const { return marginals_; }
  const Marginal& marginal(int i) const { return marginals_[i]; }
  const Copula& copula() const { return copula_; }

  bool independent() const { return copula_.is_independent(); }
  bool iid() const;

 private:
  std::vector<Marginal> marginals_;
  Copula copula_;
};

// log f_X(x); -inf outside the product of supports.
double joint_log_pdf(const ProblemSpec& spec, std::span<const double> x);

// Draw X ~ f_X into x (size d).
void sample_joint(const ProblemSpec& spec, Rng& rng, std::span<double> x);
std::vector<double> sample_joint(const ProblemSpec& spec, Rng& rng);

// P(X_i > x | X_{-i} = x_rest), x_rest listing the other d-1 coordinates in
// index order. Throws std::domain_error when the conditioning density
// underflows.
double conditional_survival(const ProblemSpec& spec, int i, double x,
                            std::span<const double> x_rest);

}  // namespace polartail
