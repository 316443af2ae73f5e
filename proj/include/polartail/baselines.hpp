#pragma once

#include <cstddef>
#include <cstdint>

#include "polartail/estimator.hpp"
#include "polartail/problem.hpp"
#include "polartail/replicate.hpp"

namespace polartail {

// Crude Monte Carlo: mean of 1{sum X > gamma}.
EstimatorResult cmc_estimate(const ProblemSpec& spec, double gamma, std::size_t R,
                             std::uint64_t seed, const Execution& exec = {});

// Asmussen-Kroese: replicate sum_i P(X_i > max(M_-i, gamma - S_-i) | X_-i),
// which is the marginal survival for independent summands and the copula
// conditional survival otherwise. iid summands use the d * survival shortcut.
EstimatorResult ak_estimate(const ProblemSpec& spec, double gamma, std::size_t R,
                            std::uint64_t seed, const Execution& exec = {});

// One AK replicate value for a given draw x.
double ak_replicate(const ProblemSpec& spec, double gamma, std::span<const double> x);

// Exponential tilting for a sum of d iid Weibull(beta, lambda), beta > 1.
struct TiltingParams {
  double beta = 0.0;
  double lambda = 0.0;
  int d = 0;
  double gamma = 0.0;
  double theta_star = 0.0;
  // Per-summand log-MGF at theta_star.
  double kappa = 0.0;
  double tilted_mean = 0.0;
  double tilted_var = 0.0;
  double proposal_shape = 0.0;
  double proposal_rate = 0.0;
  // Upper bound on log(tilted density / proposal density).
  double envelope_log = 0.0;
};

// Per-summand tilted moments at theta by quadrature.
struct TiltedMoments {
  double kappa;
  double mean;
  double var;
};
TiltedMoments tilted_moments(double beta, double lambda, double theta);

TiltingParams tilt_solve(double beta, double lambda, int d, double gamma);

double tilted_log_density(const TiltingParams& p, double x);
double proposal_log_density(const TiltingParams& p, double x);

// Acceptance-rejection draw from the tilted Weibull; adds the number of
// proposals used to *proposals when given.
double sample_tilted(const TiltingParams& p, Rng& rng, std::size_t* proposals = nullptr);

EstimatorResult tilt_estimate(const TiltingParams& p, std::size_t R, std::uint64_t seed,
                              const Execution& exec = {});
EstimatorResult tilt_estimate(double beta, double lambda, int d, double gamma, std::size_t R,
                              std::uint64_t seed, const Execution& exec = {});

}  // namespace polartail
