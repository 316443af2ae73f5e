#pragma once

#include <cstddef>
#include <cstdint>

#include "polartail/angular.hpp"
#include "polartail/problem.hpp"
#include "polartail/radial.hpp"
#include "polartail/replicate.hpp"

namespace polartail {

// estimate = asym_prefactor * correction. Baselines report
// asym_prefactor = 1 and correction = estimate.
struct EstimatorResult {
  double estimate = 0.0;
  double rel_err = 0.0;
  std::size_t R = 0;
  double asym_prefactor = 1.0;
  double correction = 0.0;
  std::uint64_t seed = 0;
};

// Packs replicate moments into a result; rel_err = sd / (sqrt(R) mean).
EstimatorResult make_result(const Moments& m, double asym_prefactor, std::uint64_t seed);

// Log likelihood ratio f_(S,Theta) / (c_S f_S g) of one polar draw.
double polar_log_ratio(const ProblemSpec& spec, const RadialModel& rm, const AngularModel& am,
                       double s, std::span<const double> theta);

// Importance-sampling estimate of P(sum X > gamma) with S drawn from the
// radial model's tail law and Theta from the angular model.
EstimatorResult polar_is_estimate(const ProblemSpec& spec, const RadialModel& rm,
                                  const AngularModel& am, double gamma, std::size_t R,
                                  std::uint64_t seed, const Execution& exec = {});

}  // namespace polartail
