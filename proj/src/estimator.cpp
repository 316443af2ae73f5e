#include "polartail/estimator.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

#include "polartail/polar.hpp"

namespace polartail {

EstimatorResult make_result(const Moments& m, double asym_prefactor, std::uint64_t seed) {
  EstimatorResult r;
  r.R = m.count;
  r.seed = seed;
  r.asym_prefactor = asym_prefactor;
  r.correction = m.sample_mean();
  r.estimate = asym_prefactor * r.correction;
  const double sd = std::sqrt(m.sample_variance());
  r.rel_err = r.correction > 0.0 ? sd / (std::sqrt(static_cast<double>(m.count)) * r.correction) : 0.0;
  return r;
}

double polar_log_ratio(const ProblemSpec& spec, const RadialModel& rm, const AngularModel& am,
                       double s, std::span<const double> theta) {
  const double num = polar_joint_log_pdf(spec, s, theta);
  if (num == -std::numeric_limits<double>::infinity()) return num;
  return num - std::log(rm.c_s()) - rm.log_pdf(s) - am.log_pdf(spec, s, theta);
}

EstimatorResult polar_is_estimate(const ProblemSpec& spec, const RadialModel& rm,
                                  const AngularModel& am, double gamma, std::size_t R,
                                  std::uint64_t seed, const Execution& exec) {
  if (R < 2) throw std::invalid_argument("polar_is_estimate needs R >= 2");
  am.check(spec);
  const double log_tail = rm.log_tail(gamma);
  const double asym = rm.c_s() * std::exp(log_tail);
  if (!(asym > 0.0)) throw std::domain_error("radial tail underflows at gamma");
  const int d = spec.dim();

  const Moments m = run_replicates(R, seed, exec, [&]() -> ReplicateFn {
    return [&, theta = std::vector<double>(d)](Rng& rng) mutable {
      const double s = rm.sample(gamma, rng);
      am.sample(spec, s, rng, theta);
      const double lr = polar_log_ratio(spec, rm, am, s, theta);
      if (std::isnan(lr) || lr == std::numeric_limits<double>::infinity())
        throw std::runtime_error("non-finite likelihood ratio at s = " + std::to_string(s));
      return std::exp(lr);
    };
  });
  return make_result(m, asym, seed);
}

}  // namespace polartail
