#include <gtest/gtest.h>

#include <cmath>
#include <cstring>
#include <limits>
#include <vector>

#include "polartail/baselines.hpp"
#include "polartail/estimator.hpp"
#include "polartail/oracle.hpp"
#include "test_support.hpp"

namespace polartail {
namespace {

using testing::rel_diff;

ProblemSpec exp2() { return ProblemSpec::independent({Marginal::exponential(1.0), Marginal::exponential(1.0)}); }

ProblemSpec test1_spec() {
  std::vector<Marginal> ms;
  for (int i = 1; i <= 12; ++i) ms.push_back(Marginal::lognormal(-i / 12.0, std::sqrt(i / 12.0)));
  return ProblemSpec::independent(ms);
}

bool same_bits(double a, double b) { return std::memcmp(&a, &b, sizeof a) == 0; }

void expect_same(const EstimatorResult& a, const EstimatorResult& b) {
  EXPECT_TRUE(same_bits(a.estimate, b.estimate));
  EXPECT_TRUE(same_bits(a.rel_err, b.rel_err));
  EXPECT_TRUE(same_bits(a.correction, b.correction));
  EXPECT_TRUE(same_bits(a.asym_prefactor, b.asym_prefactor));
  EXPECT_EQ(a.R, b.R);
  EXPECT_EQ(a.seed, b.seed);
}

TEST(PolarEstimator, ExactModelsGiveZeroVariance) {
  // S = X_1 + X_2 is Erlang(2) and Theta_1 | S is uniform: every weight is 1.
  const EstimatorResult r =
      polar_is_estimate(exp2(), RadialModel::exact_exponential_sum(2), AngularModel::exact_uniform(), 7.0, 1000, 3);
  EXPECT_LT(rel_diff(r.estimate, 8.0 * std::exp(-7.0)), 1e-13);
  EXPECT_LT(r.rel_err, 1e-13);
  EXPECT_LT(std::abs(r.correction - 1.0), 1e-13);
}

TEST(PolarEstimator, EstimateIsPrefactorTimesCorrection) {
  const ProblemSpec spec = test1_spec();
  const EstimatorResult r = polar_is_estimate(spec, RadialModel::subexp_dominant(spec, {11}),
                                              AngularModel::optimistic_for(spec), 40.0, 2000, 5);
  EXPECT_TRUE(same_bits(r.estimate, r.asym_prefactor * r.correction));
  EXPECT_TRUE(same_bits(r.asym_prefactor, spec.marginal(11).survival(40.0)));
  EXPECT_EQ(r.R, 2000u);
  EXPECT_EQ(r.seed, 5u);
}

TEST(PolarEstimator, DeterministicAndIndependentOfExecution) {
  const ProblemSpec spec({Marginal::lognormal(0.0, 1.0), Marginal::lognormal(0.0, 0.75), Marginal::lognormal(0.0, 0.5)},
                         Copula::clayton(0.9, 3));
  const RadialModel rm = RadialModel::subexp_dominant(spec, {0});
  const AngularModel am = AngularModel::optimistic_for(spec);
  const EstimatorResult a = polar_is_estimate(spec, rm, am, 30.0, 3000, 9, Execution{64, true});
  expect_same(a, polar_is_estimate(spec, rm, am, 30.0, 3000, 9, Execution{64, true}));
  expect_same(a, polar_is_estimate(spec, rm, am, 30.0, 3000, 9, Execution{64, false}));
  EXPECT_NE(a.estimate, polar_is_estimate(spec, rm, am, 30.0, 3000, 10).estimate);
}

TEST(PolarEstimator, ConfidenceIntervalsCoverTheTruth) {
  const ProblemSpec spec = fig1_spec();
  const double gamma = gamma_for_target_2d(spec, 1e-2);
  const double truth = brute_truth_2d(spec, gamma);
  const RadialModel rm = RadialModel::subexp_dominant(spec, {0});
  const AngularModel am = AngularModel::optimistic_independent();
  int covered = 0;
  for (std::uint64_t seed = 1; seed <= 30; ++seed) {
    const EstimatorResult r = polar_is_estimate(spec, rm, am, gamma, 5000, seed);
    covered += std::abs(r.estimate - truth) <= 1.96 * r.rel_err * r.estimate;
  }
  EXPECT_GE(covered, 25);
}

TEST(PolarEstimator, AgreesWithAsmussenKroese) {
  const ProblemSpec spec = test1_spec();
  const double gamma = 60.0;
  const EstimatorResult polar = polar_is_estimate(spec, RadialModel::subexp_dominant(spec, {11}),
                                                  AngularModel::optimistic_for(spec), gamma, 100000, 21);
  const EstimatorResult ak = ak_estimate(spec, gamma, 100000, 22);
  const double se = std::hypot(polar.rel_err * polar.estimate, ak.rel_err * ak.estimate);
  EXPECT_LT(std::abs(polar.estimate - ak.estimate), 4.0 * se);
}

TEST(PolarEstimator, LightWeibullAgreesWithTilting) {
  const ProblemSpec spec = ProblemSpec::independent(std::vector<Marginal>(4, Marginal::weibull(2.0, 1.0)));
  const RadialModel rm = RadialModel::light_weibull(2.0, 1.0, 4);
  const double gamma = 8.0;
  const EstimatorResult polar =
      polar_is_estimate(spec, rm, AngularModel::light_weibull_gaussian(2.0, 1.0, 4), gamma, 100000, 23);
  const EstimatorResult tilt = tilt_estimate(2.0, 1.0, 4, gamma, 100000, 24);
  const double se = std::hypot(polar.rel_err * polar.estimate, tilt.rel_err * tilt.estimate);
  EXPECT_LT(std::abs(polar.estimate - tilt.estimate), 4.0 * se);
}

TEST(PolarEstimator, NonFiniteRatioIsAnError) {
  const AngularModel bad = AngularModel::exact_conditional(
      "nan", [](double, double) { return std::numeric_limits<double>::quiet_NaN(); },
      [](double, Rng& rng) { return uniform_open(rng); });
  EXPECT_THROW(polar_is_estimate(exp2(), RadialModel::exact_exponential_sum(2), bad, 3.0, 100, 1), ReplicateError);
}

TEST(PolarEstimator, RejectsBadArguments) {
  EXPECT_THROW(
      polar_is_estimate(exp2(), RadialModel::exact_exponential_sum(2), AngularModel::exact_uniform(), 3.0, 1, 1),
      std::invalid_argument);
  EXPECT_THROW(polar_is_estimate(test1_spec(), RadialModel::subexp_dominant(test1_spec(), {0}),
                                 AngularModel::exact_uniform(), 3.0, 100, 1),
               std::invalid_argument);
  EXPECT_THROW(polar_is_estimate(exp2(), RadialModel::exact_exponential_sum(2), AngularModel::exact_uniform(), 1e308,
                                 100, 1),
               std::domain_error);
}

TEST(MakeResult, RelativeErrorDefinition) {
  Moments m;
  for (double v : {1.0, 2.0, 3.0, 4.0}) m.add(v);
  const EstimatorResult r = make_result(m, 0.5, 8);
  EXPECT_EQ(r.correction, 2.5);
  EXPECT_EQ(r.estimate, 1.25);
  EXPECT_NEAR(r.rel_err, std::sqrt(5.0 / 3.0) / (2.0 * 2.5), 1e-15);
  Moments zeros;
  zeros.add(0.0);
  zeros.add(0.0);
  EXPECT_EQ(make_result(zeros, 1.0, 1).rel_err, 0.0);
}

}  // namespace
}  // namespace polartail
