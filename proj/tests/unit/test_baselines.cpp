#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <vector>

#include "polartail/baselines.hpp"
#include "polartail/oracle.hpp"
#include "polartail/quadrature.hpp"
#include "test_support.hpp"

namespace polartail {
namespace {

using testing::rel_diff;

constexpr double kInf = std::numeric_limits<double>::infinity();

ProblemSpec exp2(const Copula& c) { return {{Marginal::exponential(1.0), Marginal::exponential(1.0)}, c}; }

ProblemSpec test1_spec() {
  std::vector<Marginal> ms;
  for (int i = 1; i <= 12; ++i) ms.push_back(Marginal::lognormal(-i / 12.0, std::sqrt(i / 12.0)));
  return ProblemSpec::independent(ms);
}

ProblemSpec weibull_iid(int d) { return ProblemSpec::independent(std::vector<Marginal>(d, Marginal::weibull(2.0, 1.0))); }

double se(const EstimatorResult& r) { return r.rel_err * r.estimate; }

TEST(Cmc, BelowSupportIsOne) {
  const EstimatorResult r = cmc_estimate(exp2(Copula::independent(2)), -kInf, 100, 1);
  EXPECT_EQ(r.estimate, 1.0);
  EXPECT_EQ(r.rel_err, 0.0);
}

TEST(Cmc, BinomialBehaviour) {
  const double p = 3.0 * std::exp(-2.0);
  const std::size_t R = 1000000;
  const EstimatorResult r = cmc_estimate(exp2(Copula::independent(2)), 2.0, R, 2);
  EXPECT_LT(std::abs(r.estimate - p), 4.0 * std::sqrt(p * (1 - p) / R));
  EXPECT_LT(rel_diff(r.rel_err, std::sqrt((1 - p) / (p * R))), 1e-2);
}

TEST(Ak, SingleSummandHasZeroVariance) {
  const ProblemSpec spec = ProblemSpec::independent({Marginal::lognormal(0.0, 1.0)});
  const EstimatorResult r = ak_estimate(spec, 30.0, 100, 3);
  EXPECT_EQ(r.estimate, spec.marginal(0).survival(30.0));
  EXPECT_EQ(r.rel_err, 0.0);
}

TEST(Ak, IidExponentials) {
  const double p = 6.0 * std::exp(-5.0);
  const EstimatorResult r = ak_estimate(exp2(Copula::independent(2)), 5.0, 200000, 4);
  EXPECT_LT(std::abs(r.estimate - p), 4.0 * se(r));
}

TEST(Ak, IidShortcutMatchesGeneralReplicate) {
  // d * survival(max(M, gamma - S)) over the first d - 1 draws has the law
  // of the symmetric sum; both are unbiased for the same tail.
  const ProblemSpec spec = ProblemSpec::independent(std::vector<Marginal>(5, Marginal::pareto(1.5, 1.0, 0.0)));
  const double gamma = 200.0;
  const EstimatorResult fast = ak_estimate(spec, gamma, 100000, 5);
  Rng rng(6);
  Moments m;
  for (int n = 0; n < 100000; ++n) m.add(ak_replicate(spec, gamma, sample_joint(spec, rng)));
  const EstimatorResult general = make_result(m, 1.0, 6);
  EXPECT_LT(std::abs(fast.estimate - general.estimate), 4.0 * std::hypot(se(fast), se(general)));
}

TEST(Ak, DependentMatchesBruteTruth) {
  for (const Copula& c : {Copula::clayton(1.0, 2), Copula::amh(-1.0, 2), Copula::gumbel_hougaard(1.25, 2)}) {
    const ProblemSpec spec({Marginal::lognormal(0.0, 1.0), Marginal::lognormal(0.0, 0.75)}, c);
    const double gamma = 25.0;
    const double truth = brute_truth_2d(spec, gamma);
    const EstimatorResult r = ak_estimate(spec, gamma, 20000, 7);
    EXPECT_LT(std::abs(r.estimate - truth), 4.0 * se(r)) << c.family_name();
  }
}

TEST(Ak, ReplicateIsPositiveAndBounded) {
  const ProblemSpec spec = test1_spec();
  Rng rng(8);
  for (int n = 0; n < 2000; ++n) {
    const auto x = sample_joint(spec, rng);
    const double v = ak_replicate(spec, 30.0, x);
    ASSERT_GE(v, 0.0);
    double bound = 0.0;
    for (int i = 0; i < 12; ++i) bound += spec.marginal(i).survival(0.0);
    ASSERT_LE(v, bound);
  }
}

TEST(Ak, BeatsCmcInTheTail) {
  const ProblemSpec spec = test1_spec();
  const EstimatorResult ak = ak_estimate(spec, 20.0, 20000, 9);
  const EstimatorResult cmc = cmc_estimate(spec, 20.0, 20000, 10);
  ASSERT_GT(cmc.estimate, 0.0);
  EXPECT_LT(ak.rel_err, cmc.rel_err);
}

// log E exp(theta X) for X ~ Weibull(beta, lambda) by direct quadrature in
// x, with the integrand scaled by its value at the mode of theta x + log f.
double log_mgf_by_quadrature(double beta, double lambda, double theta) {
  const Marginal w = Marginal::weibull(beta, lambda);
  auto h = [&](double x) { return theta * x + w.log_pdf(x); };
  double lo = 1e-9 * lambda;
  double hi = 1e3 * lambda * (1.0 + theta);
  for (int i = 0; i < 300; ++i) {
    const double m1 = lo + (hi - lo) / 3.0;
    const double m2 = hi - (hi - lo) / 3.0;
    (h(m1) < h(m2) ? lo : hi) = h(m1) < h(m2) ? m1 : m2;
  }
  const double mode = 0.5 * (lo + hi);
  const double peak = h(mode);
  auto f = [&](double x) { return std::exp(h(x) - peak); };
  const double scale = std::max(mode, lambda) * 0.05;
  const double tol = std::max(1e-13, 64.0 * std::numeric_limits<double>::epsilon() * theta * mode);
  const double right = quad::integrate_panels(f, mode, kInf, scale, tol);
  const double left = quad::integrate_singular(f, 0.0, mode, tol);
  return peak + std::log(left + right);
}

TEST(Tilting, MomentsMatchDirectQuadrature) {
  for (double beta : {1.5, 2.0, 3.0}) {
    for (double theta : {0.0, 0.5, 3.0, 20.0}) {
      const TiltedMoments m = tilted_moments(beta, 1.3, theta);
      EXPECT_LT(std::abs(m.kappa - log_mgf_by_quadrature(beta, 1.3, theta)), 1e-10 * std::max(1.0, m.kappa));
      // Mean and variance as derivatives of the log-MGF.
      const double h = 1e-3 * std::max(1.0, theta);
      const double kp = log_mgf_by_quadrature(beta, 1.3, theta + h);
      const double km = log_mgf_by_quadrature(beta, 1.3, theta - h);
      EXPECT_LT(rel_diff(m.mean, (kp - km) / (2 * h)), 1e-6) << beta << " " << theta;
      EXPECT_LT(rel_diff(m.var, (kp - 2 * m.kappa + km) / (h * h)), 1e-4) << beta << " " << theta;
    }
  }
}

TEST(Tilting, NoTiltAtTheMean) {
  const double mean = std::tgamma(1.5);
  EXPECT_EQ(tilt_solve(2.0, 1.0, 3, 3.0 * mean).theta_star, 0.0);
  EXPECT_THROW(tilt_solve(2.0, 1.0, 3, 2.0 * mean), std::invalid_argument);
  EXPECT_THROW(tilt_solve(1.0, 1.0, 3, 10.0), std::invalid_argument);
}

TEST(Tilting, RootCondition) {
  for (double gamma : {4.0, 10.0, 40.0}) {
    const TiltingParams p = tilt_solve(2.0, 1.0, 4, gamma);
    EXPECT_GT(p.theta_star, 0.0);
    EXPECT_LT(rel_diff(4.0 * p.tilted_mean, gamma), 1e-11);
    EXPECT_LT(rel_diff(tilted_moments(2.0, 1.0, p.theta_star).mean, p.tilted_mean), 1e-14);
  }
}

TEST(Tilting, TiltedSumIsCentredOnGamma) {
  const TiltingParams p = tilt_solve(2.5, 0.8, 3, 9.0);
  Rng rng(11);
  std::vector<double> sums(50000);
  for (double& s : sums) s = sample_tilted(p, rng) + sample_tilted(p, rng) + sample_tilted(p, rng);
  const auto st = testing::sample_stats(sums);
  EXPECT_NEAR(st.mean, 9.0, 4.0 * st.se);
  EXPECT_LT(rel_diff(st.var, 3.0 * p.tilted_var), 0.03);
}

TEST(Tilting, EnvelopeBoundsTheRatio) {
  const TiltingParams p = tilt_solve(3.0, 1.0, 5, 20.0);
  std::gamma_distribution<double> proposal(p.proposal_shape, 1.0 / p.proposal_rate);
  Rng rng(12);
  for (int n = 0; n < 1000000; ++n) {
    const double x = proposal(rng);
    ASSERT_LE(tilted_log_density(p, x) - proposal_log_density(p, x), p.envelope_log);
  }
}

TEST(Tilting, AcceptanceRateMatchesEnvelope) {
  const TiltingParams p = tilt_solve(2.0, 1.0, 3, 8.0);
  Rng rng(13);
  std::size_t proposals = 0;
  const int n = 100000;
  for (int k = 0; k < n; ++k) sample_tilted(p, rng, &proposals);
  // Proposals per acceptance are geometric with mean exp(envelope_log).
  const double mean = std::exp(p.envelope_log);
  const double sd = std::sqrt(mean * (mean - 1.0) / n);
  EXPECT_NEAR(static_cast<double>(proposals) / n, mean, 4.0 * sd + 1e-12);
}

TEST(Tilting, WeightsAreBounded) {
  const TiltingParams p = tilt_solve(2.0, 1.0, 4, 10.0);
  const double bound = std::exp(-p.theta_star * p.gamma + p.d * p.kappa);
  const EstimatorResult r = tilt_estimate(p, 10000, 14);
  EXPECT_LE(r.estimate, bound);
  EXPECT_GT(r.estimate, 0.0);
}

TEST(Tilting, MatchesBruteTruthInTwoDimensions) {
  const double gamma = 5.0;
  const double truth = brute_truth_2d(weibull_iid(2), gamma);
  const EstimatorResult r = tilt_estimate(2.0, 1.0, 2, gamma, 200000, 15);
  EXPECT_LT(std::abs(r.estimate - truth), 4.0 * se(r));
  EXPECT_LT(r.rel_err, 0.01);
}

TEST(Baselines, AgreeWithEachOther) {
  const ProblemSpec spec = weibull_iid(3);
  const double gamma = 4.5;
  const EstimatorResult cmc = cmc_estimate(spec, gamma, 400000, 16);
  const EstimatorResult ak = ak_estimate(spec, gamma, 400000, 17);
  const EstimatorResult tilt = tilt_estimate(2.0, 1.0, 3, gamma, 100000, 18);
  EXPECT_LT(std::abs(cmc.estimate - ak.estimate), 4.0 * std::hypot(se(cmc), se(ak)));
  EXPECT_LT(std::abs(cmc.estimate - tilt.estimate), 4.0 * std::hypot(se(cmc), se(tilt)));
  EXPECT_LT(std::abs(ak.estimate - tilt.estimate), 4.0 * std::hypot(se(ak), se(tilt)));
}

TEST(Baselines, SerialAndParallelAgree) {
  const ProblemSpec spec = exp2(Copula::clayton(1.0, 2));
  for (bool parallel : {false, true}) {
    const Execution exec{16, parallel};
    EXPECT_EQ(cmc_estimate(spec, 3.0, 5000, 19, exec).estimate, cmc_estimate(spec, 3.0, 5000, 19, Execution{16, !parallel}).estimate);
    EXPECT_EQ(ak_estimate(spec, 3.0, 5000, 19, exec).estimate, ak_estimate(spec, 3.0, 5000, 19, Execution{16, true}).estimate);
    EXPECT_EQ(tilt_estimate(2.0, 1.0, 2, 4.0, 5000, 19, exec).estimate,
              tilt_estimate(2.0, 1.0, 2, 4.0, 5000, 19, Execution{16, !parallel}).estimate);
  }
}

}  // namespace
}  // namespace polartail
