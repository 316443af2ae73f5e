#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <numbers>
#include <vector>

#include "polartail/marginal.hpp"
#include "polartail/quadrature.hpp"
#include "test_support.hpp"

namespace polartail {
namespace {

using testing::Gen;
using testing::ks_pvalue;
using testing::rel_diff;
using testing::sample_stats;

constexpr double kInf = std::numeric_limits<double>::infinity();

// Every marginal family and parameter set used by the ten builtin tests and
// the exponential examples.
std::vector<Marginal> benchmark_marginals() {
  std::vector<Marginal> out;
  for (int i = 1; i <= 12; ++i) out.push_back(Marginal::lognormal(-i / 12.0, std::sqrt(i / 12.0)));
  for (int i = 1; i <= 4; ++i) out.push_back(Marginal::lognormal(-i / 4.0, std::sqrt(i / 4.0)));
  for (int i = 1; i <= 16; ++i) out.push_back(Marginal::pareto(1.0, i, 0.0));
  for (int i = 1; i <= 8; ++i) out.push_back(Marginal::weibull(0.25, i / 8.0));
  out.push_back(Marginal::weibull(0.25, 0.5));
  out.push_back(Marginal::weibull(0.25, 1.0));
  out.push_back(Marginal::weibull(2.0, 1.0));
  out.push_back(Marginal::exponential(1.0));
  out.push_back(Marginal::lognormal(0.0, 1.0));
  out.push_back(Marginal::lognormal(0.0, 0.75));
  return out;
}

TEST(Marginal, RejectsInvalidParameters) {
  EXPECT_THROW(Marginal::lognormal(0.0, 0.0), std::invalid_argument);
  EXPECT_THROW(Marginal::lognormal(0.0, -1.0), std::invalid_argument);
  EXPECT_THROW(Marginal::pareto(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(Marginal::pareto(1.0, -2.0), std::invalid_argument);
  EXPECT_THROW(Marginal::weibull(0.0, 1.0), std::invalid_argument);
  EXPECT_THROW(Marginal::weibull(1.0, 0.0), std::invalid_argument);
  EXPECT_THROW(Marginal::exponential(0.0), std::invalid_argument);
  EXPECT_THROW(Marginal::from_params("cauchy", {1.0}), std::invalid_argument);
  EXPECT_THROW(Marginal::from_params("pareto", {1.0}), std::invalid_argument);
}

TEST(Marginal, ParetoSurvivalAtOne) {
  EXPECT_DOUBLE_EQ(Marginal::pareto(1.0, 1.0, 0.0).survival(1.0), 0.5);
}

TEST(Marginal, WeibullUnitScaleSurvival) {
  for (double beta : {0.25, 0.5, 2.0, 3.5}) {
    const Marginal m = Marginal::weibull(beta, 1.0);
    for (double x : {0.1, 1.0, 2.5, 7.0}) EXPECT_NEAR(m.survival(x), std::exp(-std::pow(x, beta)), 1e-15);
  }
}

TEST(Marginal, ExponentialPdfAtZero) { EXPECT_DOUBLE_EQ(Marginal::exponential(1.0).pdf(0.0), 1.0); }

TEST(Marginal, EvalDispatchAndOutOfSupport) {
  const Marginal m = Marginal::pareto(1.0, 2.0, 3.0);
  EXPECT_EQ(eval(m, Quantity::Pdf, 2.0), 0.0);
  EXPECT_EQ(eval(m, Quantity::Survival, 2.0), 1.0);
  EXPECT_EQ(eval(m, Quantity::Cdf, 2.0), 0.0);
  EXPECT_EQ(eval(m, Quantity::LogPdf, 2.0), -kInf);
  EXPECT_DOUBLE_EQ(eval(m, Quantity::Survival, 4.0), 0.25);
  EXPECT_THROW(eval(m, Quantity::Pdf, std::nan("")), std::invalid_argument);
}

TEST(Marginal, SurvivalPlusCdfIsOne) {
  Gen gen(11);
  for (const Marginal& m : benchmark_marginals()) {
    for (int k = 0; k < 200; ++k) {
      const double x = gen.log_uniform(1e-4, 1e4);
      EXPECT_NEAR(m.survival(x) + m.cdf(x), 1.0, 1e-12) << m.family_name() << " x=" << x;
    }
  }
}

TEST(Marginal, LogPdfMatchesPdf) {
  Gen gen(12);
  for (const Marginal& m : benchmark_marginals()) {
    for (int k = 0; k < 100; ++k) {
      const double x = gen.log_uniform(1e-2, 1e2);
      const double p = m.pdf(x);
      if (p > 1e-300) EXPECT_LT(rel_diff(std::exp(m.log_pdf(x)), p), 1e-13);
    }
  }
}

TEST(Marginal, CdfNondecreasing) {
  Gen gen(13);
  for (const Marginal& m : benchmark_marginals()) {
    double prev = 0.0;
    for (double x = 1e-3; x < 1e4; x *= 1.1) {
      const double c = m.cdf(x);
      EXPECT_GE(c, prev);
      prev = c;
    }
  }
}

TEST(Marginal, QuantileExamples) {
  EXPECT_NEAR(Marginal::exponential(1.0).quantile(1.0 - std::exp(-1.0)), 1.0, 1e-12);
  EXPECT_NEAR(Marginal::pareto(1.0, 2.0, 0.0).quantile(0.75), 1.0, 1e-12);
  EXPECT_NEAR(Marginal::lognormal(0.0, 1.0).quantile(0.5), 1.0, 1e-12);
  EXPECT_THROW(Marginal::exponential(1.0).quantile(0.0), std::invalid_argument);
  EXPECT_THROW(Marginal::exponential(1.0).quantile(1.0), std::invalid_argument);
}

TEST(Marginal, CdfOfQuantileIsIdentity) {
  Gen gen(14);
  for (const Marginal& m : benchmark_marginals()) {
    for (int k = 0; k < 200; ++k) {
      const double u = gen.uniform(1e-6, 1.0 - 1e-6);
      EXPECT_NEAR(m.cdf(m.quantile(u)), u, 1e-10) << m.family_name();
    }
  }
}

TEST(Marginal, QuantileOfCdfOnGrid) {
  for (const Marginal& m : benchmark_marginals()) {
    const double lo = m.quantile(1e-6);
    const double hi = m.quantile(1.0 - 1e-6);
    for (int k = 0; k < 1000; ++k) {
      const double x = lo + (hi - lo) * (k + 0.5) / 1000.0;
      const double back = m.quantile_pair(m.cdf(x), m.survival(x));
      EXPECT_LT(rel_diff(back, x), 1e-8) << m.family_name() << " x=" << x;
    }
  }
}

TEST(Marginal, QuantileMonotone) {
  for (const Marginal& m : benchmark_marginals()) {
    double prev = -kInf;
    for (int k = 1; k < 1000; ++k) {
      const double q = m.quantile(k / 1000.0);
      EXPECT_GT(q, prev);
      prev = q;
    }
  }
}

TEST(Marginal, PdfIntegratesToOne) {
  for (const Marginal& m : benchmark_marginals()) {
    auto f = [&](double x) { return m.pdf(x); };
    const double lo = m.support_min();
    // Heavy tails: integrate to a far quantile and add back its survival.
    const double hi = m.quantile_from_log_survival(std::log(1e-12));
    const double mid = m.quantile(0.5);
    const double total = quad::integrate_singular(f, lo, mid, 1e-12) +
                         quad::integrate_panels<31>(f, mid, hi, 0.1 * (mid - lo + 1.0), 1e-12) + 1e-12;
    EXPECT_NEAR(total, 1.0, 1e-6) << m.family_name();
  }
}

TEST(Marginal, DeepTailLogSurvivalIsExact) {
  const Marginal m = Marginal::weibull(0.25, 1.0);
  EXPECT_NEAR(m.log_survival(1e8), -100.0, 1e-12);
  EXPECT_TRUE(std::isfinite(m.log_survival(1e8)));
  EXPECT_NEAR(Marginal::pareto(1.0, 16.0).log_survival(1e300), -16.0 * std::log1p(1e300), 1e-9);
  EXPECT_TRUE(std::isfinite(Marginal::lognormal(0.0, 0.75).log_survival(1e100)));
}

TEST(Marginal, QuantileFromLogSurvivalInvertsDeepTail) {
  const Marginal m = Marginal::lognormal(0.0, 0.75);
  for (double ls : {-10.0, -100.0, -600.0}) {
    const double x = m.quantile_from_log_survival(ls);
    EXPECT_NEAR(m.log_survival(x), ls, 1e-9 * std::abs(ls));
  }
}

TEST(Marginal, ExponentialSampleMean) {
  Rng rng(21);
  const Marginal m = Marginal::exponential(1.0);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = m.sample(rng);
  EXPECT_NEAR(sample_stats(xs).mean, 1.0, 4e-3);
}

TEST(Marginal, WeibullSampleMean) {
  Rng rng(22);
  const Marginal m = Marginal::weibull(2.0, 1.0);
  std::vector<double> xs(1000000);
  for (double& x : xs) x = m.sample(rng);
  const auto st = sample_stats(xs);
  EXPECT_NEAR(st.mean, std::sqrt(std::numbers::pi) / 2.0, 4.0 * st.se);
  EXPECT_NEAR(m.mean(), std::tgamma(1.5), 1e-14);
}

TEST(Marginal, SamplesPassKolmogorovSmirnov) {
  Rng rng(23);
  for (const Marginal& m : benchmark_marginals()) {
    std::vector<double> xs(100000);
    for (double& x : xs) x = m.sample(rng);
    EXPECT_GT(ks_pvalue(xs, [&](double x) { return m.cdf(x); }), 1e-3) << m.family_name();
  }
}

TEST(Marginal, ExponentialTailIsMemoryless) {
  Rng rng(24);
  const Marginal m = Marginal::exponential(1.0);
  std::vector<double> xs(100000);
  for (double& x : xs) {
    x = m.sample_tail(10.0, rng);
    ASSERT_GT(x, 10.0);
    x -= 10.0;
  }
  EXPECT_GT(ks_pvalue(xs, [](double x) { return -std::expm1(-x); }), 1e-3);
}

TEST(Marginal, ParetoTailSamplesExceedThreshold) {
  Rng rng(25);
  const Marginal m = Marginal::pareto(1.0, 1.0, 0.0);
  for (int k = 0; k < 100000; ++k) ASSERT_GT(m.sample_tail(1e3, rng), 1e3);
}

TEST(Marginal, HeavyWeibullTailMatchesSurvivalRatio) {
  Rng rng(26);
  const Marginal m = Marginal::weibull(0.25, 1.0);
  const double gamma = 1e6;
  std::vector<double> xs(100000);
  for (double& x : xs) x = m.sample_tail(gamma, rng);
  const double g4 = std::pow(gamma, 0.25);
  auto cdf = [&](double x) { return -std::expm1(g4 - std::pow(x, 0.25)); };
  EXPECT_GT(ks_pvalue(xs, cdf), 1e-3);
}

TEST(Marginal, InfeasibleTruncationSignalled) {
  Rng rng(27);
  EXPECT_THROW(Marginal::weibull(2.0, 1.0).sample_tail(1e200, rng), std::domain_error);
}

TEST(Marginal, TailSampleBelowSupportIsPlainSample) {
  Rng a(28);
  Rng b(28);
  const Marginal m = Marginal::pareto(1.0, 3.0, 2.0);
  for (int k = 0; k < 100; ++k) EXPECT_EQ(m.sample_tail(-5.0, a), m.sample(b));
}

TEST(Marginal, ParamsRoundTrip) {
  for (const Marginal& m : benchmark_marginals())
    EXPECT_EQ(Marginal::from_params(m.family_name(), m.params()), m);
}

TEST(Normal, UpperQuantileInvertsLogSurvival) {
  Gen gen(29);
  for (int k = 0; k < 500; ++k) {
    // Below about -3 the log survival is -P(Z < z) and no longer determines z.
    const double z = gen.uniform(-3.0, 35.0);
    EXPECT_NEAR(normal_upper_quantile(normal_log_survival(z)), z, 1e-9 * (1.0 + std::abs(z)));
  }
}

}  // namespace
}  // namespace polartail
