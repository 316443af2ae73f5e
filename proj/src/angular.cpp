#include "polartail/angular.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>
#include <stdexcept>

#include "polartail/polar.hpp"

namespace polartail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// log p_i(s); the largest entry is finite.
std::vector<double> log_weights(const ProblemSpec& spec, double s) {
  const int d = spec.dim();
  std::vector<double> lw(d);
  double m = -kInf;
  for (int i = 0; i < d; ++i) {
    lw[i] = spec.marginal(i).log_survival(s);
    m = std::max(m, lw[i]);
  }
  if (m == -kInf) throw std::domain_error("optimistic weights: every marginal survival underflows");
  double acc = 0.0;
  for (double v : lw) acc += std::exp(v - m);
  const double lse = m + std::log(acc);
  for (double& v : lw) v -= lse;
  return lw;
}

int pick_index(const std::vector<double>& log_w, Rng& rng) {
  double u = uniform_open(rng);
  const int d = static_cast<int>(log_w.size());
  for (int i = 0; i < d - 1; ++i) {
    const double p = std::exp(log_w[i]);
    if (u < p) return i;
    u -= p;
  }
  return d - 1;
}

void sample_optimistic_impl(const ProblemSpec& spec, double s, Rng& rng, std::span<double> theta,
                            bool dependent) {
  const int d = spec.dim();
  if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("sample_optimistic: wrong dimension");
  if (!(s > 0.0)) throw std::invalid_argument("sample_optimistic requires s > 0");
  if (d == 1) {
    theta[0] = 1.0;
    return;
  }
  const int pick = pick_index(log_weights(spec, s), rng);
  if (dependent && !spec.independent()) {
    sample_joint(spec, rng, theta);
    for (int j = 0; j < d; ++j) theta[j] /= s;
  } else {
    for (int j = 0; j < d; ++j)
      if (j != pick) theta[j] = spec.marginal(j).sample(rng) / s;
  }
  double rest = 0.0;
  for (int j = 0; j < d; ++j)
    if (j != pick) rest += theta[j];
  theta[pick] = 1.0 - rest;
}

double optimistic_log_pdf_impl(const ProblemSpec& spec, double s, std::span<const double> theta,
                               bool dependent) {
  const int d = spec.dim();
  if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("optimistic_log_pdf: wrong dimension");
  require_simplex(theta);
  if (d == 1) return 0.0;
  const std::vector<double> lw = log_weights(spec, s);
  const bool use_copula = dependent && !spec.independent() && d >= 3;
  const Copula& cop = spec.copula();

  // Per-coordinate log factors; phi only needed for the copula margin.
  std::vector<double> lf(d);
  std::vector<double> phi(d, 0.0);
  for (int j = 0; j < d; ++j) {
    const Marginal& m = spec.marginal(j);
    const double x = s * theta[j];
    lf[j] = m.log_pdf(x);
    if (use_copula && lf[j] != -kInf) {
      const double u = m.cdf(x);
      const double u_bar = m.survival(x);
      if (!(u > 0.0 && u_bar > 0.0)) {
        lf[j] = -kInf;
      } else {
        phi[j] = cop.generator(u, u_bar);
        lf[j] += cop.log_abs_generator_deriv(u, u_bar);
      }
    }
  }
  // Leave-one-out sums from prefix and suffix sums.
  std::vector<double> lf_pre(d + 1, 0.0), lf_suf(d + 1, 0.0), phi_pre(d + 1, 0.0), phi_suf(d + 1, 0.0);
  for (int j = 0; j < d; ++j) {
    lf_pre[j + 1] = lf_pre[j] + lf[j];
    phi_pre[j + 1] = phi_pre[j] + phi[j];
  }
  for (int j = d - 1; j >= 0; --j) {
    lf_suf[j] = lf_suf[j + 1] + lf[j];
    phi_suf[j] = phi_suf[j + 1] + phi[j];
  }

  std::vector<double> terms(d);
  double m = -kInf;
  for (int i = 0; i < d; ++i) {
    double t = lw[i] + lf_pre[i] + lf_suf[i + 1];
    if (use_copula && t != -kInf) t += cop.inverse_generator_deriv(d - 1, phi_pre[i] + phi_suf[i + 1]).log_abs;
    terms[i] = t;
    m = std::max(m, t);
  }
  if (m == -kInf) return -kInf;
  double acc = 0.0;
  for (double t : terms) acc += std::exp(t - m);
  return m + std::log(acc) + (d - 1) * std::log(std::abs(s));
}

}  // namespace

std::vector<double> optimistic_weights(const ProblemSpec& spec, double s) {
  std::vector<double> w = log_weights(spec, s);
  for (double& v : w) v = std::exp(v);
  return w;
}

void sample_optimistic(const ProblemSpec& spec, double s, Rng& rng, std::span<double> theta) {
  sample_optimistic_impl(spec, s, rng, theta, true);
}

std::vector<double> sample_optimistic(const ProblemSpec& spec, double s, Rng& rng) {
  std::vector<double> theta(spec.dim());
  sample_optimistic(spec, s, rng, theta);
  return theta;
}

double optimistic_log_pdf(const ProblemSpec& spec, double s, std::span<const double> theta) {
  return optimistic_log_pdf_impl(spec, s, theta, true);
}

double weibull_omega(double s, double beta, double lambda, int d) {
  return std::sqrt(2.0 * beta * (beta - 1.0)) * std::pow(s / (d * lambda), 0.5 * (beta - 2.0)) / lambda;
}

namespace {

void check_weibull_angular(double s, double beta, double lambda, int d) {
  if (!(beta > 1.0)) throw std::invalid_argument("Gaussian angular law needs beta > 1");
  if (!(lambda > 0.0)) throw std::invalid_argument("Gaussian angular law needs lambda > 0");
  if (d < 2) throw std::invalid_argument("Gaussian angular law needs d >= 2");
  if (!(s > 0.0)) throw std::invalid_argument("Gaussian angular law needs s > 0");
}

}  // namespace

void sample_weibull_angular(double s, double beta, double lambda, int d, Rng& rng,
                            std::span<double> theta) {
  check_weibull_angular(s, beta, lambda, d);
  if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("sample_weibull_angular: wrong dimension");
  double mean = 0.0;
  for (int i = 0; i < d; ++i) {
    theta[i] = standard_normal(rng);
    mean += theta[i];
  }
  mean /= d;
  const double scale = std::sqrt(static_cast<double>(d) / (d - 1)) / (weibull_omega(s, beta, lambda, d) * s);
  double rest = 0.0;
  for (int i = 0; i < d - 1; ++i) {
    theta[i] = 1.0 / d + (theta[i] - mean) * scale;
    rest += theta[i];
  }
  theta[d - 1] = 1.0 - rest;
}

std::vector<double> sample_weibull_angular(double s, double beta, double lambda, int d, Rng& rng) {
  std::vector<double> theta(d);
  sample_weibull_angular(s, beta, lambda, d, rng, theta);
  return theta;
}

double weibull_angular_log_pdf(double s, double beta, double lambda, int d,
                               std::span<const double> theta) {
  check_weibull_angular(s, beta, lambda, d);
  if (static_cast<int>(theta.size()) != d) throw std::invalid_argument("weibull_angular_log_pdf: wrong dimension");
  require_simplex(theta);
  const double ws = weibull_omega(s, beta, lambda, d) * s;
  const double m = d - 1;
  double sum_sq = 0.0;
  double w_sum = 0.0;
  for (int i = 0; i < d - 1; ++i) {
    const double w = (theta[i] - 1.0 / d) * ws;
    sum_sq += w * w;
    w_sum += w;
  }
  sum_sq += w_sum * w_sum;
  const double q = m / d * sum_sq;
  const double log_det = (m - 1.0) * std::log((m + 1.0) / m) - std::log(m);
  return -0.5 * m * std::log(2.0 * std::numbers::pi) - 0.5 * log_det - 0.5 * q + m * std::log(ws);
}

AngularModel AngularModel::optimistic_independent() {
  AngularModel am;
  am.kind_ = Kind::OptimisticInd;
  return am;
}

AngularModel AngularModel::optimistic_dependent() {
  AngularModel am;
  am.kind_ = Kind::OptimisticDep;
  return am;
}

AngularModel AngularModel::optimistic_for(const ProblemSpec& spec) {
  return spec.independent() ? optimistic_independent() : optimistic_dependent();
}

AngularModel AngularModel::light_weibull_gaussian(double beta, double lambda, int d) {
  check_weibull_angular(1.0, beta, lambda, d);
  AngularModel am;
  am.kind_ = Kind::LightWeibullGaussian;
  am.beta_ = beta;
  am.lambda_ = lambda;
  am.d_ = d;
  return am;
}

AngularModel AngularModel::exact_conditional(std::string name, ConditionalLogPdf log_pdf,
                                             ConditionalSampler sampler) {
  if (!log_pdf || !sampler) throw std::invalid_argument("exact angular model needs density and sampler");
  AngularModel am;
  am.kind_ = Kind::ExactConditional;
  am.label_ = std::move(name);
  am.cond_log_pdf_ = std::move(log_pdf);
  am.cond_sampler_ = std::move(sampler);
  return am;
}

AngularModel AngularModel::exact_uniform() {
  return exact_conditional(
      "uniform", [](double, double t) { return t > 0.0 && t < 1.0 ? 0.0 : -kInf; },
      [](double, Rng& rng) { return uniform_open(rng); });
}

std::string AngularModel::name() const {
  switch (kind_) {
    case Kind::OptimisticInd: return "optimistic_ind";
    case Kind::OptimisticDep: return "optimistic_dep";
    case Kind::LightWeibullGaussian: return "weibull_gaussian";
    case Kind::ExactConditional: return label_;
  }
  return {};
}

void AngularModel::check(const ProblemSpec& spec) const {
  if (kind_ == Kind::LightWeibullGaussian && spec.dim() != d_)
    throw std::invalid_argument("Gaussian angular model dimension does not match the problem");
  if (kind_ == Kind::ExactConditional && spec.dim() != 2)
    throw std::invalid_argument("exact conditional angular model requires d = 2");
}

void AngularModel::sample(const ProblemSpec& spec, double s, Rng& rng, std::span<double> theta) const {
  switch (kind_) {
    case Kind::OptimisticInd:
      sample_optimistic_impl(spec, s, rng, theta, false);
      return;
    case Kind::OptimisticDep:
      sample_optimistic_impl(spec, s, rng, theta, true);
      return;
    case Kind::LightWeibullGaussian:
      sample_weibull_angular(s, beta_, lambda_, d_, rng, theta);
      return;
    case Kind::ExactConditional:
      theta[0] = cond_sampler_(s, rng);
      theta[1] = 1.0 - theta[0];
      return;
  }
}

double AngularModel::log_pdf(const ProblemSpec& spec, double s, std::span<const double> theta) const {
  switch (kind_) {
    case Kind::OptimisticInd: return optimistic_log_pdf_impl(spec, s, theta, false);
    case Kind::OptimisticDep: return optimistic_log_pdf_impl(spec, s, theta, true);
    case Kind::LightWeibullGaussian: return weibull_angular_log_pdf(s, beta_, lambda_, d_, theta);
    case Kind::ExactConditional:
      require_simplex(theta);
      return cond_log_pdf_(s, theta[0]);
  }
  return -kInf;
}

}  // namespace polartail
