#include "polartail/radial.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>
#include <stdexcept>

namespace polartail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double log_sum_exp(const std::vector<double>& v) {
  const double m = *std::max_element(v.begin(), v.end());
  if (m == -kInf || m == kInf) return m;
  double acc = 0.0;
  for (double x : v) acc += std::exp(x - m);
  return m + std::log(acc);
}

}  // namespace

RadialModel RadialModel::subexp_dominant(const ProblemSpec& spec, std::vector<int> dominant) {
  if (dominant.empty()) throw std::invalid_argument("dominant index set must be non-empty");
  std::sort(dominant.begin(), dominant.end());
  if (std::adjacent_find(dominant.begin(), dominant.end()) != dominant.end())
    throw std::invalid_argument("dominant index set has duplicates");
  RadialModel rm;
  rm.kind_ = Kind::SubexpDominant;
  for (int i : dominant) {
    if (i < 0 || i >= spec.dim()) throw std::out_of_range("dominant index out of range");
    rm.terms_.push_back(spec.marginal(i));
  }
  rm.dominant_ = std::move(dominant);
  return rm;
}

RadialModel RadialModel::light_weibull(double beta, double lambda, int d) {
  if (!(beta > 1.0) || !std::isfinite(beta)) throw std::invalid_argument("light Weibull radial model needs beta > 1");
  if (!(lambda > 0.0) || !std::isfinite(lambda)) throw std::invalid_argument("light Weibull radial model needs lambda > 0");
  if (d < 1) throw std::invalid_argument("light Weibull radial model needs d >= 1");
  RadialModel rm;
  rm.kind_ = Kind::LightWeibullProp1;
  rm.beta_ = beta;
  rm.lambda_ = lambda;
  rm.d_ = d;
  const double dd = d;
  rm.p_ = beta * (dd - 1.0) / 2.0;
  rm.b_ = std::pow(dd, 1.0 - beta) * std::pow(lambda, -beta);
  rm.log_a_ = 0.5 * (dd - 1.0) * std::log(2.0 * beta * std::numbers::pi / (beta - 1.0)) -
              0.5 * std::log(dd) - rm.p_ * std::log(lambda * dd);
  rm.s_star_ = std::pow(rm.p_ / (rm.b_ * beta), 1.0 / beta);
  return rm;
}

RadialModel RadialModel::exact_sum(std::string name, LogFn log_pdf, LogFn log_tail, double support_min) {
  if (!log_pdf || !log_tail) throw std::invalid_argument("exact radial model needs density and tail");
  RadialModel rm;
  rm.kind_ = Kind::ExactSum;
  rm.label_ = std::move(name);
  rm.exact_log_pdf_ = std::move(log_pdf);
  rm.exact_log_tail_ = std::move(log_tail);
  rm.support_min_ = support_min;
  return rm;
}

RadialModel RadialModel::exact_exponential_sum(int d, double rate) {
  if (d < 1) throw std::invalid_argument("Erlang shape must be >= 1");
  if (!(rate > 0.0)) throw std::invalid_argument("Erlang rate must be > 0");
  const double log_norm = std::lgamma(static_cast<double>(d));
  auto log_pdf = [d, rate, log_norm](double s) {
    if (!(s > 0.0)) return d == 1 && s == 0.0 ? std::log(rate) : -kInf;
    if (s == kInf) return -kInf;
    return std::log(rate) + (d - 1) * std::log(rate * s) - rate * s - log_norm;
  };
  auto log_tail = [d, rate](double s) {
    if (!(s > 0.0)) return 0.0;
    if (s == kInf) return -kInf;
    // log sum_{k<d} (rate s)^k / k!
    const double x = rate * s;
    const double lx = std::log(x);
    std::vector<double> terms(d);
    for (int k = 0; k < d; ++k) terms[k] = k * lx - std::lgamma(k + 1.0);
    return -x + log_sum_exp(terms);
  };
  std::ostringstream name;
  name << "erlang(" << d << "," << rate << ")";
  return exact_sum(name.str(), log_pdf, log_tail, 0.0);
}

std::string RadialModel::name() const {
  switch (kind_) {
    case Kind::SubexpDominant: {
      std::ostringstream os;
      os << "subexp_dominant(";
      for (std::size_t k = 0; k < dominant_.size(); ++k) os << (k ? "," : "") << dominant_[k];
      os << ")";
      return os.str();
    }
    case Kind::LightWeibullProp1: return "light_weibull";
    case Kind::ExactSum: return label_;
  }
  return {};
}

void RadialModel::require_valid(double s) const {
  if (std::isnan(s)) throw std::invalid_argument("radial model evaluated at NaN");
  if (kind_ == Kind::LightWeibullProp1 && !(s > s_star_))
    throw std::domain_error("light Weibull radial model requires s > s* = " + std::to_string(s_star_));
}

double RadialModel::log_tail(double gamma) const {
  require_valid(gamma);
  switch (kind_) {
    case Kind::SubexpDominant: {
      std::vector<double> ls(terms_.size());
      for (std::size_t k = 0; k < terms_.size(); ++k) ls[k] = terms_[k].log_survival(gamma);
      return log_sum_exp(ls);
    }
    case Kind::LightWeibullProp1:
      if (gamma == kInf) return -kInf;
      return log_a_ + p_ * std::log(gamma) - b_ * std::pow(gamma, beta_);
    case Kind::ExactSum:
      return exact_log_tail_(gamma);
  }
  return -kInf;
}

double RadialModel::log_pdf(double s) const {
  require_valid(s);
  switch (kind_) {
    case Kind::SubexpDominant: {
      std::vector<double> lf(terms_.size());
      for (std::size_t k = 0; k < terms_.size(); ++k) lf[k] = terms_[k].log_pdf(s);
      return log_sum_exp(lf);
    }
    case Kind::LightWeibullProp1: {
      if (s == kInf) return -kInf;
      const double sb = std::pow(s, beta_);
      return log_a_ - b_ * sb + (p_ - 1.0) * std::log(s) + std::log(b_ * beta_ * sb - p_);
    }
    case Kind::ExactSum:
      return exact_log_pdf_(s);
  }
  return -kInf;
}

double RadialModel::sample(double gamma, Rng& rng) const {
  const double lt = log_tail(gamma);
  if (lt == -kInf) throw std::domain_error("radial tail underflows at gamma");
  double s;
  if (kind_ == Kind::SubexpDominant) {
    std::size_t pick = 0;
    if (terms_.size() > 1) {
      std::vector<double> w(terms_.size());
      for (std::size_t k = 0; k < terms_.size(); ++k) w[k] = std::exp(terms_[k].log_survival(gamma) - lt);
      double u = uniform_open(rng);
      pick = terms_.size() - 1;
      for (std::size_t k = 0; k < terms_.size(); ++k) {
        if (u < w[k]) {
          pick = k;
          break;
        }
        u -= w[k];
      }
    }
    s = terms_[pick].sample_tail(gamma, rng);
  } else {
    const double target = lt + std::log(uniform_open(rng));
    const double lo = kind_ == Kind::ExactSum ? std::max(gamma, support_min_) : gamma;
    s = invert_log_tail([this](double x) { return log_tail(x); },
                        [this](double x) { return log_pdf(x); }, lo, target);
  }
  return s > gamma ? s : std::nextafter(gamma, kInf);
}

double invert_log_tail(const std::function<double(double)>& log_tail,
                       const std::function<double(double)>& log_pdf, double lo, double target) {
  constexpr int kMaxIter = 200;
  constexpr double kRelTol = 1e-12;
  auto f = [&](double x) { return log_tail(x) - target; };
  auto hazard = [&](double x) { return std::exp(log_pdf(x) - log_tail(x)); };

  double a = lo;
  double fa = f(a);
  if (!(fa > 0.0)) return a;

  // Bracket: first step is the Newton step from lo, then doubling.
  double step = fa / hazard(a);
  if (!(step > 0.0) || !std::isfinite(step)) step = std::max(1.0, std::abs(a)) * 1e-3;
  double b = a + step;
  int it = 0;
  while (f(b) > 0.0) {
    a = b;
    step *= 2.0;
    b = a + step;
    if (++it > kMaxIter || !std::isfinite(b)) throw std::runtime_error("invert_log_tail: cannot bracket root");
  }

  double x = 0.5 * (a + b);
  for (it = 0; it < kMaxIter; ++it) {
    const double fx = f(x);
    if (fx == 0.0) return x;
    (fx > 0.0 ? a : b) = x;
    double next = x + fx / hazard(x);
    if (!(next > a && next < b)) next = 0.5 * (a + b);
    const double scale = std::max(std::abs(next), std::numeric_limits<double>::min());
    if (std::abs(next - x) <= kRelTol * scale || (b - a) <= kRelTol * scale) return next;
    x = next;
  }
  throw std::runtime_error("invert_log_tail: no convergence after 200 iterations");
}

double radial_tail(const RadialModel& rm, double gamma) { return rm.log_tail(gamma); }
double radial_pdf(const RadialModel& rm, double s) { return rm.log_pdf(s); }
double sample_radial(const RadialModel& rm, double gamma, Rng& rng) { return rm.sample(gamma, rng); }

}  // namespace polartail
