#include "polartail/copula.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <random>
#include <stdexcept>

namespace polartail {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// A(n, m), m = 0..max(n-1, 0), with A(0, 0) = 1.
std::vector<std::vector<double>> eulerian_rows(int n_max) {
  std::vector<std::vector<double>> rows{{1.0}};
  for (int n = 1; n <= n_max; ++n) {
    std::vector<double> row(n, 0.0);
    const auto& prev = rows.back();
    for (int m = 0; m < n; ++m) {
      const double left = (m >= 1 && m - 1 < static_cast<int>(prev.size())) ? prev[m - 1] : 0.0;
      const double here = m < static_cast<int>(prev.size()) ? prev[m] : 0.0;
      row[m] = (n - m) * left + (m + 1) * here;
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

// psi^{(k)}(t) = (-1)^k e^{-x} t^{-k} sum_j a_{kj} x^j with x = t^alpha and
// a_{k+1,j} = alpha a_{k,j-1} + (k - j alpha) a_{k,j}.
std::vector<std::vector<double>> gumbel_log_coefficients(double alpha, int k_max) {
  std::vector<std::vector<double>> lin{{1.0}};
  for (int k = 0; k < k_max; ++k) {
    const auto& a = lin.back();
    std::vector<double> next(k + 2, 0.0);
    for (int j = 0; j <= k + 1; ++j) {
      const double from_lower = j >= 1 ? alpha * a[j - 1] : 0.0;
      const double from_same = j <= k ? (k - j * alpha) * a[j] : 0.0;
      next[j] = from_lower + from_same;
    }
    lin.push_back(std::move(next));
  }
  std::vector<std::vector<double>> logs;
  logs.reserve(lin.size());
  for (const auto& row : lin) {
    std::vector<double> l(row.size());
    std::transform(row.begin(), row.end(), l.begin(),
                   [](double v) { return v > 0.0 ? std::log(v) : -kInf; });
    logs.push_back(std::move(l));
  }
  return logs;
}

int parity_sign(int k) { return (k % 2 == 0) ? 1 : -1; }

double log_of_u(double u, double u_bar) { return u < 0.5 ? std::log(u) : std::log1p(-u_bar); }

}  // namespace

Copula::Copula(Family f, double theta, int d) : family_(f), theta_(theta), d_(d) {
  if (d < 1) throw std::invalid_argument("copula dimension must be >= 1");
  if (!std::isfinite(theta)) throw std::invalid_argument("copula parameter must be finite");
  switch (f) {
    case Family::Independent:
      break;
    case Family::Clayton:
      if (!(theta > 0.0)) throw std::invalid_argument("Clayton requires theta > 0");
      break;
    case Family::Frank:
      if (theta == 0.0) throw std::invalid_argument("Frank requires theta != 0");
      if (theta < 0.0 && d > 2) throw std::invalid_argument("Frank with theta < 0 requires d <= 2");
      eulerian_ = eulerian_rows(d);
      break;
    case Family::GumbelHougaard:
      if (!(theta >= 1.0)) throw std::invalid_argument("Gumbel-Hougaard requires theta >= 1");
      gumbel_log_coef_ = gumbel_log_coefficients(1.0 / theta, d);
      break;
    case Family::AMH:
      if (!(theta >= -1.0 && theta < 1.0)) throw std::invalid_argument("AMH requires -1 <= theta < 1");
      if (theta < 0.0 && d > 2) throw std::invalid_argument("AMH with theta < 0 requires d <= 2");
      if (theta > 0.0) eulerian_ = eulerian_rows(d);
      break;
  }
}

Copula Copula::independent(int d) { return {Family::Independent, 0.0, d}; }
Copula Copula::clayton(double theta, int d) { return {Family::Clayton, theta, d}; }
Copula Copula::frank(double theta, int d) { return {Family::Frank, theta, d}; }
Copula Copula::gumbel_hougaard(double theta, int d) { return {Family::GumbelHougaard, theta, d}; }
Copula Copula::amh(double theta, int d) { return {Family::AMH, theta, d}; }

Copula Copula::from_params(std::string_view family, double theta, int d) {
  if (family == "independent") return independent(d);
  if (family == "clayton") return clayton(theta, d);
  if (family == "frank") return frank(theta, d);
  if (family == "gumbel" || family == "gumbel_hougaard") return gumbel_hougaard(theta, d);
  if (family == "amh") return amh(theta, d);
  throw std::invalid_argument("unknown copula family: " + std::string(family));
}

std::string Copula::family_name() const {
  switch (family_) {
    case Family::Independent: return "independent";
    case Family::Clayton: return "clayton";
    case Family::Frank: return "frank";
    case Family::GumbelHougaard: return "gumbel_hougaard";
    case Family::AMH: return "amh";
  }
  return {};
}

Copula Copula::margin(int k) const { return {family_, theta_, k}; }

double Copula::generator(double u, double u_bar) const {
  switch (family_) {
    case Family::Independent:
      return -log_of_u(u, u_bar);
    case Family::Clayton:
      return std::expm1(-theta_ * log_of_u(u, u_bar));
    case Family::Frank:
      if (u < 0.5) return -std::log(std::expm1(-theta_ * u) / std::expm1(-theta_));
      return -std::log1p(std::exp(-theta_) * std::expm1(theta_ * u_bar) / std::expm1(-theta_));
    case Family::GumbelHougaard:
      return std::pow(-log_of_u(u, u_bar), theta_);
    case Family::AMH:
      return std::log1p(-theta_ * u_bar) - log_of_u(u, u_bar);
  }
  return 0.0;
}

double Copula::log_abs_generator_deriv(double u, double u_bar) const {
  const double lu = log_of_u(u, u_bar);
  switch (family_) {
    case Family::Independent:
      return -lu;
    case Family::Clayton:
      return std::log(theta_) - (theta_ + 1.0) * lu;
    case Family::Frank: {
      // theta / (e^{theta u} - 1); for tiny u the quotient would overflow.
      const double x = theta_ * u;
      if (std::abs(x) < 1e-8) return -lu - 0.5 * x;
      return std::log(theta_ / std::expm1(x));
    }
    case Family::GumbelHougaard:
      if (theta_ == 1.0) return -lu;
      return std::log(theta_) + (theta_ - 1.0) * std::log(-lu) - lu;
    case Family::AMH:
      return std::log1p(-theta_) - lu - std::log1p(-theta_ * u_bar);
  }
  return 0.0;
}

double Copula::inverse_generator(double t) const {
  switch (family_) {
    case Family::Independent:
      return std::exp(-t);
    case Family::Clayton:
      return std::exp(-std::log1p(t) / theta_);
    case Family::Frank:
      return -std::log1p(std::expm1(-theta_) * std::exp(-t)) / theta_;
    case Family::GumbelHougaard:
      return std::exp(-std::pow(t, 1.0 / theta_));
    case Family::AMH: {
      const double e = std::exp(-t);
      return (1.0 - theta_) * e / (1.0 - theta_ * e);
    }
  }
  return 0.0;
}

double Copula::inverse_generator_complement(double t) const {
  switch (family_) {
    case Family::Independent:
      return -std::expm1(-t);
    case Family::Clayton:
      return -std::expm1(-std::log1p(t) / theta_);
    case Family::Frank:
      return std::log1p(-std::expm1(theta_) * std::expm1(-t)) / theta_;
    case Family::GumbelHougaard:
      return -std::expm1(-std::pow(t, 1.0 / theta_));
    case Family::AMH:
      return -std::expm1(-t) / (1.0 - theta_ * std::exp(-t));
  }
  return 0.0;
}

// Numerator of Li_{-n}(w) = sum_m A(n,m) w^{m+1} / (1-w)^{n+1}; callers
// divide by (1-w)^{n+1} themselves since 1-w needs family-specific care.
// The leading factor w enters through log_abs_w, so w may underflow.
SignedLog Copula::polylog_deriv(int n, double w, double log_abs_w) const {
  std::vector<std::vector<double>> local;
  const std::vector<std::vector<double>>* rows = &eulerian_;
  if (n >= static_cast<int>(eulerian_.size())) {
    local = eulerian_rows(n);
    rows = &local;
  }
  const auto& a = (*rows)[n];
  double poly = 0.0;
  double wp = 1.0;
  for (double coef : a) {
    poly += coef * wp;
    wp *= w;
  }
  const int sign = (poly < 0.0) != std::signbit(w) ? -1 : 1;
  return {log_abs_w + std::log(std::abs(poly)), sign};
}

SignedLog Copula::inverse_generator_deriv(int k, double t) const {
  if (k < 0) throw std::invalid_argument("derivative order must be >= 0");
  if (std::isnan(t) || t < 0.0) throw std::invalid_argument("psi evaluated at t < 0");
  const int sgn = parity_sign(k);
  if (t == kInf) return {-kInf, sgn};

  switch (family_) {
    case Family::Independent:
      return {-t, sgn};

    case Family::Clayton: {
      const double a = 1.0 / theta_;
      double log_abs = -(a + k) * std::log1p(t);
      for (int j = 0; j < k; ++j) log_abs += std::log(a + j);
      return {log_abs, sgn};
    }

    case Family::Frank: {
      const double c = -std::expm1(-theta_);
      const double w = c * std::exp(-t);
      const double log_abs_w = std::log(std::abs(c)) - t;
      if (k == 0) {
        // psi = -log(1 - w) / theta = (w / theta) (1 + w/2 + ...).
        const double ratio = std::abs(w) > 1e-300 ? -std::log1p(-w) / w : 1.0;
        return {log_abs_w + std::log(ratio) - std::log(std::abs(theta_)), 1};
      }
      // 1 - w = e^-theta - c (e^-t - 1), free of cancellation for either sign of theta.
      const double log1mw = std::log(std::exp(-theta_) - c * std::expm1(-t));
      const int n = k - 1;
      const SignedLog poly = polylog_deriv(n, w, log_abs_w);
      const int theta_sign = theta_ > 0.0 ? 1 : -1;
      return {poly.log_abs - (n + 1) * log1mw - std::log(std::abs(theta_)),
              sgn * poly.sign * theta_sign};
    }

    case Family::GumbelHougaard: {
      const double alpha = 1.0 / theta_;
      if (k == 0) return {-std::pow(t, alpha), 1};
      std::vector<std::vector<double>> local;
      const std::vector<std::vector<double>>* coef = &gumbel_log_coef_;
      if (k >= static_cast<int>(gumbel_log_coef_.size())) {
        local = gumbel_log_coefficients(alpha, k);
        coef = &local;
      }
      const auto& row = (*coef)[k];
      const double lt = std::log(t);
      auto term = [&](std::size_t j) {
        const double power = j * alpha - k;
        return row[j] + (power == 0.0 ? 0.0 : power * lt);
      };
      double max_term = -kInf;
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != -kInf) max_term = std::max(max_term, term(j));
      if (max_term == kInf) return {kInf, sgn};
      double acc = 0.0;
      for (std::size_t j = 0; j < row.size(); ++j)
        if (row[j] != -kInf) acc += std::exp(term(j) - max_term);
      return {-std::pow(t, alpha) + max_term + std::log(acc), sgn};
    }

    case Family::AMH: {
      if (theta_ > 0.0) {
        const double w = theta_ * std::exp(-t);
        const SignedLog poly = polylog_deriv(k, w, std::log(theta_) - t);
        return {std::log1p(-theta_) - std::log(theta_) + poly.log_abs - (k + 1) * std::log1p(-w),
                sgn * poly.sign};
      }
      if (theta_ == 0.0) return {-t, sgn};
      const double e = std::exp(-t);
      const double base = std::log1p(-theta_) - t;
      switch (k) {
        case 0: return {base - std::log1p(-theta_ * e), 1};
        case 1: return {base - 2.0 * std::log1p(-theta_ * e), -1};
        case 2: return {base + std::log1p(theta_ * e) - 3.0 * std::log1p(-theta_ * e), 1};
        default:
          throw std::domain_error("AMH with theta <= 0 supports derivative order <= 2 only");
      }
    }
  }
  return {-kInf, 1};
}

double Copula::log_density(std::span<const double> u) const {
  if (static_cast<int>(u.size()) != d_) throw std::invalid_argument("copula density: wrong dimension");
  std::vector<double> u_bar(u.size());
  for (std::size_t i = 0; i < u.size(); ++i) {
    if (!(u[i] > 0.0 && u[i] < 1.0))
      throw std::invalid_argument("copula density requires u strictly inside (0,1)");
    u_bar[i] = 1.0 - u[i];
  }
  return log_density(u, u_bar);
}

double Copula::log_density(std::span<const double> u, std::span<const double> u_bar) const {
  for (std::size_t i = 0; i < u.size(); ++i)
    if (!(u[i] > 0.0) || !(u_bar[i] > 0.0)) return -kInf;
  if (family_ == Family::Independent) return 0.0;
  double t = 0.0;
  double log_jac = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    t += generator(u[i], u_bar[i]);
    log_jac += log_abs_generator_deriv(u[i], u_bar[i]);
  }
  return inverse_generator_deriv(static_cast<int>(u.size()), t).log_abs + log_jac;
}

double Copula::cdf(std::span<const double> u) const {
  double t = 0.0;
  for (double ui : u) {
    if (ui <= 0.0) return 0.0;
    t += generator(ui, 1.0 - ui);
  }
  return inverse_generator(t);
}

double Copula::sample_frailty(Rng& rng) const {
  switch (family_) {
    case Family::Independent:
      return 1.0;
    case Family::Clayton:
      return std::gamma_distribution<double>(1.0 / theta_, 1.0)(rng);
    case Family::Frank: {
      // Kemp's LK algorithm for the logarithmic law P(V=k) = c^k / (k theta).
      const double c = -std::expm1(-theta_);
      const double u2 = uniform_open(rng);
      if (u2 > c) return 1.0;
      const double q = -std::expm1(-theta_ * uniform_open(rng));
      if (u2 < q * q) return std::floor(1.0 + std::log(u2) / std::log(q));
      return u2 > q ? 1.0 : 2.0;
    }
    case Family::GumbelHougaard: {
      if (theta_ == 1.0) return 1.0;
      // Kanter's representation of the positive stable law with Laplace
      // transform exp(-s^alpha).
      const double alpha = 1.0 / theta_;
      const double angle = std::numbers::pi * uniform_open(rng);
      const double w = standard_exponential(rng);
      return std::sin(alpha * angle) / std::pow(std::sin(angle), 1.0 / alpha) *
             std::pow(std::sin((1.0 - alpha) * angle) / w, (1.0 - alpha) / alpha);
    }
    case Family::AMH:
      if (theta_ == 0.0) return 1.0;
      return 1.0 + std::floor(std::log(uniform_open(rng)) / std::log(theta_));
  }
  return 1.0;
}

// v with dC(u,v)/du = w, i.e. the conditional quantile of U2 given U1 = u.
double Copula::conditional_inverse(double u, double u_bar, double w) const {
  const double a = generator(u, u_bar);
  const double log_den = inverse_generator_deriv(1, a).log_abs;
  double lo = 0.0;
  double hi = 1.0;
  for (int it = 0; it < 200 && hi - lo > 1e-17; ++it) {
    const double mid = 0.5 * (lo + hi);
    const double h = std::exp(inverse_generator_deriv(1, a + generator(mid, 1.0 - mid)).log_abs - log_den);
    (h < w ? lo : hi) = mid;
  }
  return 0.5 * (lo + hi);
}

void Copula::sample(Rng& rng, std::span<double> u, std::span<double> u_bar) const {
  if (static_cast<int>(u.size()) != d_ || u_bar.size() != u.size())
    throw std::invalid_argument("copula sample: wrong dimension");
  if (theta_ < 0.0) {
    const double e = standard_exponential(rng);
    u[0] = std::exp(-e);
    u_bar[0] = -std::expm1(-e);
    if (d_ == 2) {
      u[1] = conditional_inverse(u[0], u_bar[0], uniform_open(rng));
      u_bar[1] = 1.0 - u[1];
    }
    return;
  }
  const double v = sample_frailty(rng);
  for (int i = 0; i < d_; ++i) {
    const double t = standard_exponential(rng) / v;
    u[i] = inverse_generator(t);
    u_bar[i] = inverse_generator_complement(t);
  }
}

std::vector<double> Copula::sample(Rng& rng) const {
  std::vector<double> u(d_);
  std::vector<double> u_bar(d_);
  sample(rng, u, u_bar);
  return u;
}

SignedLog generator_inverse_deriv(const Copula& c, int k, double t) {
  return c.inverse_generator_deriv(k, t);
}

double copula_density(const Copula& c, std::span<const double> u) { return c.log_density(u); }

std::vector<double> sample_copula(const Copula& c, Rng& rng) { return c.sample(rng); }

}  // namespace polartail
