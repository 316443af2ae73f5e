#include "polartail/harness.hpp"

#include <boost/math/tools/roots.hpp>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <limits>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "polartail/baselines.hpp"
#include "polartail/oracle.hpp"
#include "polartail/polar.hpp"
#include "polartail/quadrature.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace polartail {

namespace {

constexpr std::uint64_t kCellTag = 0x63656c6c;
constexpr std::uint64_t kPilotTag = 0x70696c6f;

using json = nlohmann::json;

bool iid_family(const ProblemSpec& spec, Marginal::Family family) {
  return spec.iid() && spec.marginal(0).family() == family;
}

// (beta, lambda) of iid Weibull summands with beta > 1.
std::pair<double, double> light_weibull_params(const ProblemSpec& spec) {
  if (!iid_family(spec, Marginal::Family::Weibull))
    throw std::invalid_argument("light Weibull models need iid Weibull summands");
  const auto p = spec.marginal(0).params();
  if (!(p[0] > 1.0)) throw std::invalid_argument("light Weibull models need beta > 1");
  return {p[0], p[1]};
}

bool uses_light_weibull(const ExperimentConfig& c) {
  for (const auto& e : c.estimators)
    if (e.type == EstimatorSpec::Type::Tilt ||
        (e.type == EstimatorSpec::Type::Polar && e.radial.kind == "light_weibull"))
      return true;
  return false;
}

std::string type_name(EstimatorSpec::Type t) {
  switch (t) {
    case EstimatorSpec::Type::Polar: return "polar";
    case EstimatorSpec::Type::Cmc: return "cmc";
    case EstimatorSpec::Type::Ak: return "ak";
    case EstimatorSpec::Type::Tilt: return "tilt";
  }
  return {};
}

EstimatorSpec::Type parse_type(const std::string& s) {
  if (s == "polar") return EstimatorSpec::Type::Polar;
  if (s == "cmc") return EstimatorSpec::Type::Cmc;
  if (s == "ak") return EstimatorSpec::Type::Ak;
  if (s == "tilt") return EstimatorSpec::Type::Tilt;
  throw std::invalid_argument("unknown estimator type: " + s);
}

std::vector<double> log_spaced(double hi, double lo, int n) {
  std::vector<double> out(n);
  for (int k = 0; k < n; ++k) out[k] = std::exp(std::log(hi) + (std::log(lo) - std::log(hi)) * k / (n - 1));
  return out;
}

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

}  // namespace

std::string EstimatorSpec::name() const { return label.empty() ? type_name(type) : label; }

void ExperimentConfig::validate() const {
  if (!spec) throw std::invalid_argument("config has no problem specification");
  if (estimators.empty()) throw std::invalid_argument("config needs at least one estimator");
  if (gammas.empty() == target_probs.empty())
    throw std::invalid_argument("config needs exactly one of gammas and target_probs");
  for (double p : target_probs)
    if (!(p > 0.0 && p < 1.0)) throw std::invalid_argument("target probabilities must lie in (0,1)");
  for (double g : gammas)
    if (std::isnan(g)) throw std::invalid_argument("gamma is NaN");
  if (R < 2) throw std::invalid_argument("R must be >= 2");
  if (replications < 1) throw std::invalid_argument("replications must be >= 1");
  if (pilot_R < 2) throw std::invalid_argument("pilot_R must be >= 2");
  if (workers < 1) throw std::invalid_argument("workers must be >= 1");
}

ExperimentConfig parse_config(const json& j) {
  ExperimentConfig c;
  c.name = j.value("name", std::string("experiment"));
  std::vector<Marginal> marginals;
  for (const auto& m : j.at("marginals"))
    marginals.push_back(Marginal::from_params(m.at("family").get<std::string>(),
                                              m.at("params").get<std::vector<double>>()));
  const int d = static_cast<int>(marginals.size());
  Copula copula = Copula::independent(d);
  if (j.contains("copula")) {
    const auto& cj = j.at("copula");
    copula = Copula::from_params(cj.at("family").get<std::string>(), cj.value("theta", 0.0), d);
  }
  c.spec.emplace(std::move(marginals), std::move(copula));

  for (const auto& e : j.at("estimators")) {
    EstimatorSpec es;
    es.type = parse_type(e.at("type").get<std::string>());
    es.label = e.value("label", std::string());
    if (e.contains("radial")) {
      es.radial.kind = e["radial"].value("kind", es.radial.kind);
      es.radial.dominant = e["radial"].value("dominant", std::vector<int>{});
    }
    if (e.contains("angular")) es.angular.kind = e["angular"].value("kind", es.angular.kind);
    c.estimators.push_back(std::move(es));
  }
  if (j.contains("gammas")) c.gammas = j.at("gammas").get<std::vector<double>>();
  if (j.contains("target_probs")) c.target_probs = j.at("target_probs").get<std::vector<double>>();
  c.R = j.value("R", c.R);
  c.seed = j.value("seed", c.seed);
  c.replications = j.value("replications", c.replications);
  c.pilot_R = j.value("pilot_R", c.pilot_R);
  c.workers = j.value("workers", c.workers);
  c.validate();
  return c;
}

ExperimentConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  return parse_config(json::parse(in));
}

json config_to_json(const ExperimentConfig& c) {
  c.validate();
  json j;
  j["name"] = c.name;
  for (const auto& m : c.spec->marginals()) j["marginals"].push_back({{"family", m.family_name()}, {"params", m.params()}});
  j["copula"] = {{"family", c.spec->copula().family_name()}};
  if (!c.spec->independent()) j["copula"]["theta"] = c.spec->copula().theta();
  for (const auto& e : c.estimators) {
    json ej{{"type", type_name(e.type)}};
    if (!e.label.empty()) ej["label"] = e.label;
    if (e.type == EstimatorSpec::Type::Polar) {
      ej["radial"] = {{"kind", e.radial.kind}};
      if (!e.radial.dominant.empty()) ej["radial"]["dominant"] = e.radial.dominant;
      ej["angular"] = {{"kind", e.angular.kind}};
    }
    j["estimators"].push_back(ej);
  }
  if (!c.gammas.empty()) j["gammas"] = c.gammas;
  if (!c.target_probs.empty()) j["target_probs"] = c.target_probs;
  j["R"] = c.R;
  j["seed"] = c.seed;
  j["replications"] = c.replications;
  j["pilot_R"] = c.pilot_R;
  j["workers"] = c.workers;
  return j;
}

ExperimentConfig builtin_test(int n) {
  if (n < 1 || n > 10) throw std::invalid_argument("builtin tests are numbered 1 to 10");
  // Dimension, family and copula per test; the dominant summand is the one
  // with the heaviest tail.
  auto lognormals = [](int d) {
    std::vector<Marginal> m;
    for (int i = 1; i <= d; ++i) m.push_back(Marginal::lognormal(-static_cast<double>(i) / d, std::sqrt(static_cast<double>(i) / d)));
    return m;
  };
  auto paretos = [](int d) {
    std::vector<Marginal> m;
    for (int i = 1; i <= d; ++i) m.push_back(Marginal::pareto(1.0, i, 0.0));
    return m;
  };
  auto heavy_weibulls = [](int d) {
    std::vector<Marginal> m;
    for (int i = 1; i <= d; ++i) m.push_back(Marginal::weibull(0.25, static_cast<double>(i) / d));
    return m;
  };

  ExperimentConfig c;
  c.name = "test" + std::to_string(n);
  c.seed = 1000 + static_cast<std::uint64_t>(n);
  c.target_probs = log_spaced(1e-3, 1e-7, 9);
  std::vector<Marginal> m;
  std::optional<Copula> cop;
  int dominant = 0;
  switch (n) {
    case 1: m = lognormals(12); dominant = 11; break;
    case 2: m = paretos(16); dominant = 0; break;
    case 3: m = heavy_weibulls(8); dominant = 7; break;
    case 4: m.assign(10, Marginal::weibull(2.0, 1.0)); break;
    case 5: m = lognormals(12); cop = Copula::frank(0.5, 12); dominant = 11; break;
    case 6: m = lognormals(4); cop = Copula::frank(0.5, 4); dominant = 3; break;
    case 7: m = paretos(16); cop = Copula::clayton(0.9, 16); dominant = 0; break;
    case 8: m = paretos(4); cop = Copula::clayton(0.9, 4); dominant = 0; break;
    case 9: m = heavy_weibulls(8); cop = Copula::gumbel_hougaard(1.25, 8); dominant = 7; break;
    case 10: m = heavy_weibulls(2); cop = Copula::gumbel_hougaard(1.25, 2); dominant = 1; break;
  }
  const int d = static_cast<int>(m.size());
  c.spec.emplace(std::move(m), cop ? *cop : Copula::independent(d));

  EstimatorSpec polar;
  polar.type = EstimatorSpec::Type::Polar;
  if (n == 4) {
    polar.radial.kind = "light_weibull";
    polar.angular.kind = "weibull_gaussian";
    EstimatorSpec tilt;
    tilt.type = EstimatorSpec::Type::Tilt;
    c.estimators = {polar, tilt};
  } else {
    polar.radial.kind = "subexp_dominant";
    polar.radial.dominant = {dominant};
    polar.angular.kind = "optimistic";
    EstimatorSpec ak;
    ak.type = EstimatorSpec::Type::Ak;
    c.estimators = {polar, ak};
  }
  return c;
}

RadialModel make_radial(const ProblemSpec& spec, const RadialSpec& rs) {
  if (rs.kind == "subexp_dominant") {
    if (rs.dominant.empty()) throw std::invalid_argument("subexp_dominant radial model needs dominant indices");
    return RadialModel::subexp_dominant(spec, rs.dominant);
  }
  if (rs.kind == "light_weibull") {
    const auto [beta, lambda] = light_weibull_params(spec);
    return RadialModel::light_weibull(beta, lambda, spec.dim());
  }
  if (rs.kind == "erlang") {
    if (!iid_family(spec, Marginal::Family::Exponential))
      throw std::invalid_argument("erlang radial model needs iid exponential summands");
    return RadialModel::exact_exponential_sum(spec.dim(), spec.marginal(0).params()[0]);
  }
  throw std::invalid_argument("unknown radial model: " + rs.kind);
}

AngularModel make_angular(const ProblemSpec& spec, const AngularSpec& as) {
  AngularModel am = [&] {
    if (as.kind == "optimistic") return AngularModel::optimistic_for(spec);
    if (as.kind == "optimistic_ind") return AngularModel::optimistic_independent();
    if (as.kind == "optimistic_dep") return AngularModel::optimistic_dependent();
    if (as.kind == "weibull_gaussian") {
      const auto [beta, lambda] = light_weibull_params(spec);
      return AngularModel::light_weibull_gaussian(beta, lambda, spec.dim());
    }
    if (as.kind == "uniform") return AngularModel::exact_uniform();
    throw std::invalid_argument("unknown angular model: " + as.kind);
  }();
  am.check(spec);
  return am;
}

double reference_tail(const ExperimentConfig& c, double gamma, std::uint64_t seed) {
  c.validate();
  const ProblemSpec& spec = *c.spec;
  const Execution exec{c.workers, true};
  if (spec.dim() == 2) return brute_truth_2d(spec, gamma);
  if (uses_light_weibull(c)) {
    const auto [beta, lambda] = light_weibull_params(spec);
    return tilt_estimate(beta, lambda, spec.dim(), gamma, c.pilot_R, seed, exec).estimate;
  }
  return ak_estimate(spec, gamma, c.pilot_R, seed, exec).estimate;
}

double resolve_gamma(const ExperimentConfig& c, double target, std::uint64_t seed) {
  c.validate();
  const ProblemSpec& spec = *c.spec;
  if (spec.dim() == 2) return gamma_for_target_2d(spec, target);

  // Start from the asymptotic level; a pilot estimate with common random
  // numbers is smooth enough in gamma for a bracketing solver.
  double g0;
  if (uses_light_weibull(c)) {
    const auto [beta, lambda] = light_weibull_params(spec);
    const RadialModel rm = RadialModel::light_weibull(beta, lambda, spec.dim());
    const double lo = std::max(rm.validity_min(), spec.dim() * Marginal::weibull(beta, lambda).mean()) * 1.01;
    g0 = invert_log_tail([&](double s) { return rm.log_tail(s); }, [&](double s) { return rm.log_pdf(s); },
                         lo, std::min(std::log(target), rm.log_tail(lo) - 1e-9));
  } else {
    g0 = 0.0;
    for (const auto& m : spec.marginals()) g0 = std::max(g0, m.quantile_from_log_survival(std::log(target)));
  }
  const double floor_gamma = uses_light_weibull(c)
                                 ? spec.dim() * spec.marginal(0).mean() * (1.0 + 1e-9)
                                 : -std::numeric_limits<double>::infinity();
  const double log_target = std::log(target);
  auto f = [&](double log_g) {
    const double g = std::max(std::exp(log_g), floor_gamma);
    const double p = reference_tail(c, g, seed);
    return p > 0.0 ? std::log(p) - log_target : -std::numeric_limits<double>::infinity();
  };
  const double step = std::log(1.5);
  double lo = std::log(g0);
  double f_lo = f(lo);
  double hi = lo;
  double f_hi = f_lo;
  for (int i = 0; f_lo < 0.0; ++i) {
    if (i > 100) throw std::runtime_error("resolve_gamma: cannot bracket target");
    hi = lo;
    f_hi = f_lo;
    lo -= step;
    f_lo = f(lo);
  }
  for (int i = 0; f_hi > 0.0; ++i) {
    if (i > 100) throw std::runtime_error("resolve_gamma: cannot bracket target");
    lo = hi;
    f_lo = f_hi;
    hi += step;
    f_hi = f(hi);
  }
  if (f_hi == -std::numeric_limits<double>::infinity()) f_hi = -1e3;
  std::uintmax_t iters = 60;
  const auto r = boost::math::tools::toms748_solve(
      f, lo, hi, f_lo, f_hi, [](double x, double y) { return std::abs(x - y) <= 1e-7; }, iters);
  return std::max(std::exp(0.5 * (r.first + r.second)), floor_gamma);
}

std::vector<double> resolve_gammas(const ExperimentConfig& c) {
  c.validate();
  if (!c.gammas.empty()) return c.gammas;
  const std::uint64_t seed = derive_seed(c.seed, 0, kPilotTag);
  std::vector<double> out;
  for (double t : c.target_probs) out.push_back(resolve_gamma(c, t, seed));
  return out;
}

std::uint64_t cell_seed(std::uint64_t base, std::size_t cell) { return derive_seed(base, cell, kCellTag); }

namespace {

EstimatorResult run_cell(const ExperimentConfig& c, const EstimatorSpec& e, double gamma,
                         std::uint64_t seed, const Execution& exec) {
  const ProblemSpec& spec = *c.spec;
  switch (e.type) {
    case EstimatorSpec::Type::Polar:
      return polar_is_estimate(spec, make_radial(spec, e.radial), make_angular(spec, e.angular), gamma,
                               c.R, seed, exec);
    case EstimatorSpec::Type::Cmc:
      return cmc_estimate(spec, gamma, c.R, seed, exec);
    case EstimatorSpec::Type::Ak:
      return ak_estimate(spec, gamma, c.R, seed, exec);
    case EstimatorSpec::Type::Tilt: {
      const auto [beta, lambda] = light_weibull_params(spec);
      return tilt_estimate(beta, lambda, spec.dim(), gamma, c.R, seed, exec);
    }
  }
  throw std::logic_error("unhandled estimator type");
}

}  // namespace

std::vector<ResultRow> run(const ExperimentConfig& c, const RunOptions& opts) {
  c.validate();
  const std::vector<double> gammas = resolve_gammas(c);
  const std::size_t n_est = c.estimators.size();
  const std::size_t cells = gammas.size() * n_est * c.replications;
  std::vector<ResultRow> rows(cells);

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  const bool cell_parallel = cells >= static_cast<std::size_t>(threads) && threads > 1;
  const Execution exec{c.workers, !cell_parallel};

#pragma omp parallel for schedule(dynamic, 1) if (cell_parallel)
  for (std::size_t k = 0; k < cells; ++k) {
    const std::size_t g = k / (n_est * c.replications);
    const std::size_t e = (k / c.replications) % n_est;
    ResultRow& row = rows[k];
    row.name = c.name;
    row.estimator = c.estimators[e].name();
    row.gamma = gammas[g];
    row.seed = cell_seed(c.seed, k);
    row.R = c.R;
    const auto start = std::chrono::steady_clock::now();
    try {
      const EstimatorResult r = run_cell(c, c.estimators[e], gammas[g], row.seed, exec);
      row.estimate = r.estimate;
      row.rel_err = r.rel_err;
      row.asym_prefactor = r.asym_prefactor;
      row.correction = r.correction;
      row.R = r.R;
    } catch (const std::exception& ex) {
      row.estimate = row.rel_err = row.correction = std::numeric_limits<double>::quiet_NaN();
      row.status = std::string("error: ") + ex.what();
    }
    if (opts.timing)
      row.wall_time_seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  }
  return rows;
}

std::string csv_header() {
  return "name,estimator,gamma,estimate,rel_err,asym_prefactor,correction,R,seed,wall_time_seconds,status";
}

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows) {
  os << csv_header() << '\n';
  for (const auto& r : rows) {
    os << csv_field(r.name) << ',' << csv_field(r.estimator) << ',' << format_double(r.gamma) << ','
       << format_double(r.estimate) << ',' << format_double(r.rel_err) << ','
       << format_double(r.asym_prefactor) << ',' << format_double(r.correction) << ',' << r.R << ','
       << r.seed << ',' << format_double(r.wall_time_seconds) << ',' << csv_field(r.status) << '\n';
  }
}

std::vector<CheckResult> oracle_checks() {
  std::vector<CheckResult> out;
  auto record = [&](std::string name, double got, double want, double tol) {
    const double err = std::abs(got - want) / std::max(std::abs(want), 1e-300);
    std::ostringstream os;
    os << "got " << format_double(got) << " want " << format_double(want) << " rel " << err;
    out.push_back({std::move(name), err <= tol, os.str()});
  };
  const std::pair<ExpExample, const char*> kinds[] = {
      {ExpExample::Ind, "ind"}, {ExpExample::Clayton1, "clayton1"}, {ExpExample::AMHneg1, "amh-1"}};
  for (const auto& [kind, label] : kinds) {
    const ProblemSpec spec = exp_example_spec(kind);
    for (double s : {0.5, 1.0, 2.0, 5.0, 10.0, 20.0})
      record(std::string("sum_density/") + label + "/s=" + format_double(s), exp_sum_density(kind, s),
             sum_density_2d(spec, s), 1e-8);
    for (double s : {0.5, 2.0, 5.0, 20.0})
      for (double t : {0.1, 0.3, 0.5, 0.7, 0.9}) {
        const double th[2] = {t, 1.0 - t};
        record(std::string("angular_density/") + label + "/s=" + format_double(s) + "/theta=" + format_double(t),
               exp_angular_density(kind, s, t) * exp_sum_density(kind, s),
               std::exp(polar_joint_log_pdf(spec, s, th)), 1e-8);
      }
    record(std::string("sum_density_mass/") + label,
           quad::integrate_panels([&](double s) { return s > 0.0 ? exp_sum_density(kind, s) : 0.0; }, 0.0,
                                  std::numeric_limits<double>::infinity(), 1.0, 1e-13),
           1.0, 1e-8);
    for (double s : {0.5, 5.0, 40.0})
      record(std::string("angular_mass/") + label + "/s=" + format_double(s),
             quad::integrate([&](double t) { return exp_angular_density(kind, s, t); }, 0.0, 1.0, 1e-13), 1.0,
             1e-10);
  }
  record("brute_truth/ind/gamma=5", brute_truth_2d(exp_example_spec(ExpExample::Ind), 5.0), 6.0 * std::exp(-5.0),
         1e-8);
  return out;
}

}  // namespace polartail
