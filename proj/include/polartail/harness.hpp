#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "polartail/angular.hpp"
#include "polartail/estimator.hpp"
#include "polartail/problem.hpp"
#include "polartail/radial.hpp"

namespace polartail {

struct RadialSpec {
  // "subexp_dominant", "light_weibull" or "erlang".
  std::string kind = "subexp_dominant";
  std::vector<int> dominant;
};

struct AngularSpec {
  // "optimistic" (variant follows the copula), "optimistic_ind",
  // "optimistic_dep", "weibull_gaussian" or "uniform".
  std::string kind = "optimistic";
};

struct EstimatorSpec {
  enum class Type { Polar, Cmc, Ak, Tilt };
  Type type = Type::Polar;
  RadialSpec radial;
  AngularSpec angular;
  // CSV label; defaults to the type name.
  std::string label;

  std::string name() const;
};

struct ExperimentConfig {
  std::string name;
  std::optional<ProblemSpec> spec;
  std::vector<EstimatorSpec> estimators;
  std::vector<double> gammas;
  std::vector<double> target_probs;
  std::size_t R = 100000;
  std::uint64_t seed = 1;
  std::size_t replications = 1;
  // Replicates per pilot evaluation when resolving target_probs.
  std::size_t pilot_R = 1000000;
  int workers = kDefaultWorkers;

  // Throws std::invalid_argument describing the first violated constraint.
  void validate() const;
};

ExperimentConfig parse_config(const nlohmann::json& j);
ExperimentConfig load_config(const std::string& path);
nlohmann::json config_to_json(const ExperimentConfig& c);

// Builtin experiments 1..10 with nine log-spaced targets from 1e-3 to 1e-7.
ExperimentConfig builtin_test(int n);

RadialModel make_radial(const ProblemSpec& spec, const RadialSpec& rs);
AngularModel make_angular(const ProblemSpec& spec, const AngularSpec& as);

// Reference tail probability used to resolve targets: nested quadrature for
// d = 2, exponential tilting for iid light Weibull summands, AK otherwise.
double reference_tail(const ExperimentConfig& c, double gamma, std::uint64_t seed);
double resolve_gamma(const ExperimentConfig& c, double target, std::uint64_t seed);
std::vector<double> resolve_gammas(const ExperimentConfig& c);

struct ResultRow {
  std::string name;
  std::string estimator;
  double gamma = 0.0;
  double estimate = 0.0;
  double rel_err = 0.0;
  double asym_prefactor = 1.0;
  double correction = 0.0;
  std::size_t R = 0;
  std::uint64_t seed = 0;
  double wall_time_seconds = 0.0;
  std::string status = "ok";
};

struct RunOptions {
  // Record per-cell wall time; disable for byte-reproducible output.
  bool timing = true;
};

// Runs every (gamma, estimator, replication) cell. Cell seeds derive from
// (config.seed, cell index); per-cell errors land in the status column.
std::vector<ResultRow> run(const ExperimentConfig& c, const RunOptions& opts = {});

// Cell seed for the given cell index.
std::uint64_t cell_seed(std::uint64_t base, std::size_t cell);

void write_csv(std::ostream& os, const std::vector<ResultRow>& rows);
std::string csv_header();

struct CheckResult {
  std::string name;
  bool passed;
  std::string detail;
};

// Closed-form exponential examples against quadrature of the joint density.
std::vector<CheckResult> oracle_checks();

}  // namespace polartail
