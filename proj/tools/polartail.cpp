// Command-line front end: run configs, builtin experiments, the Figure 1
// asymptotic-ratio curve and the closed-form oracle checks.
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "polartail/harness.hpp"
#include "polartail/oracle.hpp"
#include "polartail/replicate.hpp"

namespace {

int emit(const std::vector<polartail::ResultRow>& rows, const std::string& out_path) {
  if (out_path.empty()) {
    polartail::write_csv(std::cout, rows);
  } else {
    std::ofstream out(out_path);
    if (!out) {
      std::cerr << "cannot write " << out_path << '\n';
      return 2;
    }
    polartail::write_csv(out, rows);
  }
  int failed = 0;
  for (const auto& r : rows)
    if (r.status != "ok") {
      std::cerr << r.name << " " << r.estimator << " gamma=" << r.gamma << ": " << r.status << '\n';
      ++failed;
    }
  return failed ? 1 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tail probabilities of sums by polar importance sampling"};
  app.require_subcommand(1);

  int threads = 0;
  bool no_timing = false;
  std::string out_path;
  app.add_option("--threads", threads, "OpenMP threads (overrides POLARTAIL_THREADS)");

  auto* run_cmd = app.add_subcommand("run", "Run an experiment config (JSON)");
  std::string config_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
  run_cmd->add_option("--config", config_path, "Config file")->required()->check(CLI::ExistingFile);
  run_cmd->add_option("--out", out_path, "CSV output file (default stdout)");
  auto* seed_opt = run_cmd->add_option("--seed", seed, "Override the config seed");
  run_cmd->add_option("--threads", threads, "OpenMP threads");
  run_cmd->add_flag("--no-timing", no_timing, "Write zero wall times for byte-reproducible output");

  auto* test_cmd = app.add_subcommand("test", "Run a builtin experiment");
  int test_n = 1;
  std::size_t R = 0;
  std::size_t pilot_R = 0;
  test_cmd->add_option("--n", test_n, "Experiment number 1-10")->required()->check(CLI::Range(1, 10));
  test_cmd->add_option("--R", R, "Replicates per cell");
  test_cmd->add_option("--pilot-R", pilot_R, "Replicates per pilot evaluation");
  test_cmd->add_option("--out", out_path, "CSV output file (default stdout)");
  auto* test_seed_opt = test_cmd->add_option("--seed", seed, "Override the seed");
  test_cmd->add_option("--threads", threads, "OpenMP threads");
  test_cmd->add_flag("--no-timing", no_timing, "Write zero wall times");
  bool dump = false;
  test_cmd->add_flag("--dump-config", dump, "Print the experiment config as JSON and exit");

  auto* fig1_cmd = app.add_subcommand("fig1", "Asymptotic-to-exact ratio for two lognormals");
  int points = 21;
  fig1_cmd->add_option("--points", points, "Number of gamma values")->check(CLI::Range(2, 10000));
  fig1_cmd->add_option("--out", out_path, "CSV output file (default stdout)");

  auto* oracle_cmd = app.add_subcommand("oracle-check", "Verify closed-form examples by quadrature");

  CLI11_PARSE(app, argc, argv);
  polartail::configure_threads(threads);

  try {
    if (*run_cmd) {
      auto cfg = polartail::load_config(config_path);
      seed_set = seed_opt->count() > 0;
      if (seed_set) cfg.seed = seed;
      return emit(polartail::run(cfg, {!no_timing}), out_path);
    }
    if (*test_cmd) {
      auto cfg = polartail::builtin_test(test_n);
      if (R) cfg.R = R;
      if (pilot_R) cfg.pilot_R = pilot_R;
      if (test_seed_opt->count()) cfg.seed = seed;
      if (dump) {
        std::cout << polartail::config_to_json(cfg).dump(2) << '\n';
        return 0;
      }
      return emit(polartail::run(cfg, {!no_timing}), out_path);
    }
    if (*fig1_cmd) {
      std::ofstream file;
      if (!out_path.empty()) file.open(out_path);
      std::ostream& os = out_path.empty() ? std::cout : file;
      os << "gamma,truth,neg_log10_truth,ratio_one_term,ratio_two_terms\n";
      os.precision(17);
      for (const auto& p : polartail::fig1_curve(points))
        os << p.gamma << ',' << p.truth << ',' << -std::log10(p.truth) << ',' << p.ratio_one << ','
           << p.ratio_two << '\n';
      return 0;
    }
    if (*oracle_cmd) {
      int failed = 0;
      for (const auto& c : polartail::oracle_checks()) {
        std::cout << (c.passed ? "PASS " : "FAIL ") << c.name << "  " << c.detail << '\n';
        failed += !c.passed;
      }
      return failed ? 1 : 0;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
