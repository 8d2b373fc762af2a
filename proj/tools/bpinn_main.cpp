// Command-line front end: synthetic cohort generation, per-patient posterior
// fitting, trajectory prediction, held-out evaluation and method comparison.

#include <cstdlib>
#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bpinn/io.hpp"
#include "bpinn/pipeline.hpp"
#include "bpinn/rng.hpp"
#include "bpinn/simulate.hpp"

namespace fs = std::filesystem;
using namespace bpinn;

namespace {

void apply_thread_cap() {
#ifdef _OPENMP
  if (const char* env = std::getenv("BPINN_THREADS")) {
    const int cap = std::atoi(env);
    if (cap > 0) omp_set_num_threads(std::min(cap, omp_get_max_threads()));
  }
#endif
}

struct CommonOpts {
  std::string config_path;
  std::string input_path;
  std::string output_dir;
  // optional overrides; count()-based detection via CLI11 options
  std::uint64_t seed = 42;
  int patients = 30;
  std::string methods;
  int grid_points = 200;
  int hmc_samples = 400;
  int hmc_burnin = 100;
  double hmc_step = 0.01;
  int leapfrog = 20;
  int epochs = 5000;
  double lr = 1e-3;
};

void add_override_flags(CLI::App* cmd, CommonOpts& o) {
  cmd->add_option("--config", o.config_path, "JSON run configuration");
  cmd->add_option("--seed", o.seed, "run seed");
  cmd->add_option("--grid-points", o.grid_points, "prediction grid size");
  cmd->add_option("--hmc-samples", o.hmc_samples, "HMC iterations");
  cmd->add_option("--hmc-burnin", o.hmc_burnin, "discarded HMC iterations");
  cmd->add_option("--hmc-step", o.hmc_step, "leapfrog step size");
  cmd->add_option("--leapfrog", o.leapfrog, "leapfrog steps per iteration");
  cmd->add_option("--epochs", o.epochs, "optimizer epochs");
  cmd->add_option("--lr", o.lr, "optimizer learning rate");
  cmd->add_option("--methods", o.methods, "comma-separated method list");
}

RunConfig build_config(const CLI::App* cmd, const CommonOpts& o) {
  RunConfig cfg;
  if (!o.config_path.empty()) cfg = load_run_config(o.config_path);
  if (cmd->count("--seed")) cfg.seed = o.seed;
  if (cmd->count("--grid-points")) cfg.grid_points = o.grid_points;
  if (cmd->count("--hmc-samples")) cfg.hmc.n_samples = o.hmc_samples;
  if (cmd->count("--hmc-burnin")) cfg.hmc.burn_in = o.hmc_burnin;
  if (cmd->count("--hmc-step")) cfg.hmc.step_size = o.hmc_step;
  if (cmd->count("--leapfrog")) cfg.hmc.leapfrog_steps = o.leapfrog;
  if (cmd->count("--epochs")) cfg.map.epochs = o.epochs;
  if (cmd->count("--lr")) cfg.map.learning_rate = o.lr;
  if (cmd->count("--methods")) {
    cfg.methods.clear();
    std::string token;
    std::stringstream ss(o.methods);
    while (std::getline(ss, token, ',')) {
      if (!token.empty()) cfg.methods.push_back(parse_method(token));
    }
  }
  cfg.validate();
  return cfg;
}

fs::path ensure_output_dir(const std::string& dir) {
  if (dir.empty()) throw std::invalid_argument("--output directory is required");
  fs::create_directories(dir);
  return {dir};
}

std::vector<LongitudinalSeries> load_input(const std::string& path) {
  if (path.empty()) throw std::invalid_argument("--input cohort CSV is required");
  auto cohort = load_cohort(path);
  if (cohort.empty())
    std::cerr << "warning: cohort file " << path << " contains no patients\n";
  return cohort;
}

void warn_skipped(const std::vector<PatientResult>& results) {
  int skipped = 0;
  for (const auto& r : results) {
    if (r.skipped) {
      ++skipped;
      std::cerr << "warning: patient " << r.patient_id << " skipped ("
                << r.skip_reason << ")\n";
    }
  }
  if (skipped > 0)
    std::cerr << "warning: " << skipped << " patient(s) skipped\n";
}

int run_simulate(const CLI::App* cmd, const CommonOpts& o, double noise_sd,
                 double jitter) {
  const RunConfig cfg = build_config(cmd, o);
  CohortSpec spec;
  spec.noise.sigma_v = noise_sd;
  spec.visit_jitter_days = jitter;
  spec.prior_alpha = cfg.energy.prior_alpha;
  spec.prior_beta = cfg.energy.prior_beta;
  const auto cohort = simulate_cohort(o.patients, spec, cfg.seed);
  const fs::path out = ensure_output_dir(o.output_dir);
  std::vector<LongitudinalSeries> series;
  series.reserve(cohort.size());
  for (const auto& p : cohort) series.push_back(p.series);
  write_cohort_csv((out / "cohort.csv").string(), series);
  write_truth_csv((out / "truth.csv").string(), cohort);
  std::cout << "wrote " << cohort.size() << " patients to " << out.string()
            << "\n";
  return 0;
}

int run_fit(const CLI::App* cmd, const CommonOpts& o) {
  const RunConfig cfg = build_config(cmd, o);
  const auto cohort = load_input(o.input_path);
  const auto results = run_cohort_parallel(cohort, cfg);
  warn_skipped(results);
  const fs::path out = ensure_output_dir(o.output_dir);
  write_map_summary_csv((out / "map_summary.csv").string(), results);
  write_posterior_txt((out / "posterior.txt").string(), results);
  std::cout << "fit " << results.size() << " patients\n";
  return 0;
}

int run_predict(const CLI::App* cmd, const CommonOpts& o) {
  const RunConfig cfg = build_config(cmd, o);
  const auto cohort = load_input(o.input_path);
  const auto results = run_cohort_parallel(cohort, cfg);
  warn_skipped(results);
  const fs::path out = ensure_output_dir(o.output_dir);
  for (const auto& r : results) {
    if (r.skipped) continue;
    write_trajectory_csv((out / ("traj_" + r.patient_id + ".csv")).string(), r);
  }
  std::cout << "predicted " << results.size() << " patients\n";
  return 0;
}

int run_evaluate(const CLI::App* cmd, const CommonOpts& o) {
  const RunConfig cfg = build_config(cmd, o);
  const auto cohort = load_input(o.input_path);
  const auto results = run_cohort_parallel(cohort, cfg);
  warn_skipped(results);
  const fs::path out = ensure_output_dir(o.output_dir);
  write_map_summary_csv((out / "map_summary.csv").string(), results);
  write_posterior_txt((out / "posterior.txt").string(), results);
  write_metrics_csv((out / "metrics.csv").string(), results);
  write_summary_csv((out / "summary.csv").string(), results);
  write_uncertainty_profile_csv((out / "uncertainty_profile.csv").string(), results);
  bool any_holdout = false;
  for (const auto& r : results) any_holdout = any_holdout || !r.calibration.empty();
  if (any_holdout)
    write_calibration_csv((out / "calibration.csv").string(),
                          cohort_calibration(results));
  std::cout << "evaluated " << results.size() << " patients\n";
  return 0;
}

int run_compare(const CLI::App* cmd, const CommonOpts& o) {
  const RunConfig cfg = build_config(cmd, o);
  const auto cohort = load_input(o.input_path);
  const auto report = compare_methods(cohort, cfg);
  for (const auto& id : report.skipped_patients)
    std::cerr << "warning: patient " << id << " skipped (no held-out point)\n";
  const fs::path out = ensure_output_dir(o.output_dir);
  write_comparison_csv((out / "comparison.csv").string(), report);
  write_paired_diffs_csv((out / "paired_differences.csv").string(), report);
  std::cout << "compared " << cfg.methods.size() << " methods on "
            << cohort.size() - report.skipped_patients.size() << " patients\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  apply_thread_cap();
  CLI::App app{"Bayesian Gompertz tumor-growth inference"};
  app.require_subcommand(1);

  CommonOpts o;
  double noise_sd = 0.2;
  double jitter = 60.0;

  auto* sim = app.add_subcommand("simulate", "generate a synthetic cohort CSV");
  sim->add_option("--patients", o.patients, "number of patients");
  sim->add_option("--noise", noise_sd, "log-space observation noise sd");
  sim->add_option("--jitter", jitter, "visit jitter in days");
  sim->add_option("--output", o.output_dir, "output directory")->required();
  add_override_flags(sim, o);

  auto* fit = app.add_subcommand("fit", "MAP + HMC posterior per patient");
  auto* predict = app.add_subcommand("predict", "posterior predictive trajectories");
  auto* evaluate = app.add_subcommand("evaluate", "held-out metrics and calibration");
  auto* compare = app.add_subcommand("compare", "run several methods side by side");
  for (CLI::App* cmd : {fit, predict, evaluate, compare}) {
    cmd->add_option("--input", o.input_path, "cohort CSV")->required();
    cmd->add_option("--output", o.output_dir, "output directory")->required();
    add_override_flags(cmd, o);
  }

  CLI11_PARSE(app, argc, argv);
  try {
    if (sim->parsed()) return run_simulate(sim, o, noise_sd, jitter);
    if (fit->parsed()) return run_fit(fit, o);
    if (predict->parsed()) return run_predict(predict, o);
    if (evaluate->parsed()) return run_evaluate(evaluate, o);
    if (compare->parsed()) return run_compare(compare, o);
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }
  return 0;
}
