// Benchmark: serial reference vs OpenMP cohort runner on a synthetic cohort.
// Verifies that both paths produce identical numbers before timing them.

#include <chrono>
#include <cstdio>
#include <string>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include <CLI11.hpp>

#include "bpinn/pipeline.hpp"
#include "bpinn/simulate.hpp"

using namespace bpinn;
using clock_type = std::chrono::steady_clock;

namespace {

double seconds_since(clock_type::time_point start) {
  return std::chrono::duration<double>(clock_type::now() - start).count();
}

bool identical(const std::vector<PatientResult>& a,
               const std::vector<PatientResult>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].skipped != b[i].skipped) return false;
    if (a[i].skipped) continue;
    if (a[i].map.final_energy != b[i].map.final_energy) return false;
    if (a[i].posterior.draws != b[i].posterior.draws) return false;
    if (a[i].predictive.log_band.mean != b[i].predictive.log_band.mean) return false;
  }
  return true;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"cohort runner benchmark: serial reference vs OpenMP"};
  int patients = 8;
  int epochs = 400;
  int hmc_samples = 200;
  std::uint64_t seed = 42;
  app.add_option("--patients", patients, "cohort size");
  app.add_option("--epochs", epochs, "optimizer epochs per patient");
  app.add_option("--hmc-samples", hmc_samples, "HMC iterations per patient");
  app.add_option("--seed", seed, "cohort seed");
  CLI11_PARSE(app, argc, argv);

  CohortSpec spec;
  const auto synthetic = simulate_cohort(patients, spec, seed);
  std::vector<LongitudinalSeries> cohort;
  cohort.reserve(synthetic.size());
  for (const auto& p : synthetic) cohort.push_back(p.series);

  RunConfig cfg;
  cfg.seed = seed;
  cfg.map.epochs = epochs;
  cfg.hmc.n_samples = hmc_samples;
  cfg.hmc.burn_in = hmc_samples / 4;

  const auto t_serial = clock_type::now();
  const auto serial = run_cohort_serial(cohort, cfg);
  const double serial_s = seconds_since(t_serial);

  const auto t_parallel = clock_type::now();
  const auto parallel = run_cohort_parallel(cohort, cfg);
  const double parallel_s = seconds_since(t_parallel);

  if (!identical(serial, parallel)) {
    std::printf("FAIL: serial and parallel runs disagree\n");
    return 1;
  }

  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("patients=%d epochs=%d hmc=%d threads=%d\n", patients, epochs,
              hmc_samples, threads);
  std::printf("serial   %8.3f s\n", serial_s);
  std::printf("parallel %8.3f s\n", parallel_s);
  std::printf("speedup  %8.2fx (results identical)\n", serial_s / parallel_s);
  return 0;
}
