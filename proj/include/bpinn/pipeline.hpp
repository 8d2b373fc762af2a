#pragma once

#include <string>
#include <vector>

#include "bpinn/baselines.hpp"
#include "bpinn/config.hpp"
#include "bpinn/predictive.hpp"

namespace bpinn {

/// Everything the proposed method produces for one patient.
struct PatientResult {
  std::string patient_id;
  bool skipped = false;
  std::string skip_reason;
  MapResult map;
  PosteriorSamples posterior;
  PredictiveSummary predictive;
  EvalReport eval;
  ChainDiagnostics diagnostics;
  std::vector<double> holdout_times;
  std::vector<CalibrationObservation> calibration;  // one per held-out point
};

/// Prediction grid for one series: grid_points uniform times from the first
/// observation to horizon_factor past the last.
std::vector<double> prediction_grid(const LongitudinalSeries& series,
                                    const RunConfig& cfg);

/// Proposed-method pipeline for one patient: split, MAP fit, kinetic HMC,
/// predictive summary, held-out evaluation. patient_index feeds the seed
/// derivation.
PatientResult run_patient(const LongitudinalSeries& series, const RunConfig& cfg,
                          std::size_t patient_index);

/// Serial reference over the cohort.
std::vector<PatientResult> run_cohort_serial(
    const std::vector<LongitudinalSeries>& cohort, const RunConfig& cfg);

/// OpenMP loop over patients; identical output to run_cohort_serial because
/// every patient's work is pure given its derived seed. max_threads <= 0
/// means the OpenMP default (BPINN_THREADS is applied by the CLI).
std::vector<PatientResult> run_cohort_parallel(
    const std::vector<LongitudinalSeries>& cohort, const RunConfig& cfg,
    int max_threads = 0);

struct MetricSummary {
  std::string name;
  double mean = 0.0;
  double sd = 0.0;
  int n = 0;
};

/// Cohort-level mean +/- sd of every held-out metric plus pooled coverage.
std::vector<MetricSummary> summarize_cohort(const std::vector<PatientResult>& results);

/// Pooled calibration curve across all patients' held-out observations.
CalibrationCurve cohort_calibration(const std::vector<PatientResult>& results);

}  // namespace bpinn
