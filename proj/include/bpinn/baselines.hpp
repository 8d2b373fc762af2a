#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "bpinn/config.hpp"
#include "bpinn/gompertz.hpp"
#include "bpinn/gp.hpp"
#include "bpinn/predictive.hpp"
#include "bpinn/series.hpp"
#include "bpinn/stats.hpp"

namespace bpinn {

/// Least-squares fit of the closed-form log trajectory by multi-start
/// Gauss-Newton with Levenberg damping. t0 is pinned to the first training
/// time. With exactly two observations y0 is pinned to the first observed
/// log-volume and only (alpha, beta) are free.
GompertzParams fit_pure_gompertz(const LongitudinalSeries& train,
                                 std::uint64_t seed = 0);

/// Kinetic-space HMC initialized at the pure-Gompertz fit; same sampler and
/// potential as the proposed method.
PosteriorSamples fit_gompertz_bayesian(const LongitudinalSeries& train,
                                       const HmcConfig& hmc, const EnergyConfig& cfg,
                                       std::uint64_t seed);

/// Uniform per-patient output of any method: log-space trajectory draws at
/// requested times (deterministic methods produce a single row) plus the
/// per-draw observation-noise scale used for prediction intervals.
struct MethodPrediction {
  TrajectoryMatrix log_draws;
  std::vector<double> sigma_obs;  // one entry per draw; empty = no intervals
  std::optional<double> acceptance_rate;
  bool has_uncertainty = false;
};

/// Runs `method` on the training slice and evaluates its draws at `times`.
/// patient_seed scopes every random stream the method uses.
MethodPrediction predict_method(Method method, const LongitudinalSeries& train,
                                std::span<const double> times, const RunConfig& cfg,
                                std::uint64_t patient_seed);

/// Trajectory draws with per-draw observation noise added (seeded); the draw
/// set behind every prediction interval for observed values.
TrajectoryMatrix observation_draws(const MethodPrediction& pred,
                                   std::uint64_t noise_seed);

/// Held-out evaluation of one prediction against the test slice. Prediction
/// intervals for observed values add the per-draw observation noise to the
/// trajectory draws (seeded); point predictions are posterior means.
EvalReport evaluate_prediction(const MethodPrediction& at_test,
                               const LongitudinalSeries& test, int n_train,
                               std::uint64_t noise_seed);

struct MethodColumn {
  Method method;
  int n_ok = 0;
  int n_failed = 0;
  double rmse_log = 0.0;
  double rmse_log_sd = 0.0;
  double mae_vol = 0.0;
  double mae_log = 0.0;
  std::optional<double> rel_ci_width;
  std::optional<double> interval_score;
  std::optional<double> coverage_dev;  // empirical 95% coverage minus 0.95
  std::optional<double> mean_acceptance;
  // Paired tests against the proposed method (absent on the proposed row):
  // squared log errors for the RMSE family, absolute volume errors for MAE.
  std::optional<PairedStats> rmse_test;
  std::optional<PairedStats> mae_test;
  int wins = 0;  // patients where this method beats proposed (volume error)
  int losses = 0;
  int ties = 0;
};

struct PatientPairedDiff {
  std::string patient_id;
  Method method;
  double diff_sq_log_err = 0.0;   // method - proposed
  double diff_abs_vol_err = 0.0;  // method - proposed
};

struct ComparisonReport {
  std::vector<MethodColumn> columns;
  std::vector<PatientPairedDiff> paired_diffs;
  std::vector<std::string> skipped_patients;
};

/// Runs every configured method on identical splits and seeds and assembles
/// the cohort comparison. Per-patient failures of one method are excluded
/// pairwise and counted.
ComparisonReport compare_methods(const std::vector<LongitudinalSeries>& cohort,
                                 const RunConfig& cfg);

}  // namespace bpinn
