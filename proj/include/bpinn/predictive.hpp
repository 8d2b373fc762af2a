#pragma once

#include <optional>
#include <span>
#include <utility>
#include <vector>

#include "bpinn/hmc.hpp"
#include "bpinn/series.hpp"

namespace bpinn {

/// Sample percentile with linear interpolation between order statistics:
/// rank = q * (n - 1) on the sorted values, fractional ranks interpolated.
double percentile(std::vector<double> values, double q);

/// Row-major draws-by-times matrix of trajectory samples.
struct TrajectoryMatrix {
  int n_draws = 0;
  int n_times = 0;
  std::vector<double> data;

  double& at(int s, int t) { return data[static_cast<std::size_t>(s) * n_times + t]; }
  double at(int s, int t) const {
    return data[static_cast<std::size_t>(s) * n_times + t];
  }
  std::span<const double> row(int s) const {
    return {data.data() + static_cast<std::size_t>(s) * n_times,
            static_cast<std::size_t>(n_times)};
  }
};

/// Closed-form log trajectories, one per retained draw, on `times`.
TrajectoryMatrix predictive_log_trajectories(const PosteriorSamples& samples,
                                             double t0, std::span<const double> times);

/// Element-wise exp (volume space).
TrajectoryMatrix to_volume(const TrajectoryMatrix& log_trajectories);

struct Band {
  std::vector<double> lo;
  std::vector<double> mean;
  std::vector<double> hi;
};

/// Pointwise mean and central percentile band at the given level.
Band credible_band(const TrajectoryMatrix& trajectories, double level = 0.95);

/// Grid, trajectory band in log space and its exp in volume space.
struct PredictiveSummary {
  std::vector<double> grid;
  Band log_band;
  Band vol_band;
};

PredictiveSummary summarize_predictive(const PosteriorSamples& samples, double t0,
                                       std::span<const double> grid);

/// Fraction of observations inside [lo, hi]; boundary counts as inside.
double coverage(std::span<const double> observed, std::span<const double> lo,
                std::span<const double> hi);

/// Winkler score of a central interval at the given level.
double interval_score(double lo, double hi, double x, double level = 0.95);

/// Mean over points of (hi - lo) / mean; volume space. Throws if any mean
/// is nonpositive.
double rel_ci_width(std::span<const double> lo, std::span<const double> hi,
                    std::span<const double> mean);

struct ErrorMetrics {
  double rmse_log = 0.0;
  double rmse_vol = 0.0;
  double mae_vol = 0.0;
  double mae_log = 0.0;
};

ErrorMetrics error_metrics(std::span<const double> pred_log,
                           std::span<const double> pred_vol,
                           std::span<const double> obs_log,
                           std::span<const double> obs_vol);

/// Per held-out observation: the observed value and one interval per nominal
/// level (parallel to the `levels` argument of calibration_curve).
struct CalibrationObservation {
  double observed;
  std::vector<std::pair<double, double>> intervals;
};

struct CalibrationCurve {
  std::vector<double> nominal;
  std::vector<double> empirical;
  double mean_abs_gap = 0.0;
};

CalibrationCurve calibration_curve(std::span<const double> levels,
                                   const std::vector<CalibrationObservation>& obs);

/// Default nominal levels {0.1, 0.2, ..., 0.9, 0.95}.
std::vector<double> default_calibration_levels();

/// rel_ci_width restricted to each [start, end] window of the grid.
std::vector<double> uncertainty_profile(
    const PredictiveSummary& summary,
    const std::vector<std::pair<double, double>>& windows);

/// Held-out evaluation of one method on one patient.
struct EvalReport {
  double rmse_log = 0.0;
  double rmse_vol = 0.0;
  double mae_vol = 0.0;
  double mae_log = 0.0;
  std::optional<double> coverage95;
  std::optional<double> rel_ci_width;
  std::optional<double> interval_score;
  std::optional<double> acceptance_rate;
  std::vector<double> holdout_error_log;
  std::vector<double> holdout_error_vol;
  int n_train = 0;
  int n_test = 0;
};

}  // namespace bpinn
