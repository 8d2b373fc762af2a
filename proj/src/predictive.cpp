#include "bpinn/predictive.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "bpinn/gompertz.hpp"

namespace bpinn {

double percentile(std::vector<double> values, double q) {
  if (values.empty()) throw std::invalid_argument("percentile: empty sample");
  if (!(q >= 0.0) || !(q <= 1.0))
    throw std::invalid_argument("percentile: q must be in [0, 1]");
  std::sort(values.begin(), values.end());
  const double rank = q * static_cast<double>(values.size() - 1);
  const std::size_t lo = static_cast<std::size_t>(std::floor(rank));
  const std::size_t hi = std::min(lo + 1, values.size() - 1);
  const double frac = rank - static_cast<double>(lo);
  return values[lo] + frac * (values[hi] - values[lo]);
}

TrajectoryMatrix predictive_log_trajectories(const PosteriorSamples& samples,
                                             double t0,
                                             std::span<const double> times) {
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("predictive_log_trajectories: grid must ascend");
  TrajectoryMatrix m;
  m.n_draws = static_cast<int>(samples.draws.size());
  m.n_times = static_cast<int>(times.size());
  m.data.resize(samples.draws.size() * times.size());
  for (std::size_t s = 0; s < samples.draws.size(); ++s) {
    const auto& d = samples.draws[s];
    const double kappa = d[0] / d[1];
    for (std::size_t t = 0; t < times.size(); ++t) {
      m.data[s * times.size() + t] =
          kappa + (d[2] - kappa) * std::exp(-d[1] * (times[t] - t0));
    }
  }
  return m;
}

TrajectoryMatrix to_volume(const TrajectoryMatrix& log_trajectories) {
  TrajectoryMatrix m = log_trajectories;
  for (double& v : m.data) v = std::exp(v);
  return m;
}

Band credible_band(const TrajectoryMatrix& trajectories, double level) {
  if (trajectories.n_draws < 1)
    throw std::invalid_argument("credible_band: no trajectories");
  if (!(level > 0.0) || !(level > 0.0 && level <= 1.0))
    throw std::invalid_argument("credible_band: level must be in (0, 1]");
  const double q_lo = (1.0 - level) / 2.0;
  const double q_hi = 1.0 - q_lo;
  Band band;
  band.lo.resize(static_cast<std::size_t>(trajectories.n_times));
  band.mean.resize(static_cast<std::size_t>(trajectories.n_times));
  band.hi.resize(static_cast<std::size_t>(trajectories.n_times));
  std::vector<double> column(static_cast<std::size_t>(trajectories.n_draws));
  for (int t = 0; t < trajectories.n_times; ++t) {
    double mean = 0.0;
    for (int s = 0; s < trajectories.n_draws; ++s) {
      column[static_cast<std::size_t>(s)] = trajectories.at(s, t);
      mean += trajectories.at(s, t);
    }
    mean /= static_cast<double>(trajectories.n_draws);
    band.mean[static_cast<std::size_t>(t)] = mean;
    band.lo[static_cast<std::size_t>(t)] = percentile(column, q_lo);
    band.hi[static_cast<std::size_t>(t)] = percentile(column, q_hi);
  }
  return band;
}

PredictiveSummary summarize_predictive(const PosteriorSamples& samples, double t0,
                                       std::span<const double> grid) {
  PredictiveSummary summary;
  summary.grid.assign(grid.begin(), grid.end());
  const TrajectoryMatrix log_traj = predictive_log_trajectories(samples, t0, grid);
  summary.log_band = credible_band(log_traj, 0.95);
  summary.vol_band = credible_band(to_volume(log_traj), 0.95);
  return summary;
}

double coverage(std::span<const double> observed, std::span<const double> lo,
                std::span<const double> hi) {
  if (observed.size() != lo.size() || observed.size() != hi.size())
    throw std::invalid_argument("coverage: length mismatch");
  if (observed.empty()) throw std::invalid_argument("coverage: no observations");
  std::size_t inside = 0;
  for (std::size_t i = 0; i < observed.size(); ++i)
    if (observed[i] >= lo[i] && observed[i] <= hi[i]) ++inside;
  return static_cast<double>(inside) / static_cast<double>(observed.size());
}

double interval_score(double lo, double hi, double x, double level) {
  if (hi < lo) throw std::invalid_argument("interval_score: hi < lo");
  if (!(level > 0.0) || !(level < 1.0))
    throw std::invalid_argument("interval_score: level must be in (0, 1)");
  const double alpha = 1.0 - level;
  double score = hi - lo;
  if (x < lo) score += (2.0 / alpha) * (lo - x);
  if (x > hi) score += (2.0 / alpha) * (x - hi);
  return score;
}

double rel_ci_width(std::span<const double> lo, std::span<const double> hi,
                    std::span<const double> mean) {
  if (lo.size() != hi.size() || lo.size() != mean.size() || lo.empty())
    throw std::invalid_argument("rel_ci_width: bad band");
  double acc = 0.0;
  for (std::size_t i = 0; i < lo.size(); ++i) {
    if (!(mean[i] > 0.0))
      throw std::invalid_argument("rel_ci_width: nonpositive reference mean");
    acc += (hi[i] - lo[i]) / mean[i];
  }
  return acc / static_cast<double>(lo.size());
}

ErrorMetrics error_metrics(std::span<const double> pred_log,
                           std::span<const double> pred_vol,
                           std::span<const double> obs_log,
                           std::span<const double> obs_vol) {
  const std::size_t n = pred_log.size();
  if (n == 0 || pred_vol.size() != n || obs_log.size() != n || obs_vol.size() != n)
    throw std::invalid_argument("error_metrics: length mismatch");
  ErrorMetrics m;
  for (std::size_t i = 0; i < n; ++i) {
    const double dl = pred_log[i] - obs_log[i];
    const double dv = pred_vol[i] - obs_vol[i];
    m.rmse_log += dl * dl;
    m.rmse_vol += dv * dv;
    m.mae_log += std::abs(dl);
    m.mae_vol += std::abs(dv);
  }
  m.rmse_log = std::sqrt(m.rmse_log / static_cast<double>(n));
  m.rmse_vol = std::sqrt(m.rmse_vol / static_cast<double>(n));
  m.mae_log /= static_cast<double>(n);
  m.mae_vol /= static_cast<double>(n);
  return m;
}

CalibrationCurve calibration_curve(std::span<const double> levels,
                                   const std::vector<CalibrationObservation>& obs) {
  if (levels.empty()) throw std::invalid_argument("calibration_curve: no levels");
  if (obs.empty())
    throw std::invalid_argument("calibration_curve: no held-out observations");
  CalibrationCurve curve;
  curve.nominal.assign(levels.begin(), levels.end());
  curve.empirical.assign(levels.size(), 0.0);
  for (const auto& o : obs) {
    if (o.intervals.size() != levels.size())
      throw std::invalid_argument("calibration_curve: interval count mismatch");
    for (std::size_t l = 0; l < levels.size(); ++l) {
      if (o.observed >= o.intervals[l].first && o.observed <= o.intervals[l].second)
        curve.empirical[l] += 1.0;
    }
  }
  double gap = 0.0;
  for (std::size_t l = 0; l < levels.size(); ++l) {
    curve.empirical[l] /= static_cast<double>(obs.size());
    gap += std::abs(curve.empirical[l] - curve.nominal[l]);
  }
  curve.mean_abs_gap = gap / static_cast<double>(levels.size());
  return curve;
}

std::vector<double> default_calibration_levels() {
  return {0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9, 0.95};
}

std::vector<double> uncertainty_profile(
    const PredictiveSummary& summary,
    const std::vector<std::pair<double, double>>& windows) {
  std::vector<double> out;
  out.reserve(windows.size());
  for (const auto& [start, end] : windows) {
    std::vector<double> lo, hi, mean;
    for (std::size_t i = 0; i < summary.grid.size(); ++i) {
      if (summary.grid[i] >= start && summary.grid[i] <= end) {
        lo.push_back(summary.vol_band.lo[i]);
        hi.push_back(summary.vol_band.hi[i]);
        mean.push_back(summary.vol_band.mean[i]);
      }
    }
    if (lo.empty())
      throw std::invalid_argument("uncertainty_profile: window outside grid");
    out.push_back(rel_ci_width(lo, hi, mean));
  }
  return out;
}

}  // namespace bpinn
