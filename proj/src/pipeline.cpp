#include "bpinn/pipeline.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "bpinn/rng.hpp"

namespace bpinn {

std::vector<double> prediction_grid(const LongitudinalSeries& series,
                                    const RunConfig& cfg) {
  const double t_first = series.times.front();
  const double t_last = series.times.back();
  const double span = std::max(t_last - t_first, 1.0);
  const double t_end = t_last + cfg.horizon_factor * span;
  return collocation_grid(t_first, std::max(t_end, t_first + 1.0), cfg.grid_points);
}

PatientResult run_patient(const LongitudinalSeries& series, const RunConfig& cfg,
                          std::size_t patient_index) {
  PatientResult result;
  result.patient_id = series.patient_id;
  if (series.size() < 2) {
    result.skipped = true;
    result.skip_reason = "fewer than 2 training observations";
    return result;
  }

  const std::size_t n_train =
      std::min<std::size_t>(static_cast<std::size_t>(cfg.train_count), series.size());
  const LongitudinalSeries train = series.head(n_train);
  const std::uint64_t patient_seed = derive_seed(cfg.seed, patient_index);

  MapOptions opt = cfg.map;
  opt.seed = derive_seed(patient_seed, 0, seed_stream::map_init);
  result.map = map_fit(train, cfg.energy, opt);

  HmcConfig hmc = cfg.hmc;
  hmc.seed = derive_seed(patient_seed, 0, seed_stream::hmc);
  result.posterior = sample_posterior(train, result.map, hmc, cfg.energy);
  result.diagnostics = chain_diagnostics(result.posterior);

  const std::vector<double> grid = prediction_grid(series, cfg);
  result.predictive =
      summarize_predictive(result.posterior, train.times.front(), grid);

  if (series.size() > n_train) {
    const LongitudinalSeries test = series.tail_from(n_train);
    result.holdout_times = test.times;

    MethodPrediction pred;
    pred.log_draws =
        predictive_log_trajectories(result.posterior, train.times.front(), test.times);
    pred.sigma_obs = result.posterior.sigma_draws.empty()
                         ? std::vector<double>(result.posterior.draws.size(),
                                               cfg.energy.sigma_v)
                         : result.posterior.sigma_draws;
    pred.acceptance_rate = result.posterior.acceptance_rate;
    pred.has_uncertainty = true;

    const std::uint64_t noise_seed =
        derive_seed(patient_seed, 0, seed_stream::predictive_noise);
    result.eval =
        evaluate_prediction(pred, test, static_cast<int>(n_train), noise_seed);

    // Per-level intervals for the calibration curve, from the same noisy
    // draw set as the 95% evaluation band.
    const std::vector<double> levels = default_calibration_levels();
    const TrajectoryMatrix noisy = observation_draws(pred, noise_seed);
    for (std::size_t t = 0; t < test.size(); ++t) {
      CalibrationObservation obs;
      obs.observed = test.log_volumes[t];
      std::vector<double> column(static_cast<std::size_t>(noisy.n_draws));
      for (int s = 0; s < noisy.n_draws; ++s)
        column[static_cast<std::size_t>(s)] = noisy.at(s, static_cast<int>(t));
      for (double level : levels) {
        const double q = (1.0 - level) / 2.0;
        obs.intervals.emplace_back(percentile(column, q), percentile(column, 1.0 - q));
      }
      result.calibration.push_back(std::move(obs));
    }
  } else {
    result.eval.n_train = static_cast<int>(n_train);
    result.eval.n_test = 0;
    result.eval.acceptance_rate = result.posterior.acceptance_rate;
  }
  return result;
}

std::vector<PatientResult> run_cohort_serial(
    const std::vector<LongitudinalSeries>& cohort, const RunConfig& cfg) {
  cfg.validate();
  std::vector<PatientResult> results(cohort.size());
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    try {
      results[i] = run_patient(cohort[i], cfg, i);
    } catch (const std::exception& e) {
      results[i].patient_id = cohort[i].patient_id;
      results[i].skipped = true;
      results[i].skip_reason = e.what();
    }
  }
  return results;
}

std::vector<PatientResult> run_cohort_parallel(
    const std::vector<LongitudinalSeries>& cohort, const RunConfig& cfg,
    int max_threads) {
  cfg.validate();
  std::vector<PatientResult> results(cohort.size());
#ifdef _OPENMP
  const int threads =
      max_threads > 0 ? std::min(max_threads, omp_get_max_threads())
                      : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic) num_threads(threads)
#endif
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    try {
      results[i] = run_patient(cohort[i], cfg, i);
    } catch (const std::exception& e) {
      results[i].patient_id = cohort[i].patient_id;
      results[i].skipped = true;
      results[i].skip_reason = e.what();
    }
  }
  return results;
}

namespace {

MetricSummary summarize(const std::string& name, const std::vector<double>& v) {
  MetricSummary s;
  s.name = name;
  s.n = static_cast<int>(v.size());
  if (v.empty()) return s;
  s.mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  if (v.size() >= 2) {
    double ss = 0.0;
    for (double x : v) ss += (x - s.mean) * (x - s.mean);
    s.sd = std::sqrt(ss / static_cast<double>(v.size() - 1));
  }
  return s;
}

}  // namespace

std::vector<MetricSummary> summarize_cohort(
    const std::vector<PatientResult>& results) {
  std::vector<double> rmse_log, rmse_vol, mae_vol, mae_log, rel_width, score,
      acceptance;
  double covered = 0.0;
  int covered_n = 0;
  for (const auto& r : results) {
    if (r.skipped || r.eval.n_test == 0) continue;
    rmse_log.push_back(r.eval.rmse_log);
    rmse_vol.push_back(r.eval.rmse_vol);
    mae_vol.push_back(r.eval.mae_vol);
    mae_log.push_back(r.eval.mae_log);
    if (r.eval.rel_ci_width) rel_width.push_back(*r.eval.rel_ci_width);
    if (r.eval.interval_score) score.push_back(*r.eval.interval_score);
    if (r.eval.acceptance_rate) acceptance.push_back(*r.eval.acceptance_rate);
    if (r.eval.coverage95) {
      covered += *r.eval.coverage95 * r.eval.n_test;
      covered_n += r.eval.n_test;
    }
  }
  std::vector<MetricSummary> out;
  out.push_back(summarize("rmse_log", rmse_log));
  out.push_back(summarize("rmse_vol", rmse_vol));
  out.push_back(summarize("mae_vol", mae_vol));
  out.push_back(summarize("mae_log", mae_log));
  out.push_back(summarize("rel_ci_width", rel_width));
  out.push_back(summarize("interval_score", score));
  out.push_back(summarize("acceptance_rate", acceptance));
  MetricSummary cov;
  cov.name = "coverage95_pooled";
  cov.n = covered_n;
  cov.mean = covered_n > 0 ? covered / covered_n : 0.0;
  out.push_back(cov);
  return out;
}

CalibrationCurve cohort_calibration(const std::vector<PatientResult>& results) {
  std::vector<CalibrationObservation> pooled;
  for (const auto& r : results)
    for (const auto& obs : r.calibration) pooled.push_back(obs);
  const std::vector<double> levels = default_calibration_levels();
  return calibration_curve(levels, pooled);
}

}  // namespace bpinn
