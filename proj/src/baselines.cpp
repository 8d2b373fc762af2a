#include "bpinn/baselines.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bpinn/errors.hpp"
#include "bpinn/map.hpp"
#include "bpinn/rng.hpp"

namespace bpinn {

namespace {

// Gaussian elimination with partial pivoting; returns false when singular.
bool solve_linear(std::vector<double> a, std::vector<double> rhs, std::size_t n,
                  std::vector<double>& x) {
  for (std::size_t c = 0; c < n; ++c) {
    std::size_t pivot = c;
    for (std::size_t r = c + 1; r < n; ++r)
      if (std::abs(a[r * n + c]) > std::abs(a[pivot * n + c])) pivot = r;
    if (std::abs(a[pivot * n + c]) < 1e-300) return false;
    if (pivot != c) {
      for (std::size_t k = 0; k < n; ++k) std::swap(a[c * n + k], a[pivot * n + k]);
      std::swap(rhs[c], rhs[pivot]);
    }
    for (std::size_t r = c + 1; r < n; ++r) {
      const double f = a[r * n + c] / a[c * n + c];
      for (std::size_t k = c; k < n; ++k) a[r * n + k] -= f * a[c * n + k];
      rhs[r] -= f * rhs[c];
    }
  }
  x.assign(n, 0.0);
  for (std::size_t ri = n; ri-- > 0;) {
    double v = rhs[ri];
    for (std::size_t k = ri + 1; k < n; ++k) v -= a[ri * n + k] * x[k];
    x[ri] = v / a[ri * n + ri];
  }
  return true;
}

struct NlsProblem {
  std::vector<double> dt;  // times relative to t0
  std::vector<double> y;
  double y0_pinned = 0.0;
  bool free_y0 = false;

  // p = (log alpha, log beta [, y0])
  double sse(const std::vector<double>& p) const {
    const double kappa = std::exp(p[0] - p[1]);
    const double beta = std::exp(p[1]);
    const double y0 = free_y0 ? p[2] : y0_pinned;
    double acc = 0.0;
    for (std::size_t i = 0; i < dt.size(); ++i) {
      const double e = std::exp(-beta * dt[i]);
      const double r = kappa + (y0 - kappa) * e - y[i];
      acc += r * r;
    }
    return acc;
  }

  void residuals_jacobian(const std::vector<double>& p, std::vector<double>& r,
                          std::vector<double>& jac) const {
    const std::size_t n = dt.size();
    const std::size_t k = p.size();
    const double kappa = std::exp(p[0] - p[1]);
    const double beta = std::exp(p[1]);
    const double y0 = free_y0 ? p[2] : y0_pinned;
    r.resize(n);
    jac.resize(n * k);
    for (std::size_t i = 0; i < n; ++i) {
      const double e = std::exp(-beta * dt[i]);
      r[i] = kappa + (y0 - kappa) * e - y[i];
      jac[i * k + 0] = kappa * (1.0 - e);
      jac[i * k + 1] = -kappa * (1.0 - e) - beta * dt[i] * (y0 - kappa) * e;
      if (free_y0) jac[i * k + 2] = e;
    }
  }
};

// Gauss-Newton with Levenberg damping from one start; returns final SSE or
// infinity when the damping escalation hits its ceiling without progress.
double levenberg_fit(const NlsProblem& prob, std::vector<double>& p) {
  const std::size_t k = p.size();
  double lambda = 1e-3;
  double sse = prob.sse(p);
  std::vector<double> r, jac, jtj(k * k), jtr(k), delta;
  for (int iter = 0; iter < 200; ++iter) {
    prob.residuals_jacobian(p, r, jac);
    std::fill(jtj.begin(), jtj.end(), 0.0);
    std::fill(jtr.begin(), jtr.end(), 0.0);
    for (std::size_t i = 0; i < r.size(); ++i) {
      for (std::size_t a = 0; a < k; ++a) {
        jtr[a] += jac[i * k + a] * r[i];
        for (std::size_t b = 0; b < k; ++b)
          jtj[a * k + b] += jac[i * k + a] * jac[i * k + b];
      }
    }
    bool stepped = false;
    while (lambda <= 1e12) {
      std::vector<double> damped = jtj;
      for (std::size_t a = 0; a < k; ++a)
        damped[a * k + a] += lambda * (jtj[a * k + a] + 1e-12);
      std::vector<double> neg_jtr(k);
      for (std::size_t a = 0; a < k; ++a) neg_jtr[a] = -jtr[a];
      if (solve_linear(damped, neg_jtr, k, delta)) {
        std::vector<double> trial = p;
        for (std::size_t a = 0; a < k; ++a) trial[a] += delta[a];
        const double trial_sse = prob.sse(trial);
        if (std::isfinite(trial_sse) && trial_sse <= sse) {
          const double improvement = sse - trial_sse;
          p = std::move(trial);
          sse = trial_sse;
          lambda = std::max(lambda / 3.0, 1e-12);
          stepped = true;
          double step2 = 0.0;
          for (double dd : delta) step2 += dd * dd;
          if (step2 < 1e-24 || improvement < 1e-16 * (1.0 + sse)) return sse;
          break;
        }
      }
      lambda *= 10.0;
    }
    if (!stepped) return sse;  // damping ceiling: return what we have
  }
  return sse;
}

}  // namespace

GompertzParams fit_pure_gompertz(const LongitudinalSeries& train, std::uint64_t seed) {
  if (train.size() < 2)
    throw std::invalid_argument("fit_pure_gompertz: need at least 2 observations");
  NlsProblem prob;
  const double t0 = train.times.front();
  prob.dt.reserve(train.size());
  for (double t : train.times) prob.dt.push_back(t - t0);
  prob.y = train.log_volumes;
  prob.free_y0 = train.size() >= 3;
  prob.y0_pinned = train.log_volumes.front();

  const std::vector<double> start0 = prob.free_y0
                                         ? std::vector<double>{std::log(0.2),
                                                               std::log(0.05),
                                                               train.log_volumes.front()}
                                         : std::vector<double>{std::log(0.2),
                                                               std::log(0.05)};
  Rng rng(seed);
  std::vector<double> best;
  double best_sse = std::numeric_limits<double>::infinity();
  constexpr int restarts = 9;  // prior-median start + 8 perturbations
  for (int s = 0; s < restarts; ++s) {
    std::vector<double> p = start0;
    if (s > 0)
      for (double& v : p) v += rng.normal(0.0, 0.5);
    const double sse = levenberg_fit(prob, p);
    if (std::isfinite(sse) && sse < best_sse) {
      best_sse = sse;
      best = p;
    }
  }
  if (best.empty())
    throw FitFailureError("fit_pure_gompertz: no start produced a finite fit");
  const double alpha = std::exp(best[0]);
  const double beta = std::exp(best[1]);
  const double y0 = prob.free_y0 ? best[2] : prob.y0_pinned;
  return GompertzParams::make(alpha, beta, y0, t0);
}

PosteriorSamples fit_gompertz_bayesian(const LongitudinalSeries& train,
                                       const HmcConfig& hmc, const EnergyConfig& cfg,
                                       std::uint64_t seed) {
  const GompertzParams nls =
      fit_pure_gompertz(train, derive_seed(seed, 0, seed_stream::nls_restarts));
  std::vector<double> xi0{std::log(nls.alpha), std::log(nls.beta), nls.y0};
  if (cfg.infer_sigma_v) xi0.push_back(std::log(cfg.sigma_v));
  HmcConfig chain_cfg = hmc;
  chain_cfg.seed = derive_seed(seed, 0, seed_stream::hmc);
  return sample_posterior_from(train, xi0, chain_cfg, cfg);
}

namespace {

TrajectoryMatrix single_row(std::span<const double> values) {
  TrajectoryMatrix m;
  m.n_draws = 1;
  m.n_times = static_cast<int>(values.size());
  m.data.assign(values.begin(), values.end());
  return m;
}

TrajectoryMatrix closed_form_rows(const PosteriorSamples& samples, double t0,
                                  std::span<const double> times) {
  return predictive_log_trajectories(samples, t0, times);
}

MethodPrediction predict_proposed(const LongitudinalSeries& train,
                                  std::span<const double> times, const RunConfig& cfg,
                                  std::uint64_t patient_seed) {
  MapOptions opt = cfg.map;
  opt.seed = derive_seed(patient_seed, 0, seed_stream::map_init);
  const MapResult map = map_fit(train, cfg.energy, opt);
  HmcConfig h = cfg.hmc;
  h.seed = derive_seed(patient_seed, 0, seed_stream::hmc);
  const PosteriorSamples samples = sample_posterior(train, map, h, cfg.energy);
  MethodPrediction pred;
  pred.log_draws = closed_form_rows(samples, train.times.front(), times);
  pred.sigma_obs = samples.sigma_draws.empty()
                       ? std::vector<double>(samples.draws.size(), cfg.energy.sigma_v)
                       : samples.sigma_draws;
  pred.acceptance_rate = samples.acceptance_rate;
  pred.has_uncertainty = true;
  return pred;
}

MethodPrediction predict_pinn_bayesian(const LongitudinalSeries& train,
                                       std::span<const double> times,
                                       const RunConfig& cfg,
                                       std::uint64_t patient_seed) {
  MapOptions opt = cfg.map;
  opt.seed = derive_seed(patient_seed, 0, seed_stream::map_init);
  const MapResult map = map_fit(train, cfg.energy, opt);

  EnergyEvaluator eval(train, cfg.energy);
  SurrogateNetwork work = map.network;
  EnergyGradient egrad;
  const int n_net = work.param_count();
  const std::size_t dim = static_cast<std::size_t>(n_net) + 2;

  PotentialFn potential = [&](const std::vector<double>& q,
                              std::vector<double>& grad) {
    work.unflatten_from({q.data(), static_cast<std::size_t>(n_net)});
    const KineticReparam kin{q[dim - 2], q[dim - 1]};
    const double u = eval.energy_grad(work, kin, egrad);
    grad.resize(dim);
    flatten_gradient(egrad, grad);
    return u;
  };

  std::vector<double> q0(dim);
  map.network.flatten_into({q0.data(), static_cast<std::size_t>(n_net)});
  q0[dim - 2] = softplus_inv(map.alpha_hat);
  q0[dim - 1] = softplus_inv(map.beta_hat);

  HmcConfig h = cfg.hmc;
  h.seed = derive_seed(patient_seed, 0, seed_stream::hmc);
  const ChainResult chain = hmc_chain(potential, q0, h);

  MethodPrediction pred;
  const int kept = h.n_samples - h.burn_in;
  pred.log_draws.n_draws = kept;
  pred.log_draws.n_times = static_cast<int>(times.size());
  pred.log_draws.data.resize(static_cast<std::size_t>(kept) * times.size());
  for (int s = 0; s < kept; ++s) {
    const auto& q = chain.draws[static_cast<std::size_t>(h.burn_in + s)];
    work.unflatten_from({q.data(), static_cast<std::size_t>(n_net)});
    for (std::size_t t = 0; t < times.size(); ++t)
      pred.log_draws.at(s, static_cast<int>(t)) =
          forward(work, map.normalizer, times[t]);
  }
  pred.sigma_obs.assign(static_cast<std::size_t>(kept), cfg.energy.sigma_v);
  pred.acceptance_rate = chain.acceptance_rate;
  pred.has_uncertainty = true;
  return pred;
}

MethodPrediction predict_pure_pinn(const LongitudinalSeries& train,
                                   std::span<const double> times, const RunConfig& cfg,
                                   std::uint64_t patient_seed) {
  EnergyConfig flat = cfg.energy;
  flat.weight_prior = 0.0;  // no weight penalty, flat kinetic priors
  MapOptions opt = cfg.map;
  opt.seed = derive_seed(patient_seed, 0, seed_stream::map_init);
  const MapResult map = map_fit(train, flat, opt);
  std::vector<double> row(times.size());
  for (std::size_t t = 0; t < times.size(); ++t)
    row[t] = forward(map.network, map.normalizer, times[t]);
  MethodPrediction pred;
  pred.log_draws = single_row(row);
  pred.has_uncertainty = false;
  return pred;
}

MethodPrediction predict_gompertz_bayesian(const LongitudinalSeries& train,
                                           std::span<const double> times,
                                           const RunConfig& cfg,
                                           std::uint64_t patient_seed) {
  const PosteriorSamples samples =
      fit_gompertz_bayesian(train, cfg.hmc, cfg.energy, patient_seed);
  MethodPrediction pred;
  pred.log_draws = closed_form_rows(samples, train.times.front(), times);
  pred.sigma_obs = samples.sigma_draws.empty()
                       ? std::vector<double>(samples.draws.size(), cfg.energy.sigma_v)
                       : samples.sigma_draws;
  pred.acceptance_rate = samples.acceptance_rate;
  pred.has_uncertainty = true;
  return pred;
}

MethodPrediction predict_pure_gompertz(const LongitudinalSeries& train,
                                       std::span<const double> times,
                                       std::uint64_t patient_seed) {
  const GompertzParams fit =
      fit_pure_gompertz(train, derive_seed(patient_seed, 0, seed_stream::nls_restarts));
  std::vector<double> row(times.size());
  for (std::size_t t = 0; t < times.size(); ++t)
    row[t] = closed_form_log(fit, times[t]);
  MethodPrediction pred;
  pred.log_draws = single_row(row);
  pred.has_uncertainty = false;
  return pred;
}

MethodPrediction predict_pure_gp(const LongitudinalSeries& train,
                                 std::span<const double> times,
                                 std::uint64_t patient_seed) {
  const GpModel gp =
      fit_pure_gp(train, derive_seed(patient_seed, 0, seed_stream::gp_restarts));
  const GpPrediction p = gp_predict(gp, times);
  MethodPrediction pred;
  pred.log_draws = single_row(p.mean);
  pred.has_uncertainty = false;
  return pred;
}

MethodPrediction predict_bayesian_gp(const LongitudinalSeries& train,
                                     std::span<const double> times,
                                     const RunConfig& cfg,
                                     std::uint64_t patient_seed) {
  const BayesianGpFit fit = fit_bayesian_gp(train, cfg.hmc, patient_seed);
  Rng rng(derive_seed(patient_seed, 0, seed_stream::gp_function_draws));
  MethodPrediction pred;
  const int kept = static_cast<int>(fit.eta_draws.size());
  pred.log_draws.n_draws = kept;
  pred.log_draws.n_times = static_cast<int>(times.size());
  pred.log_draws.data.resize(static_cast<std::size_t>(kept) * times.size());
  pred.sigma_obs.resize(static_cast<std::size_t>(kept));
  GpModel work = fit.base;
  for (int s = 0; s < kept; ++s) {
    work.eta = fit.eta_draws[static_cast<std::size_t>(s)];
    const std::vector<double> f = gp_sample_function(work, times, rng);
    for (std::size_t t = 0; t < times.size(); ++t)
      pred.log_draws.at(s, static_cast<int>(t)) = f[t];
    pred.sigma_obs[static_cast<std::size_t>(s)] = work.noise_sd();
  }
  pred.acceptance_rate = fit.acceptance_rate;
  pred.has_uncertainty = true;
  return pred;
}

}  // namespace

MethodPrediction predict_method(Method method, const LongitudinalSeries& train,
                                std::span<const double> times, const RunConfig& cfg,
                                std::uint64_t patient_seed) {
  switch (method) {
    case Method::proposed:
      return predict_proposed(train, times, cfg, patient_seed);
    case Method::pinn_bayesian:
      return predict_pinn_bayesian(train, times, cfg, patient_seed);
    case Method::pure_pinn:
      return predict_pure_pinn(train, times, cfg, patient_seed);
    case Method::gompertz_bayesian:
      return predict_gompertz_bayesian(train, times, cfg, patient_seed);
    case Method::bayesian_gp:
      return predict_bayesian_gp(train, times, cfg, patient_seed);
    case Method::pure_gp:
      return predict_pure_gp(train, times, patient_seed);
    case Method::pure_gompertz:
      return predict_pure_gompertz(train, times, patient_seed);
  }
  throw std::invalid_argument("predict_method: unknown method");
}

TrajectoryMatrix observation_draws(const MethodPrediction& pred,
                                   std::uint64_t noise_seed) {
  TrajectoryMatrix noisy = pred.log_draws;
  if (pred.sigma_obs.empty()) return noisy;
  if (pred.sigma_obs.size() != static_cast<std::size_t>(noisy.n_draws))
    throw std::invalid_argument("observation_draws: sigma_obs size mismatch");
  Rng rng(noise_seed);
  for (int s = 0; s < noisy.n_draws; ++s) {
    const double sd = pred.sigma_obs[static_cast<std::size_t>(s)];
    for (int t = 0; t < noisy.n_times; ++t) noisy.at(s, t) += sd * rng.normal();
  }
  return noisy;
}

EvalReport evaluate_prediction(const MethodPrediction& at_test,
                               const LongitudinalSeries& test, int n_train,
                               std::uint64_t noise_seed) {
  const std::size_t n = test.size();
  if (at_test.log_draws.n_times != static_cast<int>(n))
    throw std::invalid_argument("evaluate_prediction: prediction/test size mismatch");

  EvalReport report;
  report.n_train = n_train;
  report.n_test = static_cast<int>(n);

  // Point predictions: posterior mean log-trajectory and mean volume.
  std::vector<double> mean_log(n, 0.0), mean_vol(n, 0.0);
  for (int s = 0; s < at_test.log_draws.n_draws; ++s)
    for (std::size_t t = 0; t < n; ++t) {
      const double y = at_test.log_draws.at(s, static_cast<int>(t));
      mean_log[t] += y;
      mean_vol[t] += std::exp(y);
    }
  for (std::size_t t = 0; t < n; ++t) {
    mean_log[t] /= at_test.log_draws.n_draws;
    mean_vol[t] /= at_test.log_draws.n_draws;
  }

  const ErrorMetrics m =
      error_metrics(mean_log, mean_vol, test.log_volumes, test.volumes);
  report.rmse_log = m.rmse_log;
  report.rmse_vol = m.rmse_vol;
  report.mae_vol = m.mae_vol;
  report.mae_log = m.mae_log;
  report.holdout_error_log.resize(n);
  report.holdout_error_vol.resize(n);
  for (std::size_t t = 0; t < n; ++t) {
    report.holdout_error_log[t] = mean_log[t] - test.log_volumes[t];
    report.holdout_error_vol[t] = mean_vol[t] - test.volumes[t];
  }
  report.acceptance_rate = at_test.acceptance_rate;

  if (at_test.has_uncertainty && at_test.log_draws.n_draws >= 2) {
    // Prediction intervals for observed values: trajectory draws plus
    // observation noise, scored in volume space.
    const TrajectoryMatrix noisy = observation_draws(at_test, noise_seed);
    const Band log_band = credible_band(noisy, 0.95);
    std::vector<double> lo_vol(n), hi_vol(n);
    double score = 0.0;
    for (std::size_t t = 0; t < n; ++t) {
      lo_vol[t] = std::exp(log_band.lo[t]);
      hi_vol[t] = std::exp(log_band.hi[t]);
      score += interval_score(lo_vol[t], hi_vol[t], test.volumes[t], 0.95);
    }
    report.coverage95 = coverage(test.log_volumes, log_band.lo, log_band.hi);
    report.interval_score = score / static_cast<double>(n);
    report.rel_ci_width = rel_ci_width(lo_vol, hi_vol, mean_vol);
  }
  return report;
}

namespace {

struct PatientEval {
  bool ok = false;
  EvalReport report;
  double sq_log_err = 0.0;
  double abs_vol_err = 0.0;
};

}  // namespace

ComparisonReport compare_methods(const std::vector<LongitudinalSeries>& cohort,
                                 const RunConfig& cfg) {
  cfg.validate();
  const std::size_t n_methods = cfg.methods.size();
  if (n_methods == 0)
    throw std::invalid_argument("compare_methods: no methods selected");

  ComparisonReport report;
  std::vector<std::vector<PatientEval>> evals(n_methods);
  for (auto& v : evals) v.resize(cohort.size());
  std::vector<int> usable(cohort.size(), 0);

#pragma omp parallel for schedule(dynamic)
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const LongitudinalSeries& series = cohort[i];
    if (series.size() < static_cast<std::size_t>(cfg.train_count) + 1) continue;
    usable[i] = 1;
    const LongitudinalSeries train =
        series.head(static_cast<std::size_t>(cfg.train_count));
    const LongitudinalSeries test =
        series.tail_from(static_cast<std::size_t>(cfg.train_count));
    const std::uint64_t patient_seed = derive_seed(cfg.seed, i);
    const std::uint64_t noise_seed =
        derive_seed(patient_seed, 0, seed_stream::predictive_noise);
    for (std::size_t m = 0; m < n_methods; ++m) {
      try {
        const MethodPrediction pred =
            predict_method(cfg.methods[m], train, test.times, cfg, patient_seed);
        PatientEval pe;
        pe.report = evaluate_prediction(pred, test, cfg.train_count, noise_seed);
        pe.sq_log_err = pe.report.rmse_log * pe.report.rmse_log;
        pe.abs_vol_err = pe.report.mae_vol;
        pe.ok = true;
        evals[m][i] = std::move(pe);
      } catch (const std::exception&) {
        evals[m][i].ok = false;
      }
    }
  }

  for (std::size_t i = 0; i < cohort.size(); ++i)
    if (!usable[i]) report.skipped_patients.push_back(cohort[i].patient_id);

  // Locate the proposed column for paired statistics.
  std::optional<std::size_t> proposed_idx;
  for (std::size_t m = 0; m < n_methods; ++m)
    if (cfg.methods[m] == Method::proposed && !proposed_idx) proposed_idx = m;

  for (std::size_t m = 0; m < n_methods; ++m) {
    MethodColumn col;
    col.method = cfg.methods[m];
    std::vector<double> rmse_logs, mae_vols, mae_logs, rel_widths, scores, accepts;
    double covered = 0.0;
    int covered_n = 0;
    for (std::size_t i = 0; i < cohort.size(); ++i) {
      if (!usable[i]) continue;
      const PatientEval& pe = evals[m][i];
      if (!pe.ok) {
        ++col.n_failed;
        continue;
      }
      ++col.n_ok;
      rmse_logs.push_back(pe.report.rmse_log);
      mae_vols.push_back(pe.report.mae_vol);
      mae_logs.push_back(pe.report.mae_log);
      if (pe.report.rel_ci_width) rel_widths.push_back(*pe.report.rel_ci_width);
      if (pe.report.interval_score) scores.push_back(*pe.report.interval_score);
      if (pe.report.acceptance_rate) accepts.push_back(*pe.report.acceptance_rate);
      if (pe.report.coverage95) {
        covered += *pe.report.coverage95 * pe.report.n_test;
        covered_n += pe.report.n_test;
      }
    }
    auto mean_of = [](const std::vector<double>& v) {
      return v.empty() ? 0.0
                       : std::accumulate(v.begin(), v.end(), 0.0) /
                             static_cast<double>(v.size());
    };
    col.rmse_log = mean_of(rmse_logs);
    col.mae_vol = mean_of(mae_vols);
    col.mae_log = mean_of(mae_logs);
    if (rmse_logs.size() >= 2) {
      double ss = 0.0;
      for (double v : rmse_logs) ss += (v - col.rmse_log) * (v - col.rmse_log);
      col.rmse_log_sd = std::sqrt(ss / static_cast<double>(rmse_logs.size() - 1));
    }
    if (!rel_widths.empty()) col.rel_ci_width = mean_of(rel_widths);
    if (!scores.empty()) col.interval_score = mean_of(scores);
    if (!accepts.empty()) col.mean_acceptance = mean_of(accepts);
    if (covered_n > 0) col.coverage_dev = covered / covered_n - 0.95;

    if (proposed_idx && *proposed_idx != m) {
      std::vector<double> a_sq, b_sq, a_abs, b_abs;
      for (std::size_t i = 0; i < cohort.size(); ++i) {
        if (!usable[i] || !evals[m][i].ok || !evals[*proposed_idx][i].ok) continue;
        a_sq.push_back(evals[m][i].sq_log_err);
        b_sq.push_back(evals[*proposed_idx][i].sq_log_err);
        a_abs.push_back(evals[m][i].abs_vol_err);
        b_abs.push_back(evals[*proposed_idx][i].abs_vol_err);
        if (evals[m][i].abs_vol_err < evals[*proposed_idx][i].abs_vol_err)
          ++col.wins;
        else if (evals[m][i].abs_vol_err > evals[*proposed_idx][i].abs_vol_err)
          ++col.losses;
        else
          ++col.ties;
        report.paired_diffs.push_back(PatientPairedDiff{
            cohort[i].patient_id, cfg.methods[m],
            evals[m][i].sq_log_err - evals[*proposed_idx][i].sq_log_err,
            evals[m][i].abs_vol_err - evals[*proposed_idx][i].abs_vol_err});
      }
      if (a_sq.size() >= 3) {
        col.rmse_test = paired_stats(a_sq, b_sq);
        col.mae_test = paired_stats(a_abs, b_abs);
      }
    }
    report.columns.push_back(std::move(col));
  }
  return report;
}

}  // namespace bpinn
