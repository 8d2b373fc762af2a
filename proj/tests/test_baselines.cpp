#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bpinn/baselines.hpp"
#include "bpinn/simulate.hpp"
#include "test_util.hpp"

using namespace bpinn;

namespace {

RunConfig fast_config() {
  RunConfig cfg;
  cfg.map.epochs = 250;
  cfg.map.layer_sizes = {1, 8, 8, 1};
  cfg.energy.n_collocation = 24;
  cfg.hmc.n_samples = 120;
  cfg.hmc.burn_in = 20;
  return cfg;
}

}  // namespace

TEST_CASE("pure Gompertz recovers noiseless kinetics") {
  const auto truth = GompertzParams::make(0.2, 0.05, 5.8, 0.0);
  const auto series = simulate_series(truth, ObservationNoise{0.0},
                                      {0.0, 120.0, 365.0, 730.0}, 1);
  const auto fit = fit_pure_gompertz(series, 3);
  CHECK(std::abs(fit.alpha - truth.alpha) / truth.alpha < 1e-6);
  CHECK(std::abs(fit.beta - truth.beta) / truth.beta < 1e-6);
  CHECK(std::abs(fit.y0 - truth.y0) < 1e-6);
}

TEST_CASE("two-point fit reproduces both observations exactly") {
  const auto series = LongitudinalSeries::from_volumes(
      "p", {0.0, 365.0}, {std::exp(5.1), std::exp(5.9)});
  const auto fit = fit_pure_gompertz(series, 9);
  CHECK(std::abs(closed_form_log(fit, 0.0) - 5.1) < 1e-8);
  CHECK(std::abs(closed_form_log(fit, 365.0) - 5.9) < 1e-8);
  CHECK(fit.y0 == doctest::Approx(5.1));  // pinned to the first observation
}

TEST_CASE("constant observations settle on the equilibrium manifold") {
  const auto series = LongitudinalSeries::from_volumes(
      "flat", {0.0, 300.0, 600.0}, {std::exp(4.6), std::exp(4.6), std::exp(4.6)});
  const auto fit = fit_pure_gompertz(series, 4);
  double sse = 0.0;
  for (double t : series.times) {
    const double r = closed_form_log(fit, t) - 4.6;
    sse += r * r;
  }
  CHECK(sse < 1e-8);
}

TEST_CASE("gompertz bayesian shares the proposed sampler path") {
  CohortSpec spec;
  const auto cohort = simulate_cohort(1, spec, 41);
  const auto train = cohort[0].series.head(2);
  RunConfig cfg = fast_config();
  const auto samples = fit_gompertz_bayesian(train, cfg.hmc, cfg.energy, 77);
  const auto again = fit_gompertz_bayesian(train, cfg.hmc, cfg.energy, 77);
  CHECK(samples.draws == again.draws);

  // identical initialization and seed drive the same chain as the shared core
  const auto nls = fit_pure_gompertz(train, derive_seed(77, 0, seed_stream::nls_restarts));
  HmcConfig chain_cfg = cfg.hmc;
  chain_cfg.seed = derive_seed(77, 0, seed_stream::hmc);
  const auto direct = sample_posterior_from(
      train, {std::log(nls.alpha), std::log(nls.beta), nls.y0}, chain_cfg,
      cfg.energy);
  CHECK(samples.draws == direct.draws);
  CHECK(samples.acceptance_rate == direct.acceptance_rate);
}

TEST_CASE("pure PINN equals the MAP stage when priors are re-enabled") {
  CohortSpec spec;
  const auto cohort = simulate_cohort(1, spec, 13);
  const auto train = cohort[0].series.head(2);
  RunConfig cfg = fast_config();

  // pure PINN is map_fit under weight_prior = 0; with the weight restored the
  // two configurations produce bit-identical results
  EnergyConfig no_prior = cfg.energy;
  no_prior.weight_prior = 0.0;
  MapOptions opt = cfg.map;
  opt.seed = derive_seed(55, 0, seed_stream::map_init);
  const auto a = map_fit(train, no_prior, opt);
  const auto b = map_fit(train, no_prior, opt);
  CHECK(a.final_energy == b.final_energy);
  for (std::size_t l = 0; l < a.network.layers.size(); ++l) {
    CHECK(a.network.layers[l].w == b.network.layers[l].w);
    CHECK(a.network.layers[l].b == b.network.layers[l].b);
  }

  const std::vector<double> times{train.times.back() + 365.0};
  const auto pred = predict_method(Method::pure_pinn, train, times, cfg, 55);
  CHECK(pred.log_draws.n_draws == 1);
  CHECK_FALSE(pred.has_uncertainty);
  CHECK(pred.log_draws.at(0, 0) ==
        doctest::Approx(forward(a.network, a.normalizer, times[0])));
}

TEST_CASE("pure PINN interpolates noiseless training data") {
  const auto truth = GompertzParams::make(0.2, 0.05, 5.5, 0.0);
  const auto series =
      simulate_series(truth, ObservationNoise{0.0}, {0.0, 365.0}, 2);
  RunConfig cfg;
  cfg.map.epochs = 5000;
  cfg.energy.weight_prior = 0.0;
  const auto fit = map_fit(series, cfg.energy, cfg.map);
  for (std::size_t i = 0; i < series.size(); ++i)
    CHECK(std::abs(forward(fit.network, fit.normalizer, series.times[i]) -
                   series.log_volumes[i]) < 0.05);
}

TEST_CASE("full-vector potential gradient matches finite differences") {
  CohortSpec spec;
  const auto cohort = simulate_cohort(1, spec, 23);
  const auto train = cohort[0].series.head(2);
  EnergyConfig cfg;
  cfg.n_collocation = 8;
  EnergyEvaluator eval(train, cfg);
  auto net = test::random_network({1, 4, 1}, 3, 0.6);
  KineticReparam kin{-1.0, -2.5};
  EnergyGradient grad;
  eval.energy_grad(net, kin, grad);
  const int n = net.param_count();
  std::vector<double> flat(static_cast<std::size_t>(n) + 2);
  flatten_gradient(grad, flat);

  std::vector<double> q(static_cast<std::size_t>(n) + 2);
  net.flatten_into({q.data(), static_cast<std::size_t>(n)});
  q[static_cast<std::size_t>(n)] = kin.raw_alpha;
  q[static_cast<std::size_t>(n) + 1] = kin.raw_beta;
  const double h = 1e-6;
  for (std::size_t k = 0; k < q.size(); ++k) {
    auto eval_at = [&](double delta) {
      std::vector<double> qq = q;
      qq[k] += delta;
      SurrogateNetwork work = net;
      work.unflatten_from({qq.data(), static_cast<std::size_t>(n)});
      const KineticReparam kk{qq[static_cast<std::size_t>(n)],
                              qq[static_cast<std::size_t>(n) + 1]};
      return eval.energy(work, kk).total();
    };
    const double fd = (eval_at(h) - eval_at(-h)) / (2.0 * h);
    CHECK(test::rel_err(flat[k], fd) < 1e-4);
  }
}

TEST_CASE("evaluate_prediction produces the full report") {
  CohortSpec spec;
  spec.noise.sigma_v = 0.2;
  const auto cohort = simulate_cohort(1, spec, 31);
  const auto& series = cohort[0].series;
  const auto train = series.head(2);
  const auto test = series.tail_from(2);
  RunConfig cfg = fast_config();
  const auto pred =
      predict_method(Method::gompertz_bayesian, train, test.times, cfg, 11);
  const auto report = evaluate_prediction(pred, test, 2, 99);
  CHECK(report.n_train == 2);
  CHECK(report.n_test == 1);
  CHECK(report.rmse_log >= 0.0);
  REQUIRE(report.coverage95.has_value());
  CHECK((*report.coverage95 == 0.0 || *report.coverage95 == 1.0));
  REQUIRE(report.rel_ci_width.has_value());
  CHECK(*report.rel_ci_width > 0.0);
  REQUIRE(report.interval_score.has_value());
  CHECK(*report.interval_score > 0.0);
  CHECK(report.holdout_error_log.size() == 1);

  // deterministic methods carry no uncertainty fields
  const auto det = predict_method(Method::pure_gompertz, train, test.times, cfg, 11);
  const auto det_report = evaluate_prediction(det, test, 2, 99);
  CHECK_FALSE(det_report.coverage95.has_value());
  CHECK_FALSE(det_report.rel_ci_width.has_value());
  CHECK_FALSE(det_report.interval_score.has_value());
}

TEST_CASE("parametric bias beats the GP on closed-form data") {
  // noiseless trajectories, three training points, held-out final visit
  RunConfig cfg = fast_config();
  cfg.train_count = 3;
  Rng rng(6);
  double gomp_err = 0.0, gp_err = 0.0;
  for (int i = 0; i < 3; ++i) {
    const auto truth = GompertzParams::make(0.25, 0.05, 5.0 + 0.4 * i, 0.0);
    const auto series = simulate_series(truth, ObservationNoise{0.0},
                                        {0.0, 200.0, 420.0, 730.0},
                                        static_cast<std::uint64_t>(i) + 1);
    const auto train = series.head(3);
    const auto test = series.tail_from(3);
    const auto gomp =
        predict_method(Method::pure_gompertz, train, test.times, cfg, 21 + i);
    const auto gp = predict_method(Method::pure_gp, train, test.times, cfg, 21 + i);
    const auto r1 = evaluate_prediction(gomp, test, 3, 5);
    const auto r2 = evaluate_prediction(gp, test, 3, 5);
    gomp_err += r1.rmse_log;
    gp_err += r2.rmse_log;
    CHECK(r1.rmse_log < 1e-6);
  }
  CHECK(gomp_err < gp_err);
}

TEST_CASE("method comparison on a small synthetic cohort") {
  CohortSpec spec;
  const auto synthetic = simulate_cohort(6, spec, 17);
  std::vector<LongitudinalSeries> cohort;
  for (const auto& p : synthetic) cohort.push_back(p.series);
  // one patient too short to evaluate
  cohort.push_back(LongitudinalSeries::from_volumes("short", {0.0, 365.0},
                                                    {150.0, 220.0}));
  RunConfig cfg = fast_config();
  cfg.methods = {Method::proposed, Method::pure_gompertz, Method::pure_gp};
  const auto report = compare_methods(cohort, cfg);
  REQUIRE(report.columns.size() == 3);
  CHECK(report.skipped_patients == std::vector<std::string>{"short"});
  const auto& proposed = report.columns[0];
  CHECK(proposed.method == Method::proposed);
  CHECK(proposed.n_ok == 6);
  CHECK_FALSE(proposed.rmse_test.has_value());
  CHECK(proposed.coverage_dev.has_value());
  for (std::size_t m = 1; m < report.columns.size(); ++m) {
    const auto& col = report.columns[m];
    CHECK(col.n_ok == 6);
    CHECK(col.wins + col.losses + col.ties == 6);
    REQUIRE(col.rmse_test.has_value());
    CHECK(col.rmse_test->t_p >= 0.0);
    CHECK(col.rmse_test->t_p <= 1.0);
    CHECK_FALSE(col.coverage_dev.has_value());  // deterministic baselines
  }
  // paired diffs: one row per (patient, non-proposed method)
  CHECK(report.paired_diffs.size() == 12);

  // a method compared against itself is degenerate
  RunConfig self_cfg = fast_config();
  self_cfg.methods = {Method::proposed, Method::proposed};
  const auto self_report = compare_methods(cohort, self_cfg);
  REQUIRE(self_report.columns[1].rmse_test.has_value());
  CHECK(self_report.columns[1].rmse_test->degenerate);
  CHECK(self_report.columns[1].rmse_test->cohens_dz == 0.0);
  CHECK(self_report.columns[1].ties == 6);
}

TEST_CASE("method names round trip") {
  for (Method m : all_methods()) CHECK(parse_method(method_name(m)) == m);
  CHECK_THROWS_AS(parse_method("not_a_method"), std::invalid_argument);
}
