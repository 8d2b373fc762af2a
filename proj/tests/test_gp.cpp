#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>

#include "bpinn/gp.hpp"
#include "test_util.hpp"

using namespace bpinn;

namespace {

LongitudinalSeries logs_series(std::vector<double> times, std::vector<double> logs) {
  std::vector<double> volumes;
  for (double y : logs) volumes.push_back(std::exp(y));
  return LongitudinalSeries::from_volumes("gp", std::move(times), std::move(volumes));
}

}  // namespace

TEST_CASE("vanishing noise interpolates the training points") {
  GpModel m;
  m.train_t = {0.0, 400.0, 800.0};
  m.train_y = {5.2, 5.8, 5.5};
  m.y_mean = (5.2 + 5.8 + 5.5) / 3.0;
  m.eta = {std::log(1.0), std::log(250.0), std::log(1e-12)};
  const auto pred = gp_predict(m, m.train_t);
  for (std::size_t i = 0; i < m.train_t.size(); ++i)
    CHECK(std::abs(pred.mean[i] - m.train_y[i]) < 1e-8);
}

TEST_CASE("far from data the prediction reverts to the mean") {
  GpModel m;
  m.train_t = {0.0, 300.0};
  m.train_y = {5.0, 6.0};
  m.y_mean = 5.5;
  m.eta = {std::log(0.8), std::log(100.0), std::log(0.05)};
  const auto pred = gp_predict(m, std::vector<double>{5000.0});
  CHECK(pred.mean[0] == doctest::Approx(5.5).epsilon(1e-9));
  CHECK(pred.var[0] == doctest::Approx(0.64).epsilon(1e-6));  // sf^2
}

TEST_CASE("marginal likelihood gradient matches finite differences") {
  GpModel m;
  m.train_t = {0.0, 200.0, 420.0, 730.0};
  m.train_y = {5.1, 5.6, 5.9, 6.1};
  m.y_mean = 5.675;
  Rng rng(3);
  for (int rep = 0; rep < 15; ++rep) {
    m.eta = {rng.normal(std::log(0.5), 0.4), rng.normal(std::log(300.0), 0.4),
             rng.normal(std::log(0.1), 0.4)};
    std::array<double, 3> grad{};
    gp_neg_log_marginal(m, &grad);
    for (int k = 0; k < 3; ++k) {
      const double h = 1e-6;
      GpModel up = m, dn = m;
      up.eta[static_cast<std::size_t>(k)] += h;
      dn.eta[static_cast<std::size_t>(k)] -= h;
      const double fd =
          (gp_neg_log_marginal(up, nullptr) - gp_neg_log_marginal(dn, nullptr)) /
          (2.0 * h);
      CHECK(test::rel_err(grad[static_cast<std::size_t>(k)], fd, 1e-5) < 1e-5);
    }
  }
}

TEST_CASE("hyperparameter fit improves the marginal likelihood") {
  const auto series = logs_series({0.0, 250.0, 480.0, 730.0}, {5.0, 5.5, 5.9, 6.0});
  const GpModel fit = fit_pure_gp(series, 11);
  GpModel start = fit;
  start.eta = {std::log(0.5), std::log(730.0), std::log(0.125)};
  CHECK(gp_neg_log_marginal(fit, nullptr) <=
        gp_neg_log_marginal(start, nullptr) + 1e-9);
  // deterministic under the seed
  const GpModel again = fit_pure_gp(series, 11);
  CHECK(fit.eta == again.eta);
}

TEST_CASE("two-point fit runs and predicts finitely") {
  const auto series = logs_series({0.0, 365.0}, {5.3, 5.9});
  const GpModel fit = fit_pure_gp(series, 21);
  const auto pred = gp_predict(fit, std::vector<double>{730.0});
  CHECK(std::isfinite(pred.mean[0]));
  CHECK(pred.var[0] >= 0.0);
}

TEST_CASE("function draws reproduce the posterior moments") {
  GpModel m;
  m.train_t = {0.0, 365.0};
  m.train_y = {5.0, 6.0};
  m.y_mean = 5.5;
  m.eta = {std::log(0.7), std::log(200.0), std::log(0.1)};
  const std::vector<double> times{100.0, 500.0, 900.0};
  const auto pred = gp_predict(m, times);
  Rng rng(8);
  const int n = 4000;
  std::vector<double> mean(times.size(), 0.0), var(times.size(), 0.0);
  std::vector<std::vector<double>> draws;
  for (int s = 0; s < n; ++s) {
    draws.push_back(gp_sample_function(m, times, rng));
    for (std::size_t t = 0; t < times.size(); ++t) mean[t] += draws.back()[t];
  }
  for (std::size_t t = 0; t < times.size(); ++t) mean[t] /= n;
  for (const auto& d : draws)
    for (std::size_t t = 0; t < times.size(); ++t)
      var[t] += (d[t] - mean[t]) * (d[t] - mean[t]);
  for (std::size_t t = 0; t < times.size(); ++t) {
    var[t] /= n - 1;
    CHECK(std::abs(mean[t] - pred.mean[t]) < 0.05);
    if (pred.var[t] > 1e-6)
      CHECK(std::abs(var[t] - pred.var[t]) / pred.var[t] < 0.15);
  }
}

TEST_CASE("bayesian gp is seeded and collapses under a point-mass prior") {
  const auto series = logs_series({0.0, 365.0}, {5.2, 6.1});
  HmcConfig hmc;
  hmc.n_samples = 120;
  hmc.burn_in = 20;
  const auto a = fit_bayesian_gp(series, hmc, 5);
  const auto b = fit_bayesian_gp(series, hmc, 5);
  CHECK(a.eta_draws == b.eta_draws);
  CHECK(a.acceptance_rate == b.acceptance_rate);
  CHECK(a.eta_draws.size() == 100);

  // near-point-mass prior: every draw stays at the pure-GP optimum
  const auto tight = fit_bayesian_gp(series, hmc, 5, 1e-9);
  for (const auto& eta : tight.eta_draws) {
    CHECK(eta[0] == doctest::Approx(tight.base.eta[0]).epsilon(1e-9));
    CHECK(eta[1] == doctest::Approx(tight.base.eta[1]).epsilon(1e-9));
    CHECK(eta[2] == doctest::Approx(tight.base.eta[2]).epsilon(1e-9));
  }
}
