#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>

#include "bpinn/hmc.hpp"
#include "bpinn/rng.hpp"
#include "bpinn/simulate.hpp"
#include "test_util.hpp"

using namespace bpinn;

namespace {

// U = 0.5 ||q||^2, the 3-D standard Gaussian hook.
double gaussian_potential(const std::vector<double>& q, std::vector<double>& g) {
  g = q;
  double u = 0.0;
  for (double x : q) u += 0.5 * x * x;
  return u;
}

LongitudinalSeries series_from_xi(double log_a, double log_b, double y0,
                                  const std::vector<double>& times,
                                  double sigma = 0.0, std::uint64_t seed = 1) {
  const auto p = GompertzParams::make(std::exp(log_a), std::exp(log_b), y0,
                                      times.front());
  return simulate_series(p, ObservationNoise{sigma}, times, seed, "xi");
}

}  // namespace

TEST_CASE("potential: exact observations and flat priors give zero energy") {
  EnergyConfig cfg;
  cfg.prior_alpha.sigma = 1e8;
  cfg.prior_beta.sigma = 1e8;
  cfg.y0_prior = GaussianPrior{0.0, 1e8};
  const std::vector<double> xi{std::log(0.25), std::log(0.04), 5.2};
  const auto series = series_from_xi(xi[0], xi[1], xi[2], {0.0, 300.0, 600.0});
  GompertzPotential pot(series, cfg);
  std::vector<double> grad;
  CHECK(pot(xi, grad) < 1e-9);
}

TEST_CASE("potential gradient matches central finite differences") {
  EnergyConfig cfg;
  const std::vector<double> times{0.0, 320.0};
  const auto series = series_from_xi(std::log(0.2), std::log(0.05), 6.0, times, 0.2, 3);
  GompertzPotential pot(series, cfg);
  Rng rng(1001);
  std::vector<double> grad;
  for (int rep = 0; rep < 50; ++rep) {
    std::vector<double> xi{rng.normal(std::log(0.2), 0.4),
                           rng.normal(std::log(0.05), 0.4), rng.normal(6.0, 0.7)};
    pot(xi, grad);
    for (std::size_t k = 0; k < xi.size(); ++k) {
      const double h = 1e-6;
      std::vector<double> up = xi, dn = xi, tmp;
      up[k] += h;
      dn[k] -= h;
      const double fd = (pot(up, tmp) - pot(dn, tmp)) / (2.0 * h);
      CHECK(test::rel_err(grad[k], fd, 1e-6) < 1e-6);
    }
  }
}

TEST_CASE("potential gradient with inferred sigma matches finite differences") {
  EnergyConfig cfg;
  cfg.infer_sigma_v = true;
  const auto series =
      series_from_xi(std::log(0.2), std::log(0.05), 6.0, {0.0, 320.0}, 0.2, 5);
  GompertzPotential pot(series, cfg);
  CHECK(pot.dim() == 4);
  Rng rng(77);
  std::vector<double> grad, tmp;
  for (int rep = 0; rep < 20; ++rep) {
    std::vector<double> xi{rng.normal(std::log(0.2), 0.3),
                           rng.normal(std::log(0.05), 0.3), rng.normal(6.0, 0.5),
                           rng.normal(std::log(0.2), 0.3)};
    pot(xi, grad);
    for (std::size_t k = 0; k < xi.size(); ++k) {
      const double h = 1e-6;
      std::vector<double> up = xi, dn = xi;
      up[k] += h;
      dn[k] -= h;
      const double fd = (pot(up, tmp) - pot(dn, tmp)) / (2.0 * h);
      CHECK(test::rel_err(grad[k], fd, 1e-6) < 1e-6);
    }
  }
}

TEST_CASE("flat-likelihood potential is minimized at the prior means") {
  EnergyConfig cfg;
  cfg.sigma_v = 1e8;  // likelihood contributes nothing
  cfg.y0_prior = GaussianPrior{5.0, 1.0};
  const auto series =
      series_from_xi(std::log(0.2), std::log(0.05), 6.0, {0.0, 320.0}, 0.2, 5);
  GompertzPotential pot(series, cfg);
  const std::vector<double> mode{std::log(0.2), std::log(0.05), 5.0};
  std::vector<double> grad;
  const double u_mode = pot(mode, grad);
  for (double g : grad) CHECK(std::abs(g) < 1e-12);
  Rng rng(4);
  for (int i = 0; i < 10; ++i) {
    std::vector<double> other{mode[0] + rng.normal(0.0, 0.5),
                              mode[1] + rng.normal(0.0, 0.5),
                              mode[2] + rng.normal(0.0, 0.5)};
    CHECK(pot(other, grad) >= u_mode);
  }
}

TEST_CASE("leapfrog conserves energy on the harmonic potential") {
  Rng rng(9);
  std::vector<double> q{0.3, -0.8, 1.1};
  std::vector<double> p{rng.normal(), rng.normal(), rng.normal()};
  std::vector<double> grad;
  const double h0 =
      gaussian_potential(q, grad) + 0.5 * (p[0] * p[0] + p[1] * p[1] + p[2] * p[2]);
  const auto end = leapfrog(gaussian_potential, q, p, 1e-4, 10);
  const double h1 = gaussian_potential(end.position, grad) +
                    0.5 * (end.momentum[0] * end.momentum[0] +
                           end.momentum[1] * end.momentum[1] +
                           end.momentum[2] * end.momentum[2]);
  CHECK(std::abs(h1 - h0) < 1e-7);
}

TEST_CASE("leapfrog is reversible") {
  std::vector<double> q{0.5, -1.2, 0.1};
  std::vector<double> p{1.3, 0.4, -0.6};
  const auto fwd = leapfrog(gaussian_potential, q, p, 0.05, 25);
  std::vector<double> back_p = fwd.momentum;
  for (double& x : back_p) x = -x;
  const auto back = leapfrog(gaussian_potential, fwd.position, back_p, 0.05, 25);
  for (std::size_t i = 0; i < q.size(); ++i) {
    CHECK(std::abs(back.position[i] - q[i]) < 1e-10);
    CHECK(std::abs(-back.momentum[i] - p[i]) < 1e-10);
  }
}

TEST_CASE("zero momentum at a stationary point stays put") {
  std::vector<double> q{0.0, 0.0, 0.0};
  std::vector<double> p{0.0, 0.0, 0.0};
  const auto end = leapfrog(gaussian_potential, q, p, 0.1, 7);
  for (double x : end.position) CHECK(x == 0.0);
  for (double x : end.momentum) CHECK(x == 0.0);
}

TEST_CASE("chain reproduces standard Gaussian moments") {
  HmcConfig cfg;
  cfg.step_size = 0.25;
  cfg.leapfrog_steps = 20;
  cfg.n_samples = 3100;
  cfg.burn_in = 100;
  cfg.seed = 11;
  const auto chain = hmc_chain(gaussian_potential, {0.0, 0.0, 0.0}, cfg);
  CHECK(chain.draws.size() == 3100);
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (std::size_t i = 100; i < chain.draws.size(); ++i)
      mean += chain.draws[i][static_cast<std::size_t>(c)];
    mean /= 3000.0;
    double var = 0.0;
    for (std::size_t i = 100; i < chain.draws.size(); ++i) {
      const double d = chain.draws[i][static_cast<std::size_t>(c)] - mean;
      var += d * d;
    }
    var /= 2999.0;
    CHECK(std::abs(mean) < 0.15);
    CHECK(std::abs(var - 1.0) < 0.25);
  }
  CHECK(chain.acceptance_rate > 0.9);
}

TEST_CASE("same seed gives identical chains") {
  HmcConfig cfg;
  cfg.n_samples = 50;
  cfg.burn_in = 10;
  cfg.seed = 77;
  const auto a = hmc_chain(gaussian_potential, {1.0, 0.0, -1.0}, cfg);
  const auto b = hmc_chain(gaussian_potential, {1.0, 0.0, -1.0}, cfg);
  CHECK(a.draws == b.draws);
  CHECK(a.acceptance_rate == b.acceptance_rate);
}

TEST_CASE("all-flat potential accepts every proposal") {
  PotentialFn flat = [](const std::vector<double>& q, std::vector<double>& g) {
    g.assign(q.size(), 0.0);
    return 0.0;
  };
  HmcConfig cfg;
  cfg.n_samples = 64;
  cfg.burn_in = 8;
  const auto chain = hmc_chain(flat, {0.0, 0.0}, cfg);
  CHECK(chain.acceptance_rate == 1.0);
}

TEST_CASE("hopeless step size yields a degenerate chain warning") {
  // curvature 1e8 makes every trajectory blow past the mode
  PotentialFn stiff = [](const std::vector<double>& q, std::vector<double>& g) {
    g.resize(q.size());
    double u = 0.0;
    for (std::size_t i = 0; i < q.size(); ++i) {
      g[i] = 1e8 * q[i];
      u += 0.5 * 1e8 * q[i] * q[i];
    }
    return u;
  };
  EnergyConfig cfg;
  const auto series =
      series_from_xi(std::log(0.2), std::log(0.05), 6.0, {0.0, 320.0}, 0.2, 5);
  HmcConfig h;
  h.n_samples = 30;
  h.burn_in = 5;
  // run through sample_posterior_from on a potential that rejects everything:
  // emulate by a huge step size instead
  HmcConfig wild = h;
  wild.step_size = 1e9;
  const auto samples = sample_posterior_from(
      series, {std::log(0.2), std::log(0.05), 6.0}, wild, cfg);
  CHECK(samples.acceptance_rate == 0.0);
  CHECK(samples.degenerate);
  CHECK(samples.draws.size() == 25);
  for (const auto& d : samples.draws) {
    CHECK(d[0] > 0.0);
    CHECK(d[1] > 0.0);
  }
  (void)stiff;
}

TEST_CASE("posterior credible boxes cover the generating parameters") {
  // per-coordinate 95% interval coverage over 100 seeded replications
  EnergyConfig cfg;
  HmcConfig h;  // longer chain than the pipeline default: the oracle needs
  h.step_size = 0.02;  // enough effective samples for stable tail quantiles
  h.n_samples = 2100;
  h.burn_in = 100;
  int covered[3] = {0, 0, 0};
  const int reps = 100;
  for (int rep = 0; rep < reps; ++rep) {
    Rng rng(4000 + static_cast<std::uint64_t>(rep));
    const double la = rng.normal(std::log(0.2), 0.5);
    const double lb = rng.normal(std::log(0.05), 0.5);
    const double y0 = rng.normal(6.0, 1.0);
    const auto series = series_from_xi(la, lb, y0, {0.0, 365.0}, 0.2,
                                       9000 + static_cast<std::uint64_t>(rep));
    h.seed = 100 + static_cast<std::uint64_t>(rep);
    const auto samples = sample_posterior_from(series, {la, lb, y0}, h, cfg);
    const double truth[3] = {std::exp(la), std::exp(lb), y0};
    for (int c = 0; c < 3; ++c) {
      std::vector<double> coord;
      coord.reserve(samples.draws.size());
      for (const auto& d : samples.draws) coord.push_back(d[static_cast<std::size_t>(c)]);
      std::sort(coord.begin(), coord.end());
      const double lo = coord[static_cast<std::size_t>(0.025 * (coord.size() - 1))];
      const double hi = coord[static_cast<std::size_t>(
          std::ceil(0.975 * (coord.size() - 1)))];
      if (truth[c] >= lo && truth[c] <= hi) ++covered[c];
    }
  }
  for (int c = 0; c < 3; ++c) CHECK(covered[c] >= 90);
}

TEST_CASE("sample_posterior starts from the MAP point and keeps positivity") {
  const auto series =
      series_from_xi(std::log(0.2), std::log(0.05), 6.0, {0.0, 365.0, 700.0}, 0.2, 8);
  const auto train = series.head(2);
  EnergyConfig cfg;
  MapOptions opt;
  opt.epochs = 300;
  opt.layer_sizes = {1, 8, 8, 1};
  const auto map = map_fit(train, cfg, opt);
  HmcConfig h;
  h.n_samples = 120;
  h.burn_in = 20;
  const auto samples = sample_posterior(train, map, h, cfg);
  CHECK(samples.draws.size() == 100);
  for (const auto& d : samples.draws) {
    CHECK(d[0] > 0.0);
    CHECK(d[1] > 0.0);
  }
  CHECK(samples.acceptance_rate >= 0.0);
  CHECK(samples.acceptance_rate <= 1.0);
}

TEST_CASE("chain diagnostics") {
  PosteriorSamples s;
  s.acceptance_rate = 0.5;
  SUBCASE("constant chain flags as degenerate") {
    for (int i = 0; i < 10; ++i) s.draws.push_back({0.2, 0.05, 6.0});
    const auto d = chain_diagnostics(s);
    CHECK(d.degenerate);
    CHECK_FALSE(d.lag1[0].has_value());
    CHECK(d.mean[0] == doctest::Approx(0.2));
    CHECK(d.sd[0] < 1e-12);
  }
  SUBCASE("iid draws have negligible lag-1 autocorrelation") {
    Rng rng(15);
    for (int i = 0; i < 1000; ++i)
      s.draws.push_back({std::exp(rng.normal()), std::exp(rng.normal()),
                         rng.normal()});
    const auto d = chain_diagnostics(s);
    CHECK_FALSE(d.degenerate);
    for (int c = 0; c < 3; ++c) {
      REQUIRE(d.lag1[static_cast<std::size_t>(c)].has_value());
      CHECK(std::abs(*d.lag1[static_cast<std::size_t>(c)]) < 0.1);
    }
    CHECK(d.acceptance_rate == 0.5);
  }
  SUBCASE("fewer than two samples is an error") {
    s.draws.push_back({0.2, 0.05, 6.0});
    CHECK_THROWS_AS(chain_diagnostics(s), std::invalid_argument);
  }
}

TEST_CASE("chain halves agree in distribution on the Gaussian hook") {
  // two-sample KS below the 1% critical value in at least 95 of 100 runs
  int ok = 0;
  for (int rep = 0; rep < 100; ++rep) {
    HmcConfig cfg;
    cfg.step_size = 0.1;  // trajectory length 2: strong momentum turnover,
    cfg.leapfrog_steps = 20;  // safely away from the period-pi resonance
    cfg.n_samples = 1100;
    cfg.burn_in = 100;
    cfg.seed = 50000 + static_cast<std::uint64_t>(rep);
    const auto chain = hmc_chain(gaussian_potential, {0.0, 0.0, 0.0}, cfg);
    std::vector<double> first, second;
    for (std::size_t i = 100; i < chain.draws.size(); ++i)
      (i < 600 ? first : second).push_back(chain.draws[i][0]);
    std::sort(first.begin(), first.end());
    std::sort(second.begin(), second.end());
    // two-sample KS statistic
    double ks = 0.0;
    std::size_t i = 0, j = 0;
    while (i < first.size() && j < second.size()) {
      if (first[i] <= second[j]) ++i;
      else ++j;
      const double fa = static_cast<double>(i) / first.size();
      const double fb = static_cast<double>(j) / second.size();
      ks = std::max(ks, std::abs(fa - fb));
    }
    const double n_eff = 500.0 * 500.0 / 1000.0;
    const double critical = 1.628 / std::sqrt(n_eff);  // alpha = 0.01
    if (ks < critical) ++ok;
  }
  CHECK(ok >= 95);
}

TEST_CASE("within-patient posterior correlates alpha with beta positively") {
  EnergyConfig cfg;
  HmcConfig h;
  h.n_samples = 200;
  h.burn_in = 50;
  double sum_xy = 0.0, sum_x2 = 0.0, sum_y2 = 0.0;
  CohortSpec spec;
  const auto cohort = simulate_cohort(20, spec, 31);
  for (std::size_t i = 0; i < cohort.size(); ++i) {
    const auto train = cohort[i].series.head(2);
    h.seed = 600 + i;
    const auto samples = sample_posterior_from(
        train,
        {std::log(0.2), std::log(0.05), train.log_volumes.front()}, h, cfg);
    double ma = 0.0, mb = 0.0;
    for (const auto& d : samples.draws) {
      ma += d[0];
      mb += d[1];
    }
    ma /= static_cast<double>(samples.draws.size());
    mb /= static_cast<double>(samples.draws.size());
    double va = 0.0, vb = 0.0;
    for (const auto& d : samples.draws) {
      va += (d[0] - ma) * (d[0] - ma);
      vb += (d[1] - mb) * (d[1] - mb);
    }
    va = std::sqrt(va);
    vb = std::sqrt(vb);
    if (va == 0.0 || vb == 0.0) continue;
    for (const auto& d : samples.draws) {
      const double zx = (d[0] - ma) / va;
      const double zy = (d[1] - mb) / vb;
      sum_xy += zx * zy;
      sum_x2 += zx * zx;
      sum_y2 += zy * zy;
    }
  }
  const double corr = sum_xy / std::sqrt(sum_x2 * sum_y2);
  CHECK(corr > 0.0);
}

TEST_CASE("config validation") {
  HmcConfig cfg;
  cfg.step_size = 0.0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = HmcConfig{};
  cfg.burn_in = cfg.n_samples;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
  cfg = HmcConfig{};
  cfg.leapfrog_steps = 0;
  CHECK_THROWS_AS(cfg.validate(), std::invalid_argument);
}
