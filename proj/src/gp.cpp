#include "bpinn/gp.hpp"

#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>

#include "bpinn/errors.hpp"

namespace bpinn {

namespace {

// Dense column-packed lower Cholesky; returns false on failure.
bool cholesky(std::vector<double>& m, std::size_t n) {
  for (std::size_t j = 0; j < n; ++j) {
    double diag = m[j * n + j];
    for (std::size_t k = 0; k < j; ++k) diag -= m[j * n + k] * m[j * n + k];
    if (!(diag > 0.0)) return false;
    const double l = std::sqrt(diag);
    m[j * n + j] = l;
    for (std::size_t i = j + 1; i < n; ++i) {
      double v = m[i * n + j];
      for (std::size_t k = 0; k < j; ++k) v -= m[i * n + k] * m[j * n + k];
      m[i * n + j] = v / l;
    }
  }
  // zero the strict upper triangle for cleanliness
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) m[i * n + j] = 0.0;
  return true;
}

void solve_lower(const std::vector<double>& l, std::size_t n, std::vector<double>& x) {
  for (std::size_t i = 0; i < n; ++i) {
    double v = x[i];
    for (std::size_t k = 0; k < i; ++k) v -= l[i * n + k] * x[k];
    x[i] = v / l[i * n + i];
  }
}

void solve_upper_t(const std::vector<double>& l, std::size_t n, std::vector<double>& x) {
  for (std::size_t ii = n; ii-- > 0;) {
    double v = x[ii];
    for (std::size_t k = ii + 1; k < n; ++k) v -= l[k * n + ii] * x[k];
    x[ii] = v / l[ii * n + ii];
  }
}

struct Factorization {
  std::vector<double> chol;  // lower factor of K + jitter I
  std::vector<double> alpha; // (K)^-1 y_centered
  double jitter = 0.0;
};

// Kernel matrix on the training inputs with escalating jitter.
Factorization factorize(const GpModel& m) {
  const std::size_t n = m.train_t.size();
  const double sf2 = std::exp(2.0 * m.eta[0]);
  const double ell = std::exp(m.eta[1]);
  const double sn2 = std::exp(2.0 * m.eta[2]);
  std::vector<double> base(n * n);
  for (std::size_t i = 0; i < n; ++i) {
    for (std::size_t j = 0; j < n; ++j) {
      const double d = (m.train_t[i] - m.train_t[j]) / ell;
      base[i * n + j] = sf2 * std::exp(-0.5 * d * d);
    }
    base[i * n + i] += sn2;
  }
  for (double jitter = kGpJitter; jitter <= 1e-4 + 1e-12; jitter *= 10.0) {
    Factorization f;
    f.chol = base;
    for (std::size_t i = 0; i < n; ++i) f.chol[i * n + i] += jitter;
    if (!cholesky(f.chol, n)) continue;
    f.jitter = jitter;
    f.alpha.resize(n);
    for (std::size_t i = 0; i < n; ++i) f.alpha[i] = m.train_y[i] - m.y_mean;
    solve_lower(f.chol, n, f.alpha);
    solve_upper_t(f.chol, n, f.alpha);
    return f;
  }
  throw FitFailureError("gp: kernel factorization failed after jitter escalation");
}

}  // namespace

double gp_neg_log_marginal(const GpModel& m, std::array<double, 3>* grad) {
  const std::size_t n = m.train_t.size();
  if (n == 0) throw std::invalid_argument("gp: no training data");
  const Factorization f = factorize(m);

  double nlm = 0.5 * n * std::log(2.0 * 3.141592653589793238462643383279502884);
  for (std::size_t i = 0; i < n; ++i) nlm += std::log(f.chol[i * n + i]);
  for (std::size_t i = 0; i < n; ++i)
    nlm += 0.5 * (m.train_y[i] - m.y_mean) * f.alpha[i];

  if (grad) {
    // K^-1 via the factor, then dNLM/d eta_j = 0.5 tr((K^-1 - aa^T) dK/d eta_j).
    std::vector<double> kinv(n * n, 0.0);
    std::vector<double> e(n, 0.0);
    for (std::size_t c = 0; c < n; ++c) {
      std::fill(e.begin(), e.end(), 0.0);
      e[c] = 1.0;
      solve_lower(f.chol, n, e);
      solve_upper_t(f.chol, n, e);
      for (std::size_t r = 0; r < n; ++r) kinv[r * n + c] = e[r];
    }
    const double sf2 = std::exp(2.0 * m.eta[0]);
    const double ell = std::exp(m.eta[1]);
    const double sn2 = std::exp(2.0 * m.eta[2]);
    (*grad) = {0.0, 0.0, 0.0};
    for (std::size_t i = 0; i < n; ++i) {
      for (std::size_t j = 0; j < n; ++j) {
        const double dist = (m.train_t[i] - m.train_t[j]) / ell;
        const double k_se = sf2 * std::exp(-0.5 * dist * dist);
        const double w = kinv[i * n + j] - f.alpha[i] * f.alpha[j];
        (*grad)[0] += 0.5 * w * 2.0 * k_se;
        (*grad)[1] += 0.5 * w * k_se * dist * dist;
        if (i == j) (*grad)[2] += 0.5 * w * 2.0 * sn2;
      }
    }
  }
  return nlm;
}

GpModel fit_pure_gp(const LongitudinalSeries& train, std::uint64_t seed) {
  if (train.size() < 2)
    throw std::invalid_argument("fit_pure_gp: need at least 2 observations");

  GpModel base;
  base.train_t = train.times;
  base.train_y = train.log_volumes;
  base.y_mean = std::accumulate(train.log_volumes.begin(), train.log_volumes.end(),
                                0.0) /
                static_cast<double>(train.size());

  double var = 0.0;
  for (double y : train.log_volumes) var += (y - base.y_mean) * (y - base.y_mean);
  var /= static_cast<double>(train.size() - 1);
  const double sf0 = std::sqrt(std::max(var, 1e-4));
  const double span = train.times.back() - train.times.front();

  std::array<double, 3> start{std::log(sf0), std::log(std::max(span, 1.0)),
                              std::log(0.25 * sf0 + 1e-3)};

  Rng rng(seed);
  GpModel best = base;
  double best_nlm = std::numeric_limits<double>::infinity();
  constexpr int restarts = 9;  // heuristic start + 8 perturbations
  for (int r = 0; r < restarts; ++r) {
    GpModel m = base;
    m.eta = start;
    if (r > 0)
      for (double& e : m.eta) e += rng.normal(0.0, 1.0);

    // Adam in log-hyperparameter space.
    std::array<double, 3> mom{0.0, 0.0, 0.0}, vel{0.0, 0.0, 0.0};
    double b1t = 1.0, b2t = 1.0;
    constexpr double lr = 0.05;
    double nlm = std::numeric_limits<double>::infinity();
    try {
      for (int it = 0; it < 400; ++it) {
        std::array<double, 3> g{};
        nlm = gp_neg_log_marginal(m, &g);
        b1t *= 0.9;
        b2t *= 0.999;
        for (int k = 0; k < 3; ++k) {
          mom[static_cast<std::size_t>(k)] =
              0.9 * mom[static_cast<std::size_t>(k)] + 0.1 * g[static_cast<std::size_t>(k)];
          vel[static_cast<std::size_t>(k)] =
              0.999 * vel[static_cast<std::size_t>(k)] +
              0.001 * g[static_cast<std::size_t>(k)] * g[static_cast<std::size_t>(k)];
          m.eta[static_cast<std::size_t>(k)] -=
              lr * (mom[static_cast<std::size_t>(k)] / (1.0 - b1t)) /
              (std::sqrt(vel[static_cast<std::size_t>(k)] / (1.0 - b2t)) + 1e-8);
        }
      }
      nlm = gp_neg_log_marginal(m, nullptr);
    } catch (const FitFailureError&) {
      continue;  // this start walked into an unfactorizable corner
    }
    if (std::isfinite(nlm) && nlm < best_nlm) {
      best_nlm = nlm;
      best = m;
    }
  }
  if (!std::isfinite(best_nlm))
    throw FitFailureError("fit_pure_gp: every restart failed");
  return best;
}

GpPrediction gp_predict(const GpModel& m, std::span<const double> times) {
  const std::size_t n = m.train_t.size();
  const Factorization f = factorize(m);
  const double sf2 = std::exp(2.0 * m.eta[0]);
  const double ell = std::exp(m.eta[1]);

  GpPrediction pred;
  pred.mean.reserve(times.size());
  pred.var.reserve(times.size());
  std::vector<double> ks(n);
  for (double t : times) {
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (t - m.train_t[i]) / ell;
      ks[i] = sf2 * std::exp(-0.5 * d * d);
    }
    double mean = m.y_mean;
    for (std::size_t i = 0; i < n; ++i) mean += ks[i] * f.alpha[i];
    std::vector<double> v = ks;
    solve_lower(f.chol, n, v);
    double var = sf2;
    for (std::size_t i = 0; i < n; ++i) var -= v[i] * v[i];
    pred.mean.push_back(mean);
    pred.var.push_back(std::max(var, 0.0));
  }
  return pred;
}

std::vector<double> gp_sample_function(const GpModel& m,
                                       std::span<const double> times, Rng& rng) {
  const std::size_t n = m.train_t.size();
  const std::size_t g = times.size();
  const Factorization f = factorize(m);
  const double sf2 = std::exp(2.0 * m.eta[0]);
  const double ell = std::exp(m.eta[1]);

  // Posterior covariance on the requested times.
  std::vector<double> kstar(g * n);
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t i = 0; i < n; ++i) {
      const double d = (times[a] - m.train_t[i]) / ell;
      kstar[a * n + i] = sf2 * std::exp(-0.5 * d * d);
    }
  std::vector<double> mean(g, 0.0);
  for (std::size_t a = 0; a < g; ++a) {
    mean[a] = m.y_mean;
    for (std::size_t i = 0; i < n; ++i) mean[a] += kstar[a * n + i] * f.alpha[i];
  }
  // V = L^-1 K_*^T, cov = K_** - V^T V
  std::vector<double> v(kstar);
  std::vector<double> col(n);
  for (std::size_t a = 0; a < g; ++a) {
    for (std::size_t i = 0; i < n; ++i) col[i] = kstar[a * n + i];
    solve_lower(f.chol, n, col);
    for (std::size_t i = 0; i < n; ++i) v[a * n + i] = col[i];
  }
  std::vector<double> cov(g * g);
  for (std::size_t a = 0; a < g; ++a)
    for (std::size_t b = 0; b < g; ++b) {
      const double d = (times[a] - times[b]) / ell;
      double c = sf2 * std::exp(-0.5 * d * d);
      for (std::size_t i = 0; i < n; ++i) c -= v[a * n + i] * v[b * n + i];
      cov[a * g + b] = c;
    }

  const double scale = std::max(sf2, 1e-12);
  for (double jitter = 1e-10 * scale; jitter <= 1e-4 * scale * 1.0001;
       jitter *= 10.0) {
    std::vector<double> l = cov;
    for (std::size_t a = 0; a < g; ++a) l[a * g + a] += jitter;
    if (!cholesky(l, g)) continue;
    std::vector<double> z(g);
    for (double& x : z) x = rng.normal();
    std::vector<double> draw(g, 0.0);
    for (std::size_t a = 0; a < g; ++a) {
      double acc = mean[a];
      for (std::size_t b = 0; b <= a; ++b) acc += l[a * g + b] * z[b];
      draw[a] = acc;
    }
    return draw;
  }
  throw FitFailureError("gp_sample_function: posterior covariance not factorizable");
}

BayesianGpFit fit_bayesian_gp(const LongitudinalSeries& train, const HmcConfig& hmc,
                              std::uint64_t seed, double prior_sd) {
  if (!(prior_sd > 0.0))
    throw std::invalid_argument("fit_bayesian_gp: prior_sd must be > 0");
  BayesianGpFit fit;
  fit.base = fit_pure_gp(train, derive_seed(seed, 0, seed_stream::gp_restarts));

  const std::array<double, 3> center = fit.base.eta;
  GpModel work = fit.base;
  PotentialFn potential = [&work, &center, prior_sd](const std::vector<double>& q,
                                                     std::vector<double>& grad) {
    work.eta = {q[0], q[1], q[2]};
    grad.assign(3, 0.0);
    double u;
    std::array<double, 3> g{};
    try {
      u = gp_neg_log_marginal(work, &g);
    } catch (const FitFailureError&) {
      return std::numeric_limits<double>::infinity();
    }
    for (int k = 0; k < 3; ++k) {
      const std::size_t i = static_cast<std::size_t>(k);
      grad[i] = g[i];
      const double dev = (q[i] - center[i]) / prior_sd;
      u += 0.5 * dev * dev;
      grad[i] += dev / prior_sd;
    }
    return u;
  };

  HmcConfig chain_cfg = hmc;
  chain_cfg.seed = derive_seed(seed, 0, seed_stream::gp_hmc);
  const std::vector<double> q0{center[0], center[1], center[2]};
  ChainResult chain = hmc_chain(potential, q0, chain_cfg);
  fit.acceptance_rate = chain.acceptance_rate;
  fit.eta_draws.reserve(static_cast<std::size_t>(chain_cfg.n_samples - chain_cfg.burn_in));
  for (std::size_t i = static_cast<std::size_t>(chain_cfg.burn_in);
       i < chain.draws.size(); ++i)
    fit.eta_draws.push_back({chain.draws[i][0], chain.draws[i][1], chain.draws[i][2]});
  return fit;
}

}  // namespace bpinn
