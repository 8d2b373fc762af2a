#include "bpinn/hmc.hpp"

#include <cmath>
#include <stdexcept>

#include "bpinn/gompertz.hpp"
#include "bpinn/rng.hpp"

namespace bpinn {

void HmcConfig::validate() const {
  if (!(step_size > 0.0)) throw std::invalid_argument("HmcConfig: step_size must be > 0");
  if (leapfrog_steps < 1)
    throw std::invalid_argument("HmcConfig: leapfrog_steps must be >= 1");
  if (n_samples < 1) throw std::invalid_argument("HmcConfig: n_samples must be >= 1");
  if (burn_in < 0 || burn_in >= n_samples)
    throw std::invalid_argument("HmcConfig: burn_in must be in [0, n_samples)");
}

namespace {

bool all_finite(const std::vector<double>& v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

double kinetic_energy(const std::vector<double>& p) {
  double k = 0.0;
  for (double x : p) k += x * x;
  return 0.5 * k;
}

}  // namespace

LeapfrogResult leapfrog(const PotentialFn& potential, std::vector<double> position,
                        std::vector<double> momentum, double step_size, int n_steps,
                        const std::vector<double>* grad_start) {
  if (n_steps < 1) throw std::invalid_argument("leapfrog: n_steps must be >= 1");
  const std::size_t d = position.size();
  std::vector<double> grad(d, 0.0);

  LeapfrogResult out;
  if (grad_start && grad_start->size() == d) grad = *grad_start;
  else potential(position, grad);
  for (std::size_t i = 0; i < d; ++i) momentum[i] -= 0.5 * step_size * grad[i];
  double u_last = 0.0;
  for (int s = 0; s < n_steps; ++s) {
    for (std::size_t i = 0; i < d; ++i) position[i] += step_size * momentum[i];
    if (!all_finite(position)) {
      out.position = std::move(position);
      out.momentum = std::move(momentum);
      out.finite = false;
      return out;
    }
    u_last = potential(position, grad);
    if (!all_finite(grad)) {
      out.position = std::move(position);
      out.momentum = std::move(momentum);
      out.finite = false;
      return out;
    }
    const double half = (s + 1 == n_steps) ? 0.5 : 1.0;
    for (std::size_t i = 0; i < d; ++i) momentum[i] -= half * step_size * grad[i];
  }
  out.finite = all_finite(position) && all_finite(momentum) && std::isfinite(u_last);
  out.position = std::move(position);
  out.momentum = std::move(momentum);
  out.u_end = u_last;
  out.grad_end = std::move(grad);
  return out;
}

ChainResult hmc_chain(const PotentialFn& potential, const std::vector<double>& q0,
                      const HmcConfig& cfg) {
  cfg.validate();
  const std::size_t d = q0.size();
  Rng rng(cfg.seed);

  std::vector<double> q = q0;
  std::vector<double> grad(d, 0.0);
  double u_current = potential(q, grad);
  if (!std::isfinite(u_current))
    throw std::invalid_argument("hmc_chain: potential non-finite at initial state");

  ChainResult result;
  result.draws.reserve(static_cast<std::size_t>(cfg.n_samples));
  result.energy_trace.reserve(static_cast<std::size_t>(cfg.n_samples));
  int accepted = 0;
  for (int it = 0; it < cfg.n_samples; ++it) {
    std::vector<double> p(d);
    for (double& x : p) x = rng.normal();
    const double k_current = kinetic_energy(p);

    LeapfrogResult traj =
        leapfrog(potential, q, p, cfg.step_size, cfg.leapfrog_steps, &grad);
    const double u_accept = rng.uniform();

    bool accept = false;
    if (traj.finite && std::isfinite(traj.u_end)) {
      const double k_proposed = kinetic_energy(traj.momentum);
      const double dh = (traj.u_end + k_proposed) - (u_current + k_current);
      accept = (dh <= 0.0) || (u_accept < std::exp(-dh));
      if (accept) {
        q = std::move(traj.position);
        u_current = traj.u_end;
        grad = std::move(traj.grad_end);
      }
    }
    if (accept) ++accepted;
    result.draws.push_back(q);
    result.energy_trace.push_back(u_current);
  }
  result.acceptance_rate =
      static_cast<double>(accepted) / static_cast<double>(cfg.n_samples);
  return result;
}

GompertzPotential::GompertzPotential(const LongitudinalSeries& train,
                                     const EnergyConfig& cfg)
    : t0_(train.times.front()),
      sigma_v_(cfg.sigma_v),
      prior_alpha_(cfg.prior_alpha),
      prior_beta_(cfg.prior_beta),
      y0_prior_(cfg.y0_prior),
      infer_sigma_(cfg.infer_sigma_v),
      sigma_v_scale_(cfg.sigma_v_scale) {
  cfg.validate();
  if (train.size() == 0)
    throw std::invalid_argument("GompertzPotential: empty training slice");
  y_ = train.log_volumes;
  dt_.reserve(train.size());
  for (double t : train.times) dt_.push_back(t - t0_);
  if (!std::isfinite(y0_prior_.mean)) y0_prior_.mean = train.log_volumes.front();
}

double GompertzPotential::operator()(const std::vector<double>& xi,
                                     std::vector<double>& grad) const {
  const int d = dim();
  if (xi.size() != static_cast<std::size_t>(d))
    throw std::invalid_argument("GompertzPotential: state dimension mismatch");
  grad.assign(xi.size(), 0.0);

  const double alpha = std::exp(xi[0]);
  const double beta = std::exp(xi[1]);
  const double y0 = xi[2];
  const double kappa = alpha / beta;
  const double sigma = infer_sigma_ ? std::exp(xi[3]) : sigma_v_;
  const double inv_s2 = 1.0 / (sigma * sigma);

  double u = 0.0;
  for (std::size_t i = 0; i < y_.size(); ++i) {
    const double e = std::exp(-beta * dt_[i]);
    const double mean = kappa + (y0 - kappa) * e;
    const double r = mean - y_[i];
    u += 0.5 * r * r * inv_s2;
    // d mean / d xi: xi0 scales alpha, xi1 scales beta, xi2 is y0 itself.
    const double d0 = kappa * (1.0 - e);
    const double d1 = -kappa * (1.0 - e) - beta * dt_[i] * (y0 - kappa) * e;
    grad[0] += r * inv_s2 * d0;
    grad[1] += r * inv_s2 * d1;
    grad[2] += r * inv_s2 * e;
    if (infer_sigma_) grad[3] -= r * r * inv_s2;
  }
  if (infer_sigma_) {
    // Gaussian normalization plus Half-Normal prior on sigma, both in
    // xi3 = log sigma coordinates (Jacobian absorbed).
    const double n = static_cast<double>(y_.size());
    u += n * xi[3];
    grad[3] += n;
    const double s2 = sigma * sigma;
    const double scale2 = sigma_v_scale_ * sigma_v_scale_;
    u += 0.5 * s2 / scale2 - xi[3];
    grad[3] += s2 / scale2 - 1.0;
  }

  const double da = (xi[0] - prior_alpha_.mu) / prior_alpha_.sigma;
  const double db = (xi[1] - prior_beta_.mu) / prior_beta_.sigma;
  const double dy = (xi[2] - y0_prior_.mean) / y0_prior_.sd;
  u += 0.5 * (da * da + db * db + dy * dy);
  grad[0] += da / prior_alpha_.sigma;
  grad[1] += db / prior_beta_.sigma;
  grad[2] += dy / y0_prior_.sd;
  return u;
}

PosteriorSamples sample_posterior_from(const LongitudinalSeries& train,
                                       const std::vector<double>& xi0,
                                       const HmcConfig& hmc, const EnergyConfig& cfg) {
  GompertzPotential pot(train, cfg);
  if (xi0.size() != static_cast<std::size_t>(pot.dim()))
    throw std::invalid_argument("sample_posterior_from: initial state has wrong size");
  PotentialFn fn = [&pot](const std::vector<double>& q, std::vector<double>& g) {
    return pot(q, g);
  };
  ChainResult chain = hmc_chain(fn, xi0, hmc);

  PosteriorSamples out;
  out.acceptance_rate = chain.acceptance_rate;
  out.degenerate = (chain.acceptance_rate == 0.0);
  out.energy_trace = std::move(chain.energy_trace);
  const std::size_t kept = static_cast<std::size_t>(hmc.n_samples - hmc.burn_in);
  out.draws.reserve(kept);
  if (cfg.infer_sigma_v) out.sigma_draws.reserve(kept);
  for (std::size_t i = static_cast<std::size_t>(hmc.burn_in); i < chain.draws.size();
       ++i) {
    const auto& xi = chain.draws[i];
    out.draws.push_back({std::exp(xi[0]), std::exp(xi[1]), xi[2]});
    if (cfg.infer_sigma_v) out.sigma_draws.push_back(std::exp(xi[3]));
  }
  return out;
}

PosteriorSamples sample_posterior(const LongitudinalSeries& train,
                                  const MapResult& map, const HmcConfig& hmc,
                                  const EnergyConfig& cfg) {
  if (!std::isfinite(map.alpha_hat) || !std::isfinite(map.beta_hat) ||
      !std::isfinite(map.y0_hat) || !(map.alpha_hat > 0.0) || !(map.beta_hat > 0.0))
    throw std::invalid_argument("sample_posterior: MAP result not finite");
  std::vector<double> xi0{std::log(map.alpha_hat), std::log(map.beta_hat),
                          map.y0_hat};
  if (cfg.infer_sigma_v) xi0.push_back(std::log(cfg.sigma_v));
  return sample_posterior_from(train, xi0, hmc, cfg);
}

ChainDiagnostics chain_diagnostics(const PosteriorSamples& samples) {
  const std::size_t n = samples.draws.size();
  if (n < 2)
    throw std::invalid_argument("chain_diagnostics: need at least 2 retained samples");
  ChainDiagnostics diag;
  diag.acceptance_rate = samples.acceptance_rate;
  for (int c = 0; c < 3; ++c) {
    double mean = 0.0;
    for (const auto& d : samples.draws) mean += d[static_cast<std::size_t>(c)];
    mean /= static_cast<double>(n);
    double ss = 0.0;
    for (const auto& d : samples.draws) {
      const double r = d[static_cast<std::size_t>(c)] - mean;
      ss += r * r;
    }
    const double var = ss / static_cast<double>(n - 1);
    diag.mean[static_cast<std::size_t>(c)] = mean;
    diag.sd[static_cast<std::size_t>(c)] = std::sqrt(var);
    // a constant chain accumulates only round-off in ss
    const double tiny = 1e-20 * static_cast<double>(n) * (1.0 + mean * mean);
    if (ss > tiny) {
      double num = 0.0;
      for (std::size_t i = 0; i + 1 < n; ++i) {
        num += (samples.draws[i][static_cast<std::size_t>(c)] - mean) *
               (samples.draws[i + 1][static_cast<std::size_t>(c)] - mean);
      }
      diag.lag1[static_cast<std::size_t>(c)] = num / ss;
    } else {
      diag.degenerate = true;
    }
  }
  return diag;
}

}  // namespace bpinn
