#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "bpinn/hmc.hpp"
#include "bpinn/rng.hpp"
#include "bpinn/series.hpp"

namespace bpinn {

/// Gaussian process regression on log-volumes over raw time with a
/// squared-exponential kernel and constant mean (training mean). All three
/// hyperparameters live in log space: eta = (log sf, log ell, log sn).
struct GpModel {
  std::vector<double> train_t;
  std::vector<double> train_y;  // raw log-volumes
  double y_mean = 0.0;          // constant mean subtracted before regression
  std::array<double, 3> eta{0.0, 0.0, 0.0};

  double signal_sd() const { return std::exp(eta[0]); }
  double length_scale() const { return std::exp(eta[1]); }
  double noise_sd() const { return std::exp(eta[2]); }
};

inline constexpr double kGpJitter = 1e-8;

/// Negative log marginal likelihood; fills grad (d/d eta) when non-null.
/// Throws FitFailureError if the kernel matrix cannot be factorized even
/// after jitter escalation up to 1e-4.
double gp_neg_log_marginal(const GpModel& model, std::array<double, 3>* grad);

/// Type-II maximum likelihood with multi-start Adam in log-hyperparameter
/// space (a heuristic start plus 8 seeded perturbations).
GpModel fit_pure_gp(const LongitudinalSeries& train, std::uint64_t seed);

struct GpPrediction {
  std::vector<double> mean;
  std::vector<double> var;  // latent-function variance, noise excluded
};

GpPrediction gp_predict(const GpModel& model, std::span<const double> times);

/// One joint draw of the latent function at `times` (posterior mean plus a
/// correlated Gaussian perturbation via Cholesky of the posterior covariance,
/// jitter-escalated).
std::vector<double> gp_sample_function(const GpModel& model,
                                       std::span<const double> times, Rng& rng);

struct BayesianGpFit {
  std::vector<std::array<double, 3>> eta_draws;  // retained hyperparameter draws
  double acceptance_rate = 0.0;
  GpModel base;  // pure-GP optimum the priors are centered on
};

/// HMC over eta with independent Gaussian priors N(eta_hat, prior_sd^2).
BayesianGpFit fit_bayesian_gp(const LongitudinalSeries& train, const HmcConfig& hmc,
                              std::uint64_t seed, double prior_sd = 1.0);

}  // namespace bpinn
