#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <optional>
#include <vector>

#include "bpinn/energy.hpp"
#include "bpinn/map.hpp"
#include "bpinn/series.hpp"

namespace bpinn {

struct HmcConfig {
  double step_size = 0.01;
  int leapfrog_steps = 20;
  int n_samples = 400;
  int burn_in = 100;
  std::uint64_t seed = 42;

  void validate() const;
};

/// Potential evaluated at q; fills grad (resized by the callee) and returns U.
using PotentialFn =
    std::function<double(const std::vector<double>&, std::vector<double>&)>;

struct LeapfrogResult {
  std::vector<double> position;
  std::vector<double> momentum;
  bool finite = true;  // false if the trajectory left the finite domain
  double u_end = 0.0;  // potential at the final position (when finite)
  std::vector<double> grad_end;
};

/// Standard kick-drift-kick integrator with identity mass matrix. The
/// potential and its gradient at the final position are returned so callers
/// can accept without re-evaluating; grad_start, when given, must be the
/// gradient at the starting position and skips the initial evaluation.
LeapfrogResult leapfrog(const PotentialFn& potential, std::vector<double> position,
                        std::vector<double> momentum, double step_size, int n_steps,
                        const std::vector<double>* grad_start = nullptr);

struct ChainResult {
  std::vector<std::vector<double>> draws;  // one row per iteration, all kept
  double acceptance_rate = 0.0;
  std::vector<double> energy_trace;  // U after each iteration
};

/// Metropolis-corrected HMC chain of n_samples iterations starting at q0.
/// The correction is applied throughout, burn-in included; non-finite
/// trajectories count as rejections.
ChainResult hmc_chain(const PotentialFn& potential, const std::vector<double>& q0,
                      const HmcConfig& cfg);

/// Retained posterior draws in constrained space.
struct PosteriorSamples {
  std::vector<std::array<double, 3>> draws;  // (alpha, beta, y0)
  std::vector<double> sigma_draws;           // per-draw sigma_v when inferred
  double acceptance_rate = 0.0;
  std::vector<double> energy_trace;
  bool degenerate = false;  // no proposal accepted over the whole chain
};

/// Negative log posterior over xi = (log alpha, log beta, y0) with the
/// closed-form trajectory as the mean function; analytic gradient. With
/// cfg.infer_sigma_v a fourth coordinate log sigma_v is added (Half-Normal
/// prior on sigma_v).
class GompertzPotential {
 public:
  GompertzPotential(const LongitudinalSeries& train, const EnergyConfig& cfg);

  int dim() const { return infer_sigma_ ? 4 : 3; }
  double t0() const { return t0_; }

  double operator()(const std::vector<double>& xi, std::vector<double>& grad) const;

 private:
  std::vector<double> dt_;  // observation times relative to t0
  std::vector<double> y_;   // observed log-volumes
  double t0_;
  double sigma_v_;
  LogNormalPrior prior_alpha_, prior_beta_;
  GaussianPrior y0_prior_;
  bool infer_sigma_;
  double sigma_v_scale_;
};

/// HMC over xi starting from an explicit initial state.
PosteriorSamples sample_posterior_from(const LongitudinalSeries& train,
                                       const std::vector<double>& xi0,
                                       const HmcConfig& hmc, const EnergyConfig& cfg);

/// HMC over xi initialized at the MAP solution (log alpha_hat, log beta_hat,
/// y0_hat).
PosteriorSamples sample_posterior(const LongitudinalSeries& train,
                                  const MapResult& map, const HmcConfig& hmc,
                                  const EnergyConfig& cfg);

struct ChainDiagnostics {
  double acceptance_rate = 0.0;
  std::array<double, 3> mean{};
  std::array<double, 3> sd{};
  std::array<std::optional<double>, 3> lag1;  // empty when a coordinate is constant
  bool degenerate = false;
};

/// Summary of the retained draws; requires >= 2 of them.
ChainDiagnostics chain_diagnostics(const PosteriorSamples& samples);

}  // namespace bpinn
