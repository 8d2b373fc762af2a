#pragma once

#include <cmath>
#include <limits>
#include <span>
#include <vector>

#include "bpinn/network.hpp"
#include "bpinn/series.hpp"
#include "bpinn/simulate.hpp"

namespace bpinn {

/// Scales, weights and priors of the three-term training energy
///   E = w_d * L_data + w_p * L_phys + w_r * L_prior.
/// L_data sums squared log-residuals over observations, scaled by
/// 1/(2 sigma_d^2). L_phys aggregates squared dynamics residuals
/// r(t) = dy/dt - (alpha - beta y) over the collocation grid, scaled by
/// 1/(2 sigma_p^2); `physics_mean` switches the default plain-sum
/// aggregation to a mean over collocation points. L_prior is ||theta||^2 / (2 sigma_w^2) plus Gaussian
/// penalties on (log alpha, log beta) matching the sampling-stage priors.
struct EnergyConfig {
  double sigma_d = 0.2;
  double sigma_p = 0.5;
  double sigma_w = 10.0;
  double weight_data = 1.0;
  double weight_phys = 1.0;
  double weight_prior = 1.0;
  int n_collocation = 200;
  bool physics_mean = false;
  LogNormalPrior prior_alpha{std::log(0.2), 0.5};
  LogNormalPrior prior_beta{std::log(0.05), 0.5};
  /// Prior on the latent log-volume at t0, used by the sampling stage.
  /// A non-finite mean stands for "center at the first observed log-volume".
  GaussianPrior y0_prior{std::numeric_limits<double>::quiet_NaN(), 1.0};
  /// Observation-noise scale of the sampling-stage likelihood.
  double sigma_v = 0.2;
  /// When true the sampler treats log sigma_v as a fourth coordinate with a
  /// Half-Normal prior of scale sigma_v_scale on sigma_v.
  bool infer_sigma_v = false;
  double sigma_v_scale = 0.5;

  void validate() const;
};

/// n uniformly spaced points spanning [t_min, t_max] inclusive; n >= 2.
std::vector<double> collocation_grid(double t_min, double t_max, int n);

struct EnergyTerms {
  double data = 0.0;
  double physics = 0.0;
  double prior = 0.0;
  double total() const { return data + physics + prior; }
};

/// Gradient container shaped like a network plus the two raw kinetics.
struct EnergyGradient {
  std::vector<SurrogateNetwork::Layer> layers;  // w/b hold the gradients
  double raw_alpha = 0.0;
  double raw_beta = 0.0;

  void match_shape(const SurrogateNetwork& net);
  void set_zero();
};

/// Batched evaluator for one training slice. Holds the collocation grid, the
/// normalizer and scratch buffers; the heavy loops run over all observation
/// and collocation points at once.
class EnergyEvaluator {
 public:
  EnergyEvaluator(const LongitudinalSeries& train, const EnergyConfig& cfg);

  const TimeNormalizer& normalizer() const { return norm_; }
  std::span<const double> collocation() const { return colloc_; }
  const EnergyConfig& config() const { return cfg_; }

  EnergyTerms energy(const SurrogateNetwork& net, const KineticReparam& kin);

  /// Total energy and its exact gradient with respect to every network
  /// parameter and the raw kinetics (reverse accumulation through the
  /// value-and-tangent forward pass).
  double energy_grad(const SurrogateNetwork& net, const KineticReparam& kin,
                     EnergyGradient& grad);

 private:
  void ensure_buffers(const SurrogateNetwork& net);
  void forward_batch(const SurrogateNetwork& net);

  EnergyConfig cfg_;
  TimeNormalizer norm_;
  std::vector<double> obs_y_;      // observed log-volumes
  std::vector<double> colloc_;     // raw collocation times
  std::vector<double> points_;     // normalized times, obs first then colloc
  std::size_t n_obs_ = 0;

  // batch buffers, one row per point
  std::vector<std::vector<double>> a_;     // activations per layer
  std::vector<std::vector<double>> adot_;  // tangents per layer
  std::vector<std::vector<double>> zdot_;  // pre-activation tangents
  std::vector<double> y_, ydot_;           // outputs
  std::vector<double> ybar_, ydotbar_;     // output adjoints
  std::vector<std::vector<double>> abar_, adotbar_, zbar_, zdotbar_;
  std::vector<std::vector<double>> wt_;  // transposed weights, rebuilt per pass
  std::vector<double> z_scratch_;
  std::vector<int> shape_;  // layer sizes the buffers were built for
};

/// One-off convenience wrapper around EnergyEvaluator::energy.
EnergyTerms total_energy(const SurrogateNetwork& net, const KineticReparam& kin,
                         const LongitudinalSeries& train, const EnergyConfig& cfg);

/// Writes the gradient in flatten_into order followed by (raw_alpha, raw_beta).
/// `out` must have param_count() + 2 entries.
void flatten_gradient(const EnergyGradient& grad, std::span<double> out);

}  // namespace bpinn
