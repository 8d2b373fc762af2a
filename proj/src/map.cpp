#include "bpinn/map.hpp"

#include <cmath>
#include <numeric>
#include <stdexcept>

#include "bpinn/errors.hpp"

namespace bpinn {

MapResult map_fit(const LongitudinalSeries& train, const EnergyConfig& cfg,
                  const MapOptions& opt) {
  if (train.size() < 2)
    throw std::invalid_argument(
        "map_fit: unfit series, need at least 2 training observations");
  if (opt.epochs < 0) throw std::invalid_argument("map_fit: epochs must be >= 0");
  if (!(opt.learning_rate >= 0.0))
    throw std::invalid_argument("map_fit: learning rate must be >= 0");

  EnergyEvaluator eval(train, cfg);
  SurrogateNetwork net = SurrogateNetwork::create(opt.layer_sizes, opt.seed);
  // Warm-start the output bias at the mean training log-volume so the
  // optimizer spends its budget on shape rather than level.
  const double y_mean = std::accumulate(train.log_volumes.begin(),
                                        train.log_volumes.end(), 0.0) /
                        static_cast<double>(train.size());
  net.layers.back().b[0] = y_mean;

  KineticReparam kin = KineticReparam::from_values(cfg.prior_alpha.median(),
                                                   cfg.prior_beta.median());

  const int n_net = net.param_count();
  const int n = n_net + 2;
  std::vector<double> x(static_cast<std::size_t>(n));
  net.flatten_into({x.data(), static_cast<std::size_t>(n_net)});
  x[static_cast<std::size_t>(n_net)] = kin.raw_alpha;
  x[static_cast<std::size_t>(n_net) + 1] = kin.raw_beta;

  std::vector<double> g(static_cast<std::size_t>(n), 0.0);
  std::vector<double> m(static_cast<std::size_t>(n), 0.0);
  std::vector<double> v(static_cast<std::size_t>(n), 0.0);
  EnergyGradient grad;
  grad.match_shape(net);

  constexpr double beta1 = 0.9;
  constexpr double beta2 = 0.999;
  constexpr double eps = 1e-8;

  MapResult result;
  result.energy_trace.reserve(static_cast<std::size_t>(opt.epochs));
  double b1t = 1.0;
  double b2t = 1.0;
  for (int epoch = 0; epoch < opt.epochs; ++epoch) {
    net.unflatten_from({x.data(), static_cast<std::size_t>(n_net)});
    kin.raw_alpha = x[static_cast<std::size_t>(n_net)];
    kin.raw_beta = x[static_cast<std::size_t>(n_net) + 1];
    const double energy = eval.energy_grad(net, kin, grad);
    if (!std::isfinite(energy))
      throw DivergenceError("map_fit: non-finite energy at epoch " +
                                std::to_string(epoch),
                            epoch);
    result.energy_trace.push_back(energy);
    flatten_gradient(grad, {g.data(), g.size()});

    b1t *= beta1;
    b2t *= beta2;
    const double mhat_scale = 1.0 / (1.0 - b1t);
    const double vhat_scale = 1.0 / (1.0 - b2t);
    for (std::size_t i = 0; i < x.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * g[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * g[i] * g[i];
      x[i] -= opt.learning_rate * (m[i] * mhat_scale) /
              (std::sqrt(v[i] * vhat_scale) + eps);
    }
  }

  net.unflatten_from({x.data(), static_cast<std::size_t>(n_net)});
  kin.raw_alpha = x[static_cast<std::size_t>(n_net)];
  kin.raw_beta = x[static_cast<std::size_t>(n_net) + 1];
  const double final_energy = eval.energy(net, kin).total();
  if (!std::isfinite(final_energy))
    throw DivergenceError("map_fit: non-finite final energy", opt.epochs);

  result.normalizer = eval.normalizer();
  result.alpha_hat = kin.alpha();
  result.beta_hat = kin.beta();
  result.y0_hat = forward(net, result.normalizer, train.times.front());
  result.final_energy = final_energy;
  result.network = std::move(net);
  return result;
}

}  // namespace bpinn
