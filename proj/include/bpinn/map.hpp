#pragma once

#include <cstdint>
#include <vector>

#include "bpinn/energy.hpp"

namespace bpinn {

struct MapOptions {
  double learning_rate = 1e-3;
  int epochs = 5000;
  std::uint64_t seed = 42;
  std::vector<int> layer_sizes{1, 64, 64, 64, 1};
};

struct MapResult {
  SurrogateNetwork network;
  TimeNormalizer normalizer{0.0, 1.0};
  double alpha_hat = 0.0;
  double beta_hat = 0.0;
  double y0_hat = 0.0;  // network output at t0 (first training time)
  double final_energy = 0.0;
  std::vector<double> energy_trace;  // energy before each epoch's update
};

/// Full-batch Adam (beta1 0.9, beta2 0.999, eps 1e-8) on the joint vector
/// (network parameters, raw kinetics). Requires >= 2 training observations.
/// Throws DivergenceError carrying the epoch index if the energy becomes
/// non-finite. Deterministic for a fixed seed.
MapResult map_fit(const LongitudinalSeries& train, const EnergyConfig& cfg,
                  const MapOptions& opt);

}  // namespace bpinn
