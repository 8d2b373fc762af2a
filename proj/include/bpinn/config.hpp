#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "bpinn/energy.hpp"
#include "bpinn/hmc.hpp"
#include "bpinn/map.hpp"

namespace bpinn {

enum class Method {
  proposed,           // surrogate MAP + kinetic-space HMC
  pinn_bayesian,      // HMC over the full parameter vector
  pure_pinn,          // MAP without priors, network extrapolation
  gompertz_bayesian,  // kinetic-space HMC from a least-squares start
  bayesian_gp,
  pure_gp,
  pure_gompertz,
};

std::string method_name(Method m);
Method parse_method(const std::string& name);  // throws on unknown name
const std::vector<Method>& all_methods();

/// Run-level settings shared by the library pipeline and the CLI. The file
/// representation (JSON) lives in io.hpp; unknown keys there are rejected.
struct RunConfig {
  EnergyConfig energy;
  HmcConfig hmc;
  MapOptions map;
  int grid_points = 200;
  double horizon_factor = 0.5;  // grid extends this fraction past the last visit
  int train_count = 2;          // temporal split: first train_count points train
  std::uint64_t seed = 42;
  std::vector<Method> methods{Method::proposed};

  void validate() const;
};

}  // namespace bpinn
