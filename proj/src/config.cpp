#include "bpinn/config.hpp"

#include <stdexcept>

namespace bpinn {

std::string method_name(Method m) {
  switch (m) {
    case Method::proposed: return "proposed";
    case Method::pinn_bayesian: return "pinn_bayesian";
    case Method::pure_pinn: return "pure_pinn";
    case Method::gompertz_bayesian: return "gompertz_bayesian";
    case Method::bayesian_gp: return "bayesian_gp";
    case Method::pure_gp: return "pure_gp";
    case Method::pure_gompertz: return "pure_gompertz";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : all_methods())
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown method: " + name);
}

const std::vector<Method>& all_methods() {
  static const std::vector<Method> methods{
      Method::proposed,          Method::pinn_bayesian, Method::pure_pinn,
      Method::gompertz_bayesian, Method::bayesian_gp,   Method::pure_gp,
      Method::pure_gompertz};
  return methods;
}

void RunConfig::validate() const {
  energy.validate();
  hmc.validate();
  if (grid_points < 2)
    throw std::invalid_argument("RunConfig: grid_points must be >= 2");
  if (!(horizon_factor >= 0.0))
    throw std::invalid_argument("RunConfig: horizon_factor must be >= 0");
  if (train_count < 2)
    throw std::invalid_argument("RunConfig: train_count must be >= 2");
  if (map.epochs < 0) throw std::invalid_argument("RunConfig: epochs must be >= 0");
  if (!(map.learning_rate >= 0.0))
    throw std::invalid_argument("RunConfig: learning rate must be >= 0");
  if (methods.empty())
    throw std::invalid_argument("RunConfig: at least one method required");
}

}  // namespace bpinn
