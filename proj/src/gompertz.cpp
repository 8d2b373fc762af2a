#include "bpinn/gompertz.hpp"

namespace bpinn {

GompertzParams GompertzParams::make(double alpha, double beta, double y0, double t0) {
  if (!(alpha > 0.0) || !std::isfinite(alpha))
    throw std::invalid_argument("GompertzParams: alpha must be > 0");
  if (!(beta > 0.0) || !std::isfinite(beta))
    throw std::invalid_argument("GompertzParams: beta must be > 0");
  if (!std::isfinite(y0) || !std::isfinite(t0))
    throw std::invalid_argument("GompertzParams: y0 and t0 must be finite");
  if (!std::isfinite(alpha / beta))
    throw std::invalid_argument("GompertzParams: alpha/beta must be finite");
  return GompertzParams{alpha, beta, y0, t0};
}

double closed_form_log(const GompertzParams& p, double t) {
  const double kappa = p.alpha / p.beta;
  return kappa + (p.y0 - kappa) * std::exp(-p.beta * (t - p.t0));
}

double closed_form_volume(const GompertzParams& p, double t) {
  const double y = closed_form_log(p, t);
  if (y > 700.0)
    throw std::range_error("closed_form_volume: log-volume exceeds 700, exp would overflow");
  return std::exp(y);
}

std::vector<double> rk4_log_ode(double alpha, double beta, double y0, double t0,
                                std::span<const double> grid, double step) {
  return rk4_path([alpha, beta](double, double y) { return alpha - beta * y; }, y0,
                  t0, grid, step);
}

std::vector<double> integrate_log_ode(const GompertzParams& p,
                                      std::span<const double> grid, double step) {
  return rk4_log_ode(p.alpha, p.beta, p.y0, p.t0, grid, step);
}

}  // namespace bpinn
