#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

namespace bpinn {

/// Gompertz kinetics in the log-volume domain: dy/dt = alpha - beta * y with
/// initial condition y(t0) = y0. The log-space carrying capacity is
/// alpha / beta; in the volume domain the same dynamics read
/// dV/dt = alpha * V - beta * V * log V.
struct GompertzParams {
  double alpha;  // 1/day, > 0
  double beta;   // 1/day, > 0
  double y0;     // log mm^3 at t0
  double t0;     // days

  static GompertzParams make(double alpha, double beta, double y0, double t0);

  double log_capacity() const { return alpha / beta; }
};

/// y(t) = a/b + (y0 - a/b) exp(-b (t - t0)); total over all real t.
double closed_form_log(const GompertzParams& p, double t);

/// exp of closed_form_log; throws std::range_error when the log-volume
/// exceeds 700 (exp would overflow).
double closed_form_volume(const GompertzParams& p, double t);

/// Classical fixed-step RK4 sampled on an ascending grid. Between grid points
/// the integrator takes ceil(dt / max_step) equal sub-steps, so every grid
/// time is hit exactly.
template <typename Rhs>
std::vector<double> rk4_path(Rhs&& rhs, double y0, double t0,
                             std::span<const double> grid, double max_step) {
  if (max_step <= 0.0) throw std::invalid_argument("rk4_path: step must be > 0");
  if (!grid.empty() && grid.front() < t0)
    throw std::invalid_argument("rk4_path: grid must start at or after t0");
  for (std::size_t i = 1; i < grid.size(); ++i)
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("rk4_path: grid must be strictly ascending");

  std::vector<double> out;
  out.reserve(grid.size());
  double t = t0;
  double y = y0;
  for (double target : grid) {
    const double dt = target - t;
    if (dt > 0.0) {
      const long n = static_cast<long>(std::ceil(dt / max_step));
      const double h = dt / static_cast<double>(n);
      for (long s = 0; s < n; ++s) {
        const double k1 = rhs(t, y);
        const double k2 = rhs(t + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = rhs(t + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = rhs(t + h, y + h * k3);
        y += (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        t += h;
      }
      t = target;  // kill accumulated round-off in t
    }
    out.push_back(y);
  }
  return out;
}

/// RK4 solution of dy/dt = alpha - beta * y. Raw entry point: does not
/// require positivity, so degenerate dynamics (beta = 0) can be integrated.
std::vector<double> rk4_log_ode(double alpha, double beta, double y0, double t0,
                                std::span<const double> grid, double step);

/// RK4 oracle for validated parameters.
std::vector<double> integrate_log_ode(const GompertzParams& p,
                                      std::span<const double> grid, double step);

}  // namespace bpinn
