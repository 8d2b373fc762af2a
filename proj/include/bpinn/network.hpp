#pragma once

#include <cstdint>
#include <span>
#include <vector>

namespace bpinn {

/// Affine map of the training window [t_min, t_max] onto [0, 1].
struct TimeNormalizer {
  double t_min;
  double t_max;

  static TimeNormalizer make(double t_min, double t_max);
  static TimeNormalizer fit(std::span<const double> times);

  double normalize(double t) const { return (t - t_min) / (t_max - t_min); }
  /// d(normalized)/dt, the chain-rule factor for raw-time derivatives.
  double scale() const { return 1.0 / (t_max - t_min); }
};

/// softplus(x) = log(1 + exp(x)), linear asymptote used above 30 so the
/// function stays finite and monotone for all doubles.
double softplus(double x);
double softplus_inv(double y);
double sigmoid(double x);

/// Unconstrained kinetic parameters; softplus maps them to (0, inf).
struct KineticReparam {
  double raw_alpha = 0.0;
  double raw_beta = 0.0;

  static KineticReparam from_values(double alpha, double beta);

  double alpha() const { return softplus(raw_alpha); }
  double beta() const { return softplus(raw_beta); }
};

/// Fully connected scalar-to-scalar network, tanh hidden activations and a
/// linear output. Default architecture 1-64-64-64-1.
struct SurrogateNetwork {
  struct Layer {
    int in = 0;
    int out = 0;
    std::vector<double> w;  // out x in, row-major
    std::vector<double> b;  // out
  };

  std::vector<int> layer_sizes;
  std::vector<Layer> layers;

  /// Seeded initialization: weights uniform in +/- sqrt(6 / (fan_in + fan_out)),
  /// biases zero. Sizes must start and end with 1.
  static SurrogateNetwork create(std::vector<int> sizes, std::uint64_t seed);

  int param_count() const;
  void flatten_into(std::span<double> out) const;
  void unflatten_from(std::span<const double> in);
};

/// Network output at raw time t.
double forward(const SurrogateNetwork& net, const TimeNormalizer& norm, double t);

struct ValueAndSlope {
  double value;  // y(t)
  double slope;  // dy/dt in raw-time units
};

/// Forward pass carrying a dual (tangent) component w.r.t. raw time; exact.
ValueAndSlope forward_with_slope(const SurrogateNetwork& net,
                                 const TimeNormalizer& norm, double t);

/// dy/dt at raw time t (the slope component of forward_with_slope).
double time_derivative(const SurrogateNetwork& net, const TimeNormalizer& norm,
                       double t);

}  // namespace bpinn
