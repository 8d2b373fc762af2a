#include "bpinn/network.hpp"

#include <cmath>
#include <stdexcept>

#include "bpinn/rng.hpp"

namespace bpinn {

TimeNormalizer TimeNormalizer::make(double t_min, double t_max) {
  if (!(t_max > t_min))
    throw std::invalid_argument("TimeNormalizer: t_max must exceed t_min");
  return TimeNormalizer{t_min, t_max};
}

TimeNormalizer TimeNormalizer::fit(std::span<const double> times) {
  if (times.size() < 2)
    throw std::invalid_argument("TimeNormalizer: need at least 2 times");
  return make(times.front(), times.back());
}

double softplus(double x) {
  if (x > 30.0) return x;
  return std::log1p(std::exp(x));
}

double softplus_inv(double y) {
  if (!(y > 0.0)) throw std::invalid_argument("softplus_inv: argument must be > 0");
  if (y > 30.0) return y;
  return std::log(std::expm1(y));
}

double sigmoid(double x) {
  if (x >= 0.0) return 1.0 / (1.0 + std::exp(-x));
  const double e = std::exp(x);
  return e / (1.0 + e);
}

KineticReparam KineticReparam::from_values(double alpha, double beta) {
  return KineticReparam{softplus_inv(alpha), softplus_inv(beta)};
}

SurrogateNetwork SurrogateNetwork::create(std::vector<int> sizes, std::uint64_t seed) {
  if (sizes.size() < 2 || sizes.front() != 1 || sizes.back() != 1)
    throw std::invalid_argument("SurrogateNetwork: sizes must run from 1 to 1");
  for (int s : sizes)
    if (s < 1) throw std::invalid_argument("SurrogateNetwork: layer sizes must be >= 1");

  SurrogateNetwork net;
  net.layer_sizes = std::move(sizes);
  Rng rng(seed);
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    Layer layer;
    layer.in = net.layer_sizes[l];
    layer.out = net.layer_sizes[l + 1];
    const double bound = std::sqrt(6.0 / (layer.in + layer.out));
    layer.w.resize(static_cast<std::size_t>(layer.in) * layer.out);
    for (double& w : layer.w) w = rng.uniform(-bound, bound);
    layer.b.assign(static_cast<std::size_t>(layer.out), 0.0);
    net.layers.push_back(std::move(layer));
  }
  return net;
}

int SurrogateNetwork::param_count() const {
  int n = 0;
  for (const Layer& l : layers) n += l.out * l.in + l.out;
  return n;
}

void SurrogateNetwork::flatten_into(std::span<double> out) const {
  std::size_t k = 0;
  for (const Layer& l : layers) {
    for (double w : l.w) out[k++] = w;
    for (double b : l.b) out[k++] = b;
  }
  if (k != out.size())
    throw std::invalid_argument("flatten_into: destination size mismatch");
}

void SurrogateNetwork::unflatten_from(std::span<const double> in) {
  std::size_t k = 0;
  for (Layer& l : layers) {
    for (double& w : l.w) w = in[k++];
    for (double& b : l.b) b = in[k++];
  }
  if (k != in.size())
    throw std::invalid_argument("unflatten_from: source size mismatch");
}

ValueAndSlope forward_with_slope(const SurrogateNetwork& net,
                                 const TimeNormalizer& norm, double t) {
  std::vector<double> a{norm.normalize(t)};
  std::vector<double> ad{norm.scale()};
  std::vector<double> next_a, next_ad;
  const std::size_t n_layers = net.layers.size();
  for (std::size_t l = 0; l < n_layers; ++l) {
    const auto& layer = net.layers[l];
    next_a.assign(static_cast<std::size_t>(layer.out), 0.0);
    next_ad.assign(static_cast<std::size_t>(layer.out), 0.0);
    for (int o = 0; o < layer.out; ++o) {
      double z = layer.b[static_cast<std::size_t>(o)];
      double zd = 0.0;
      const double* wrow = layer.w.data() + static_cast<std::size_t>(o) * layer.in;
      for (int i = 0; i < layer.in; ++i) {
        z += wrow[i] * a[static_cast<std::size_t>(i)];
        zd += wrow[i] * ad[static_cast<std::size_t>(i)];
      }
      if (l + 1 < n_layers) {
        const double h = std::tanh(z);
        next_a[static_cast<std::size_t>(o)] = h;
        next_ad[static_cast<std::size_t>(o)] = (1.0 - h * h) * zd;
      } else {
        next_a[static_cast<std::size_t>(o)] = z;
        next_ad[static_cast<std::size_t>(o)] = zd;
      }
    }
    a.swap(next_a);
    ad.swap(next_ad);
  }
  return ValueAndSlope{a[0], ad[0]};
}

double forward(const SurrogateNetwork& net, const TimeNormalizer& norm, double t) {
  return forward_with_slope(net, norm, t).value;
}

double time_derivative(const SurrogateNetwork& net, const TimeNormalizer& norm,
                       double t) {
  return forward_with_slope(net, norm, t).slope;
}

}  // namespace bpinn
