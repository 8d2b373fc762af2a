#include "bpinn/energy.hpp"

#include <cmath>
#include <stdexcept>

#include "fast_math.hpp"

namespace bpinn {

void EnergyConfig::validate() const {
  if (!(sigma_d > 0.0) || !(sigma_p > 0.0) || !(sigma_v > 0.0))
    throw std::invalid_argument("EnergyConfig: scales must be positive");
  if (!(sigma_w > 0.0))  // +inf allowed: disables the weight prior
    throw std::invalid_argument("EnergyConfig: sigma_w must be positive");
  if (n_collocation < 2)
    throw std::invalid_argument("EnergyConfig: n_collocation must be >= 2");
  if (weight_data < 0.0 || weight_phys < 0.0 || weight_prior < 0.0)
    throw std::invalid_argument("EnergyConfig: term weights must be >= 0");
  if (!(prior_alpha.sigma > 0.0) || !(prior_beta.sigma > 0.0) || !(y0_prior.sd > 0.0))
    throw std::invalid_argument("EnergyConfig: prior scales must be positive");
  if (infer_sigma_v && !(sigma_v_scale > 0.0))
    throw std::invalid_argument("EnergyConfig: sigma_v_scale must be positive");
}

std::vector<double> collocation_grid(double t_min, double t_max, int n) {
  if (!(t_max > t_min))
    throw std::invalid_argument("collocation_grid: degenerate interval");
  if (n < 2) throw std::invalid_argument("collocation_grid: n must be >= 2");
  std::vector<double> grid(static_cast<std::size_t>(n));
  const double h = (t_max - t_min) / (n - 1);
  for (int i = 0; i < n; ++i) grid[static_cast<std::size_t>(i)] = t_min + h * i;
  grid.back() = t_max;
  return grid;
}

void EnergyGradient::match_shape(const SurrogateNetwork& net) {
  layers.resize(net.layers.size());
  for (std::size_t l = 0; l < net.layers.size(); ++l) {
    layers[l].in = net.layers[l].in;
    layers[l].out = net.layers[l].out;
    layers[l].w.assign(net.layers[l].w.size(), 0.0);
    layers[l].b.assign(net.layers[l].b.size(), 0.0);
  }
  raw_alpha = 0.0;
  raw_beta = 0.0;
}

void EnergyGradient::set_zero() {
  for (auto& l : layers) {
    std::fill(l.w.begin(), l.w.end(), 0.0);
    std::fill(l.b.begin(), l.b.end(), 0.0);
  }
  raw_alpha = 0.0;
  raw_beta = 0.0;
}

EnergyEvaluator::EnergyEvaluator(const LongitudinalSeries& train,
                                 const EnergyConfig& cfg)
    : cfg_(cfg), norm_(TimeNormalizer::fit(train.times)) {
  cfg_.validate();
  if (train.size() == 0)
    throw std::invalid_argument("EnergyEvaluator: empty training slice");
  obs_y_ = train.log_volumes;
  n_obs_ = train.size();
  colloc_ = collocation_grid(train.times.front(), train.times.back(),
                             cfg_.n_collocation);
  points_.reserve(n_obs_ + colloc_.size());
  for (double t : train.times) points_.push_back(norm_.normalize(t));
  for (double t : colloc_) points_.push_back(norm_.normalize(t));
}

void EnergyEvaluator::ensure_buffers(const SurrogateNetwork& net) {
  if (shape_ == net.layer_sizes && !a_.empty()) return;
  shape_ = net.layer_sizes;
  const std::size_t P = points_.size();
  const std::size_t depth = net.layers.size();  // hidden count + output layer
  a_.assign(depth, {});
  adot_.assign(depth, {});
  zdot_.assign(depth, {});
  abar_.assign(depth, {});
  adotbar_.assign(depth, {});
  zbar_.assign(depth, {});
  zdotbar_.assign(depth, {});
  std::size_t widest = 1;
  for (std::size_t k = 0; k < depth; ++k) {
    const std::size_t w = static_cast<std::size_t>(net.layer_sizes[k]);
    widest = std::max(widest, static_cast<std::size_t>(net.layer_sizes[k + 1]));
    a_[k].assign(P * w, 0.0);
    adot_[k].assign(P * w, 0.0);
    zdot_[k].assign(P * w, 0.0);
    abar_[k].assign(P * w, 0.0);
    adotbar_[k].assign(P * w, 0.0);
    zbar_[k].assign(P * w, 0.0);
    zdotbar_[k].assign(P * w, 0.0);
  }
  z_scratch_.assign(P * widest, 0.0);
  wt_.assign(depth, {});
  for (std::size_t l = 0; l < depth; ++l)
    wt_[l].assign(net.layers[l].w.size(), 0.0);
  y_.assign(P, 0.0);
  ydot_.assign(P, 0.0);
  ybar_.assign(P, 0.0);
  ydotbar_.assign(P, 0.0);
}

// Value-and-tangent pass for every point at once. a_[k]/adot_[k] hold the
// inputs of layer k; hidden activations are tanh, the output layer is linear.
// The accumulation runs over a transposed weight copy so every inner loop is
// a contiguous axpy, which vectorizes without reassociating reductions.
void EnergyEvaluator::forward_batch(const SurrogateNetwork& net) {
  ensure_buffers(net);
  const std::size_t P = points_.size();
  const double dscale = norm_.scale();
  for (std::size_t p = 0; p < P; ++p) {
    a_[0][p] = points_[p];
    adot_[0][p] = dscale;
  }
  const std::size_t depth = net.layers.size();
  for (std::size_t l = 0; l < depth; ++l) {
    const auto& layer = net.layers[l];
    const std::size_t in = static_cast<std::size_t>(layer.in);
    const std::size_t out = static_cast<std::size_t>(layer.out);
    const bool last = (l + 1 == depth);

    double* wt = wt_[l].data();
    for (std::size_t o = 0; o < out; ++o)
      for (std::size_t i = 0; i < in; ++i) wt[i * out + o] = layer.w[o * in + i];

    const double* A = a_[l].data();
    const double* Ad = adot_[l].data();
    double* Z = last ? y_.data() : z_scratch_.data();
    double* Zd = last ? ydot_.data() : zdot_[l + 1].data();
    constexpr std::size_t kChunk = 32;
    if (out % kChunk == 0) {
      // register-blocked accumulation over output chunks
      for (std::size_t p = 0; p < P; ++p) {
        const double* arow = A + p * in;
        const double* adrow = Ad + p * in;
        double* zrow = Z + p * out;
        double* zdrow = Zd + p * out;
        for (std::size_t oc = 0; oc < out; oc += kChunk) {
          double az[kChunk], azd[kChunk];
          for (std::size_t c = 0; c < kChunk; ++c) {
            az[c] = layer.b[oc + c];
            azd[c] = 0.0;
          }
          for (std::size_t i = 0; i < in; ++i) {
            const double a = arow[i];
            const double ad = adrow[i];
            const double* wrow = wt + i * out + oc;
            for (std::size_t c = 0; c < kChunk; ++c) {
              az[c] += a * wrow[c];
              azd[c] += ad * wrow[c];
            }
          }
          for (std::size_t c = 0; c < kChunk; ++c) {
            zrow[oc + c] = az[c];
            zdrow[oc + c] = azd[c];
          }
        }
      }
    } else {
      for (std::size_t p = 0; p < P; ++p) {
        double* zrow = Z + p * out;
        double* zdrow = Zd + p * out;
        for (std::size_t o = 0; o < out; ++o) {
          zrow[o] = layer.b[o];
          zdrow[o] = 0.0;
        }
        const double* arow = A + p * in;
        const double* adrow = Ad + p * in;
        for (std::size_t i = 0; i < in; ++i) {
          const double a = arow[i];
          const double ad = adrow[i];
          const double* wtrow = wt + i * out;
          for (std::size_t o = 0; o < out; ++o) {
            zrow[o] += a * wtrow[o];
            zdrow[o] += ad * wtrow[o];
          }
        }
      }
    }
    if (!last) {
      double* Anext = a_[l + 1].data();
      double* Adnext = adot_[l + 1].data();
      for (std::size_t k = 0; k < P * out; ++k) {
        const double h = detail::fast_tanh(Z[k]);
        Anext[k] = h;
        Adnext[k] = (1.0 - h * h) * Zd[k];
      }
    }
  }
}

namespace {

struct TermValues {
  double data = 0.0;
  double physics = 0.0;
  double prior_kinetic = 0.0;
};

double theta_sq_norm(const SurrogateNetwork& net) {
  double s = 0.0;
  for (const auto& l : net.layers) {
    for (double w : l.w) s += w * w;
    for (double b : l.b) s += b * b;
  }
  return s;
}

}  // namespace

EnergyTerms EnergyEvaluator::energy(const SurrogateNetwork& net,
                                    const KineticReparam& kin) {
  forward_batch(net);
  const double alpha = kin.alpha();
  const double beta = kin.beta();
  const std::size_t P = points_.size();
  const std::size_t n_col = P - n_obs_;

  EnergyTerms terms;
  for (std::size_t p = 0; p < n_obs_; ++p) {
    const double r = y_[p] - obs_y_[p];
    terms.data += r * r;
  }
  terms.data *= cfg_.weight_data / (2.0 * cfg_.sigma_d * cfg_.sigma_d);

  double phys = 0.0;
  for (std::size_t p = n_obs_; p < P; ++p) {
    const double r = ydot_[p] - (alpha - beta * y_[p]);
    phys += r * r;
  }
  const double cscale = cfg_.physics_mean ? 1.0 / static_cast<double>(n_col) : 1.0;
  terms.physics = cfg_.weight_phys * cscale * phys / (2.0 * cfg_.sigma_p * cfg_.sigma_p);

  double prior = 0.0;
  if (std::isfinite(cfg_.sigma_w))
    prior += theta_sq_norm(net) / (2.0 * cfg_.sigma_w * cfg_.sigma_w);
  const double la = std::log(alpha);
  const double lb = std::log(beta);
  const double da = (la - cfg_.prior_alpha.mu) / cfg_.prior_alpha.sigma;
  const double db = (lb - cfg_.prior_beta.mu) / cfg_.prior_beta.sigma;
  prior += 0.5 * (da * da + db * db);
  terms.prior = cfg_.weight_prior * prior;
  return terms;
}

double EnergyEvaluator::energy_grad(const SurrogateNetwork& net,
                                    const KineticReparam& kin, EnergyGradient& grad) {
  forward_batch(net);
  if (grad.layers.size() != net.layers.size()) grad.match_shape(net);
  grad.set_zero();

  const double alpha = kin.alpha();
  const double beta = kin.beta();
  const std::size_t P = points_.size();
  const std::size_t n_col = P - n_obs_;

  // Loss values and output-adjoint seeds.
  double e_data = 0.0;
  const double wd = cfg_.weight_data / (cfg_.sigma_d * cfg_.sigma_d);
  for (std::size_t p = 0; p < P; ++p) {
    ybar_[p] = 0.0;
    ydotbar_[p] = 0.0;
  }
  for (std::size_t p = 0; p < n_obs_; ++p) {
    const double r = y_[p] - obs_y_[p];
    e_data += 0.5 * wd * r * r;
    ybar_[p] = wd * r;
  }

  double e_phys = 0.0;
  double g_alpha = 0.0;
  double g_beta = 0.0;
  const double cscale = cfg_.physics_mean ? 1.0 / static_cast<double>(n_col) : 1.0;
  const double wp = cfg_.weight_phys * cscale / (cfg_.sigma_p * cfg_.sigma_p);
  for (std::size_t p = n_obs_; p < P; ++p) {
    const double r = ydot_[p] - (alpha - beta * y_[p]);
    e_phys += 0.5 * wp * r * r;
    const double g = wp * r;
    ydotbar_[p] = g;
    ybar_[p] += g * beta;
    g_alpha -= g;
    g_beta += g * y_[p];
  }

  double e_prior = 0.0;
  const double la = std::log(alpha);
  const double lb = std::log(beta);
  {
    const double da = (la - cfg_.prior_alpha.mu) / cfg_.prior_alpha.sigma;
    const double db = (lb - cfg_.prior_beta.mu) / cfg_.prior_beta.sigma;
    e_prior = cfg_.weight_prior * 0.5 * (da * da + db * db);
    g_alpha += cfg_.weight_prior * da / (cfg_.prior_alpha.sigma * alpha);
    g_beta += cfg_.weight_prior * db / (cfg_.prior_beta.sigma * beta);
  }
  if (std::isfinite(cfg_.sigma_w)) {
    const double wr = cfg_.weight_prior / (cfg_.sigma_w * cfg_.sigma_w);
    e_prior += 0.5 * wr * theta_sq_norm(net);
    for (std::size_t l = 0; l < net.layers.size(); ++l) {
      const auto& src = net.layers[l];
      auto& dst = grad.layers[l];
      for (std::size_t k = 0; k < src.w.size(); ++k) dst.w[k] += wr * src.w[k];
      for (std::size_t k = 0; k < src.b.size(); ++k) dst.b[k] += wr * src.b[k];
    }
  }

  // Reverse sweep. The output layer is linear; hidden layers need both the
  // tanh' path for the value adjoint and the tanh'' path for the tangent
  // adjoint.
  const std::size_t depth = net.layers.size();
  {
    const auto& layer = net.layers[depth - 1];
    auto& glayer = grad.layers[depth - 1];
    const int in = layer.in;
    const double* A = a_[depth - 1].data();
    const double* Ad = adot_[depth - 1].data();
    double* Abar = abar_[depth - 1].data();
    double* Adbar = adotbar_[depth - 1].data();
    double gb = 0.0;
    for (std::size_t p = 0; p < P; ++p) {
      const double yb = ybar_[p];
      const double ydb = ydotbar_[p];
      gb += yb;
      const double* arow = A + p * in;
      const double* adrow = Ad + p * in;
      double* abrow = Abar + p * in;
      double* adbrow = Adbar + p * in;
      for (int i = 0; i < in; ++i) {
        glayer.w[static_cast<std::size_t>(i)] += yb * arow[i] + ydb * adrow[i];
        abrow[i] = yb * layer.w[static_cast<std::size_t>(i)];
        adbrow[i] = ydb * layer.w[static_cast<std::size_t>(i)];
      }
    }
    glayer.b[0] += gb;
  }

  for (std::size_t k = depth - 1; k >= 1; --k) {
    const auto& layer = net.layers[k - 1];  // produces the depth-k activations
    auto& glayer = grad.layers[k - 1];
    const int out = layer.out;
    const int in = layer.in;
    const double* H = a_[k].data();
    const double* Zd = zdot_[k].data();
    const double* Hbar = abar_[k].data();
    const double* Hdbar = adotbar_[k].data();
    double* Zbar = zbar_[k].data();
    double* Zdbar = zdotbar_[k].data();
    for (std::size_t p = 0; p < P; ++p) {
      const std::size_t off = p * out;
      for (int o = 0; o < out; ++o) {
        const double h = H[off + o];
        const double sech2 = 1.0 - h * h;
        Zbar[off + o] = Hbar[off + o] * sech2 +
                        Hdbar[off + o] * (-2.0 * h) * sech2 * Zd[off + o];
        Zdbar[off + o] = Hdbar[off + o] * sech2;
      }
    }
    const double* A = a_[k - 1].data();
    const double* Ad = adot_[k - 1].data();
    for (std::size_t p = 0; p < P; ++p) {
      const double* arow = A + p * static_cast<std::size_t>(in);
      const double* adrow = Ad + p * static_cast<std::size_t>(in);
      const double* zbrow = Zbar + p * static_cast<std::size_t>(out);
      const double* zdbrow = Zdbar + p * static_cast<std::size_t>(out);
      for (int o = 0; o < out; ++o) {
        const double zb = zbrow[o];
        const double zdb = zdbrow[o];
        double* gwrow = glayer.w.data() + static_cast<std::size_t>(o) * in;
        for (int i = 0; i < in; ++i) gwrow[i] += zb * arow[i] + zdb * adrow[i];
        glayer.b[static_cast<std::size_t>(o)] += zb;
      }
    }
    if (k >= 2) {
      // adjoint propagation as a register-blocked product over input chunks
      double* Abar_prev = abar_[k - 1].data();
      double* Adbar_prev = adotbar_[k - 1].data();
      const double* W = layer.w.data();
      constexpr int kChunk = 32;
      const std::size_t uin = static_cast<std::size_t>(in);
      for (std::size_t p = 0; p < P; ++p) {
        const double* zbrow = Zbar + p * static_cast<std::size_t>(out);
        const double* zdbrow = Zdbar + p * static_cast<std::size_t>(out);
        double* abrow = Abar_prev + p * uin;
        double* adbrow = Adbar_prev + p * uin;
        if (in % kChunk == 0) {
          for (int ic = 0; ic < in; ic += kChunk) {
            double acc[kChunk], accd[kChunk];
            for (int c = 0; c < kChunk; ++c) {
              acc[c] = 0.0;
              accd[c] = 0.0;
            }
            for (int o = 0; o < out; ++o) {
              const double zb = zbrow[o];
              const double zdb = zdbrow[o];
              const double* wrow = W + static_cast<std::size_t>(o) * in + ic;
              for (int c = 0; c < kChunk; ++c) {
                acc[c] += zb * wrow[c];
                accd[c] += zdb * wrow[c];
              }
            }
            for (int c = 0; c < kChunk; ++c) {
              abrow[ic + c] = acc[c];
              adbrow[ic + c] = accd[c];
            }
          }
        } else {
          for (int i = 0; i < in; ++i) {
            abrow[i] = 0.0;
            adbrow[i] = 0.0;
          }
          for (int o = 0; o < out; ++o) {
            const double zb = zbrow[o];
            const double zdb = zdbrow[o];
            const double* wrow = W + static_cast<std::size_t>(o) * in;
            for (int i = 0; i < in; ++i) {
              abrow[i] += zb * wrow[i];
              adbrow[i] += zdb * wrow[i];
            }
          }
        }
      }
    }
  }

  // Chain the kinetic gradients through softplus.
  grad.raw_alpha = g_alpha * sigmoid(kin.raw_alpha);
  grad.raw_beta = g_beta * sigmoid(kin.raw_beta);
  return e_data + e_phys + e_prior;
}

EnergyTerms total_energy(const SurrogateNetwork& net, const KineticReparam& kin,
                         const LongitudinalSeries& train, const EnergyConfig& cfg) {
  EnergyEvaluator eval(train, cfg);
  return eval.energy(net, kin);
}

void flatten_gradient(const EnergyGradient& grad, std::span<double> out) {
  std::size_t k = 0;
  for (const auto& l : grad.layers) {
    for (double w : l.w) out[k++] = w;
    for (double b : l.b) out[k++] = b;
  }
  out[k++] = grad.raw_alpha;
  out[k++] = grad.raw_beta;
  if (k != out.size())
    throw std::invalid_argument("flatten_gradient: destination size mismatch");
}

}  // namespace bpinn
