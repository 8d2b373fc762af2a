#pragma once

#include <cstdint>
#include <cmath>

namespace bpinn {

// splitmix64 step: advances `state` and returns a well-mixed 64-bit word.
inline std::uint64_t splitmix64(std::uint64_t& state) {
  state += 0x9E3779B97F4A7C15ULL;
  std::uint64_t z = state;
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
  return z ^ (z >> 31);
}

/// Derives an independent seed for one unit of work (patient, stream) from a
/// run-level seed. Pure function of its inputs, so adding or reordering
/// patients never changes the stream another patient sees.
inline std::uint64_t derive_seed(std::uint64_t run_seed, std::uint64_t index,
                                 std::uint64_t stream = 0) {
  std::uint64_t s = run_seed ^ (0x9E3779B97F4A7C15ULL * (index + 1)) ^
                    (0xD1B54A32D192ED03ULL * (stream + 1));
  return splitmix64(s);
}

// Work-unit stream tags used with derive_seed. Keeping them in one place
// documents which consumer owns which stream.
namespace seed_stream {
inline constexpr std::uint64_t simulate = 1;
inline constexpr std::uint64_t map_init = 2;
inline constexpr std::uint64_t hmc = 3;
inline constexpr std::uint64_t predictive_noise = 4;
inline constexpr std::uint64_t nls_restarts = 5;
inline constexpr std::uint64_t gp_restarts = 6;
inline constexpr std::uint64_t gp_hmc = 7;
inline constexpr std::uint64_t gp_function_draws = 8;
}  // namespace seed_stream

/// Small deterministic generator (splitmix64 core, Box-Muller normals).
/// Self-contained so that streams are reproducible independent of the
/// standard library's distribution implementations.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : state_(seed) {}

  std::uint64_t next_u64() { return splitmix64(state_); }

  /// Uniform in [0, 1) with 53 random bits.
  double uniform() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

  double uniform(double a, double b) { return a + (b - a) * uniform(); }

  double normal() {
    if (has_spare_) {
      has_spare_ = false;
      return spare_;
    }
    double u1 = uniform();
    while (u1 <= 0.0) u1 = uniform();
    const double u2 = uniform();
    const double r = std::sqrt(-2.0 * std::log(u1));
    const double th = 2.0 * 3.141592653589793238462643383279502884 * u2;
    spare_ = r * std::sin(th);
    has_spare_ = true;
    return r * std::cos(th);
  }

  double normal(double mean, double sd) { return mean + sd * normal(); }

 private:
  std::uint64_t state_;
  bool has_spare_ = false;
  double spare_ = 0.0;
};

}  // namespace bpinn
