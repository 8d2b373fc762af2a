#include "bpinn/simulate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <stdexcept>

#include "bpinn/rng.hpp"

namespace bpinn {

double LogNormalPrior::median() const { return std::exp(mu); }

LongitudinalSeries simulate_series(const GompertzParams& params,
                                   const ObservationNoise& noise,
                                   std::vector<double> times, std::uint64_t seed,
                                   std::string patient_id) {
  if (times.empty()) throw std::invalid_argument("simulate_series: times empty");
  if (!(noise.sigma_v >= 0.0))
    throw std::invalid_argument("simulate_series: sigma_v must be >= 0");
  Rng rng(seed);
  std::vector<double> volumes;
  volumes.reserve(times.size());
  for (double t : times) {
    double y = closed_form_log(params, t);
    if (noise.sigma_v > 0.0) y += rng.normal(0.0, noise.sigma_v);
    volumes.push_back(std::exp(y));
  }
  return LongitudinalSeries::from_volumes(std::move(patient_id), std::move(times),
                                          std::move(volumes));
}

std::vector<SyntheticPatient> simulate_cohort(int n_patients, const CohortSpec& spec,
                                              std::uint64_t seed) {
  if (n_patients < 1)
    throw std::invalid_argument("simulate_cohort: n_patients must be >= 1");
  if (spec.visit_days.size() < 2)
    throw std::invalid_argument("simulate_cohort: need at least 2 scheduled visits");

  std::vector<SyntheticPatient> cohort;
  cohort.reserve(static_cast<std::size_t>(n_patients));
  for (int i = 0; i < n_patients; ++i) {
    Rng rng(derive_seed(seed, static_cast<std::uint64_t>(i), seed_stream::simulate));
    const double alpha = std::exp(rng.normal(spec.prior_alpha.mu, spec.prior_alpha.sigma));
    const double beta = std::exp(rng.normal(spec.prior_beta.mu, spec.prior_beta.sigma));
    const double y0 = rng.normal(spec.y0.mean, spec.y0.sd);

    std::vector<double> times;
    times.reserve(spec.visit_days.size());
    for (double day : spec.visit_days) {
      double jitter = 0.0;
      if (spec.visit_jitter_days > 0.0)
        jitter = rng.uniform(-spec.visit_jitter_days, spec.visit_jitter_days);
      times.push_back(day + jitter);
    }
    std::sort(times.begin(), times.end());

    char id[16];
    std::snprintf(id, sizeof(id), "P%04d", i + 1);
    const GompertzParams truth = GompertzParams::make(alpha, beta, y0, times.front());
    LongitudinalSeries series =
        simulate_series(truth, spec.noise, std::move(times), rng.next_u64(), id);
    cohort.push_back(SyntheticPatient{std::move(series), truth});
  }
  return cohort;
}

}  // namespace bpinn
