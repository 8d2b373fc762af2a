#pragma once

#include <cstdint>
#include <vector>

#include "bpinn/gompertz.hpp"
#include "bpinn/series.hpp"

namespace bpinn {

struct LogNormalPrior {
  double mu;
  double sigma;
  double median() const;
};

struct GaussianPrior {
  double mean;
  double sd;
};

/// Cohort generator settings. Kinetic parameters are drawn from log-normal
/// priors, the baseline log-volume from a Gaussian, and visits follow a
/// jittered schedule to mimic sparse annual follow-up.
struct CohortSpec {
  LogNormalPrior prior_alpha{std::log(0.2), 0.5};
  LogNormalPrior prior_beta{std::log(0.05), 0.5};
  GaussianPrior y0{6.0, 1.0};  // log mm^3 at the first visit
  std::vector<double> visit_days{0.0, 365.0, 730.0};
  double visit_jitter_days = 60.0;  // uniform +/- jitter per visit
  ObservationNoise noise{0.2};
};

/// Noisy observations of a closed-form trajectory:
/// volume_i = exp(y(t_i) + eps_i), eps_i ~ N(0, sigma_v^2), seeded.
LongitudinalSeries simulate_series(const GompertzParams& params,
                                   const ObservationNoise& noise,
                                   std::vector<double> times, std::uint64_t seed,
                                   std::string patient_id = "sim");

struct SyntheticPatient {
  LongitudinalSeries series;
  GompertzParams truth;
};

/// n patients with per-patient parameters drawn from `spec`. Every patient's
/// randomness derives from (seed, patient index) only.
std::vector<SyntheticPatient> simulate_cohort(int n_patients, const CohortSpec& spec,
                                              std::uint64_t seed);

}  // namespace bpinn
