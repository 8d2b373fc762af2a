#pragma once

#include <cstdint>
#include <string>
#include <vector>

namespace bpinn {

/// One patient's longitudinal record: strictly increasing observation times
/// (days) with strictly positive volumes (mm^3). Log-volumes are cached at
/// construction; the three sequences always have equal length >= 1.
struct LongitudinalSeries {
  std::string patient_id;
  std::vector<double> times;
  std::vector<double> volumes;
  std::vector<double> log_volumes;

  static LongitudinalSeries from_volumes(std::string patient_id,
                                         std::vector<double> times,
                                         std::vector<double> volumes);

  std::size_t size() const { return times.size(); }

  /// First `k` observations (the training slice under a temporal split).
  LongitudinalSeries head(std::size_t k) const;
  /// Observations from index `k` to the end (the held-out slice).
  LongitudinalSeries tail_from(std::size_t k) const;
};

/// Log-space observation noise. sigma_v = 0 is allowed and means noiseless
/// simulation; everywhere the value is used as a likelihood scale it must be
/// positive and is validated there.
struct ObservationNoise {
  double sigma_v = 0.2;
};

/// Volume of a segmented region from its voxel count and spacing (mm).
double voxel_volume(std::uint64_t voxel_count, double sx, double sy, double sz);

}  // namespace bpinn
