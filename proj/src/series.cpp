#include "bpinn/series.hpp"

#include <cmath>
#include <stdexcept>

namespace bpinn {

LongitudinalSeries LongitudinalSeries::from_volumes(std::string patient_id,
                                                    std::vector<double> times,
                                                    std::vector<double> volumes) {
  if (times.empty() || times.size() != volumes.size())
    throw std::invalid_argument(
        "LongitudinalSeries: times and volumes must have equal length >= 1");
  for (std::size_t i = 1; i < times.size(); ++i)
    if (!(times[i] > times[i - 1]))
      throw std::invalid_argument("LongitudinalSeries: times must be strictly increasing");
  std::vector<double> logs;
  logs.reserve(volumes.size());
  for (double v : volumes) {
    if (!(v > 0.0) || !std::isfinite(v))
      throw std::invalid_argument("LongitudinalSeries: volumes must be positive");
    logs.push_back(std::log(v));
  }
  LongitudinalSeries s;
  s.patient_id = std::move(patient_id);
  s.times = std::move(times);
  s.volumes = std::move(volumes);
  s.log_volumes = std::move(logs);
  return s;
}

LongitudinalSeries LongitudinalSeries::head(std::size_t k) const {
  if (k == 0 || k > size())
    throw std::invalid_argument("LongitudinalSeries::head: bad slice length");
  LongitudinalSeries s;
  s.patient_id = patient_id;
  s.times.assign(times.begin(), times.begin() + k);
  s.volumes.assign(volumes.begin(), volumes.begin() + k);
  s.log_volumes.assign(log_volumes.begin(), log_volumes.begin() + k);
  return s;
}

LongitudinalSeries LongitudinalSeries::tail_from(std::size_t k) const {
  if (k >= size())
    throw std::invalid_argument("LongitudinalSeries::tail_from: bad start index");
  LongitudinalSeries s;
  s.patient_id = patient_id;
  s.times.assign(times.begin() + k, times.end());
  s.volumes.assign(volumes.begin() + k, volumes.end());
  s.log_volumes.assign(log_volumes.begin() + k, log_volumes.end());
  return s;
}

double voxel_volume(std::uint64_t voxel_count, double sx, double sy, double sz) {
  if (!(sx > 0.0) || !(sy > 0.0) || !(sz > 0.0))
    throw std::invalid_argument("voxel_volume: spacings must be positive");
  return static_cast<double>(voxel_count) * sx * sy * sz;
}

}  // namespace bpinn
