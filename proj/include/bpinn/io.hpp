#pragma once

#include <string>
#include <vector>

#include "bpinn/baselines.hpp"
#include "bpinn/config.hpp"
#include "bpinn/pipeline.hpp"
#include "bpinn/simulate.hpp"

namespace bpinn {

/// Parses a cohort CSV with header `patient_id,time_days,volume_mm3`.
/// Lines starting with '#' are ignored. Rows are grouped by patient in order
/// of first appearance and sorted by time within a patient. Duplicate
/// (patient, time) pairs and nonpositive volumes raise ParseError with the
/// offending line number. A header-only file yields an empty cohort (the
/// caller may warn).
std::vector<LongitudinalSeries> load_cohort(const std::string& path);

void write_cohort_csv(const std::string& path,
                      const std::vector<LongitudinalSeries>& cohort);
void write_truth_csv(const std::string& path,
                     const std::vector<SyntheticPatient>& cohort);

/// JSON round-trip of RunConfig. Unknown keys anywhere in the document are
/// rejected.
RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);
std::string serialize_run_config(const RunConfig& cfg);

/// Deterministic formatting used by every writer ("%.12g").
std::string fmt_double(double v);

void write_map_summary_csv(const std::string& path,
                           const std::vector<PatientResult>& results);
/// Posterior draws and chain diagnostics, one block per patient, in a single
/// structured text file.
void write_posterior_txt(const std::string& path,
                         const std::vector<PatientResult>& results);
void write_trajectory_csv(const std::string& path, const PatientResult& result);
void write_metrics_csv(const std::string& path,
                       const std::vector<PatientResult>& results);
void write_summary_csv(const std::string& path,
                       const std::vector<PatientResult>& results);
void write_calibration_csv(const std::string& path, const CalibrationCurve& curve);
void write_uncertainty_profile_csv(const std::string& path,
                                   const std::vector<PatientResult>& results,
                                   int n_windows = 4);
void write_comparison_csv(const std::string& path, const ComparisonReport& report);
void write_paired_diffs_csv(const std::string& path, const ComparisonReport& report);

}  // namespace bpinn
