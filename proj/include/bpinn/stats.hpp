#pragma once

#include <span>

namespace bpinn {

double normal_cdf(double x);

/// Regularized incomplete beta function I_x(a, b) by continued fraction.
double regularized_incomplete_beta(double a, double b, double x);

/// Two-sided p-value of a t statistic with df degrees of freedom.
double student_t_two_sided_p(double t, int df);

/// Two-sided Wilcoxon signed-rank p-value of paired differences. Zero
/// differences are dropped; ranks of |d| use midranks. Exact enumeration of
/// all sign assignments for n <= 12 nonzero differences, normal
/// approximation with tie correction and continuity correction above.
double wilcoxon_signed_rank_p(std::span<const double> diffs);

struct PairedStats {
  double mean_diff = 0.0;
  double t_stat = 0.0;
  double t_p = 1.0;
  double wilcoxon_p = 1.0;
  double cohens_dz = 0.0;
  int n_pos = 0;  // diffs > 0
  int n_neg = 0;  // diffs < 0
  int n_zero = 0;
  bool degenerate = false;  // all differences zero: p-values undefined
};

/// Paired comparison of two equal-length error sequences, diffs = a - b.
/// Requires n >= 3.
PairedStats paired_stats(std::span<const double> a, std::span<const double> b);

}  // namespace bpinn
