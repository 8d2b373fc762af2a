#include "bpinn/stats.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <stdexcept>
#include <vector>

namespace bpinn {

double normal_cdf(double x) { return 0.5 * std::erfc(-x / std::sqrt(2.0)); }

namespace {

// Continued-fraction evaluation of the incomplete beta (modified Lentz).
double beta_cf(double a, double b, double x) {
  constexpr int max_iter = 300;
  constexpr double tiny = 1e-300;
  constexpr double eps = 3e-15;
  const double qab = a + b;
  const double qap = a + 1.0;
  const double qam = a - 1.0;
  double c = 1.0;
  double d = 1.0 - qab * x / qap;
  if (std::abs(d) < tiny) d = tiny;
  d = 1.0 / d;
  double h = d;
  for (int m = 1; m <= max_iter; ++m) {
    const int m2 = 2 * m;
    double aa = m * (b - m) * x / ((qam + m2) * (a + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    h *= d * c;
    aa = -(a + m) * (qab + m) * x / ((a + m2) * (qap + m2));
    d = 1.0 + aa * d;
    if (std::abs(d) < tiny) d = tiny;
    c = 1.0 + aa / c;
    if (std::abs(c) < tiny) c = tiny;
    d = 1.0 / d;
    const double del = d * c;
    h *= del;
    if (std::abs(del - 1.0) < eps) break;
  }
  return h;
}

}  // namespace

double regularized_incomplete_beta(double a, double b, double x) {
  if (!(a > 0.0) || !(b > 0.0))
    throw std::invalid_argument("regularized_incomplete_beta: a, b must be > 0");
  if (x <= 0.0) return 0.0;
  if (x >= 1.0) return 1.0;
  const double ln_front = std::lgamma(a + b) - std::lgamma(a) - std::lgamma(b) +
                          a * std::log(x) + b * std::log1p(-x);
  const double front = std::exp(ln_front);
  if (x < (a + 1.0) / (a + b + 2.0)) return front * beta_cf(a, b, x) / a;
  return 1.0 - front * beta_cf(b, a, 1.0 - x) / b;
}

double student_t_two_sided_p(double t, int df) {
  if (df < 1) throw std::invalid_argument("student_t_two_sided_p: df must be >= 1");
  if (!std::isfinite(t)) return 0.0;
  const double nu = static_cast<double>(df);
  const double x = nu / (nu + t * t);
  return regularized_incomplete_beta(nu / 2.0, 0.5, x);
}

namespace {

// Midranks of |d| over the nonzero differences.
std::vector<double> abs_midranks(const std::vector<double>& d) {
  const std::size_t n = d.size();
  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::sort(order.begin(), order.end(), [&](std::size_t i, std::size_t j) {
    return std::abs(d[i]) < std::abs(d[j]);
  });
  std::vector<double> ranks(n, 0.0);
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j + 1 < n &&
           std::abs(d[order[j + 1]]) == std::abs(d[order[i]]))
      ++j;
    const double mid = 0.5 * static_cast<double>(i + j) + 1.0;
    for (std::size_t k = i; k <= j; ++k) ranks[order[k]] = mid;
    i = j + 1;
  }
  return ranks;
}

}  // namespace

double wilcoxon_signed_rank_p(std::span<const double> diffs) {
  std::vector<double> d;
  for (double x : diffs)
    if (x != 0.0) d.push_back(x);
  const std::size_t n = d.size();
  if (n == 0)
    throw std::invalid_argument("wilcoxon_signed_rank_p: all differences are zero");

  const std::vector<double> ranks = abs_midranks(d);
  double w_plus = 0.0;
  for (std::size_t i = 0; i < n; ++i)
    if (d[i] > 0.0) w_plus += ranks[i];

  if (n <= 12) {
    // Exact null distribution by enumerating every sign assignment.
    const std::size_t total = std::size_t{1} << n;
    std::size_t count_le = 0;
    std::size_t count_ge = 0;
    constexpr double tol = 1e-9;
    for (std::size_t mask = 0; mask < total; ++mask) {
      double w = 0.0;
      for (std::size_t i = 0; i < n; ++i)
        if (mask & (std::size_t{1} << i)) w += ranks[i];
      if (w <= w_plus + tol) ++count_le;
      if (w >= w_plus - tol) ++count_ge;
    }
    const double p_le = static_cast<double>(count_le) / static_cast<double>(total);
    const double p_ge = static_cast<double>(count_ge) / static_cast<double>(total);
    return std::min(1.0, 2.0 * std::min(p_le, p_ge));
  }

  // Normal approximation with tie correction and continuity correction.
  const double nn = static_cast<double>(n);
  const double mean = nn * (nn + 1.0) / 4.0;
  double tie_term = 0.0;
  {
    std::vector<double> sorted_abs(n);
    for (std::size_t i = 0; i < n; ++i) sorted_abs[i] = std::abs(d[i]);
    std::sort(sorted_abs.begin(), sorted_abs.end());
    std::size_t i = 0;
    while (i < n) {
      std::size_t j = i;
      while (j + 1 < n && sorted_abs[j + 1] == sorted_abs[i]) ++j;
      const double t = static_cast<double>(j - i + 1);
      tie_term += t * t * t - t;
      i = j + 1;
    }
  }
  const double var = nn * (nn + 1.0) * (2.0 * nn + 1.0) / 24.0 - tie_term / 48.0;
  if (!(var > 0.0)) return 1.0;
  double num = w_plus - mean;
  if (num > 0.5) num -= 0.5;
  else if (num < -0.5) num += 0.5;
  else num = 0.0;
  const double z = num / std::sqrt(var);
  return std::min(1.0, 2.0 * (1.0 - normal_cdf(std::abs(z))));
}

PairedStats paired_stats(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size())
    throw std::invalid_argument("paired_stats: length mismatch");
  const std::size_t n = a.size();
  if (n < 3) throw std::invalid_argument("paired_stats: need at least 3 pairs");

  std::vector<double> d(n);
  PairedStats s;
  double mean = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    d[i] = a[i] - b[i];
    mean += d[i];
    if (d[i] > 0.0) ++s.n_pos;
    else if (d[i] < 0.0) ++s.n_neg;
    else ++s.n_zero;
  }
  mean /= static_cast<double>(n);
  s.mean_diff = mean;

  double ss = 0.0;
  for (double x : d) ss += (x - mean) * (x - mean);
  const double sd = std::sqrt(ss / static_cast<double>(n - 1));

  if (s.n_zero == static_cast<int>(n)) {
    s.degenerate = true;
    s.t_p = 1.0;
    s.wilcoxon_p = 1.0;
    s.cohens_dz = 0.0;
    return s;
  }

  if (sd > 0.0) {
    s.cohens_dz = mean / sd;
    s.t_stat = mean / (sd / std::sqrt(static_cast<double>(n)));
    s.t_p = student_t_two_sided_p(s.t_stat, static_cast<int>(n) - 1);
  } else {
    // identical nonzero differences: t statistic degenerates to +/- infinity
    s.cohens_dz = mean > 0.0 ? std::numeric_limits<double>::infinity()
                             : -std::numeric_limits<double>::infinity();
    s.t_stat = s.cohens_dz;
    s.t_p = 0.0;
  }
  s.wilcoxon_p = wilcoxon_signed_rank_p(d);
  return s;
}

}  // namespace bpinn
