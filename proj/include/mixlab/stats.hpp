#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>

namespace mixlab {

/// Two-sided 99% normal quantile.
inline constexpr double kZ99 = 2.5758293035489004;

/// Binomial standard error sqrt(p(1-p)/n) of an observed frequency.
inline double binomial_se(double p, std::size_t n) {
  return n == 0 ? 0.0 : std::sqrt(std::max(0.0, p * (1.0 - p)) / static_cast<double>(n));
}

/// Wilson score interval bound for k successes in n trials.
inline double wilson_upper(std::size_t k, std::size_t n, double z = kZ99) {
  if (n == 0) return 1.0;
  const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
  const double centre = p + z2 / (2 * nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return std::min(1.0, (centre + half) / (1 + z2 / nn));
}

inline double wilson_lower(std::size_t k, std::size_t n, double z = kZ99) {
  if (n == 0) return 0.0;
  const double nn = static_cast<double>(n), p = static_cast<double>(k) / nn, z2 = z * z;
  const double centre = p + z2 / (2 * nn);
  const double half = z * std::sqrt(p * (1 - p) / nn + z2 / (4 * nn * nn));
  return std::max(0.0, (centre - half) / (1 + z2 / nn));
}

/// Running mean / variance (Welford).
struct RunningStats {
  std::size_t count = 0;
  double mean = 0.0;
  double m2 = 0.0;

  void add(double x) {
    ++count;
    const double delta = x - mean;
    mean += delta / static_cast<double>(count);
    m2 += delta * (x - mean);
  }
  /// Chan et al. parallel merge.
  void merge(const RunningStats& o) {
    if (o.count == 0) return;
    if (count == 0) {
      *this = o;
      return;
    }
    const double n1 = static_cast<double>(count), n2 = static_cast<double>(o.count);
    const double delta = o.mean - mean;
    mean += delta * n2 / (n1 + n2);
    m2 += o.m2 + delta * delta * n1 * n2 / (n1 + n2);
    count += o.count;
  }
  double variance() const { return count < 2 ? 0.0 : m2 / static_cast<double>(count - 1); }
  double stddev() const { return std::sqrt(variance()); }
  double sem() const { return count == 0 ? 0.0 : stddev() / std::sqrt(static_cast<double>(count)); }
};

}  // namespace mixlab
