#pragma once

// Dense exact computations on enumerated chains.

#include <cstddef>
#include <optional>
#include <stdexcept>
#include <vector>

#include "mixlab/kernel.hpp"
#include "mixlab/transport.hpp"

namespace mixlab {

/// mu P^t. Work guard: t * n^2 against the global step cap.
Dist kernel_power_apply(const Kernel& k, const Dist& mu, std::size_t t);

class NotConverged : public std::runtime_error {
 public:
  NotConverged(const std::string& what, double residual)
      : std::runtime_error(what), residual_(residual) {}
  double residual() const noexcept { return residual_; }

 private:
  double residual_;
};

struct StationaryOptions {
  double tol = 1e-12;
  /// Direct LU solve up to this many states, power iteration beyond.
  std::size_t direct_limit = 2000;
  /// Cap on row operations for power iteration.
  std::uint64_t max_row_ops = 10'000'000;
};

/// Stationary distribution of an irreducible aperiodic kernel with
/// ||pi P - pi||_1 <= tol. Throws InvalidChain for periodic kernels and
/// NotConverged if the tolerance is not met.
Dist stationary(const Kernel& k, StationaryOptions opts = {});

/// ||pi P - pi||_1
double stationarity_residual(const Kernel& k, const Dist& pi);

double tv_distance(const Dist& mu1, const Dist& mu2);

/// Exact Wasserstein distance under the kernel's graph metric.
double wasserstein(const Dist& mu1, const Dist& mu2, const Kernel& k);

/// d(t) = max_x TV(delta_x P^t, pi) for t = 0..t_max.
std::vector<double> distance_curve(const Kernel& k, const Dist& pi, std::size_t t_max);
std::vector<double> distance_curve(const Kernel& k, std::size_t t_max);

struct MixingTime {
  std::optional<std::size_t> steps;  // empty: not mixed within the cap
  std::size_t cap = 0;
  double last_distance = 1.0;        // d(t) at the returned t or at the cap

  bool mixed() const noexcept { return steps.has_value(); }
};

/// Least t with d(t) <= eps, searched up to `cap` steps.
MixingTime mixing_time(const Kernel& k, double eps, std::size_t cap = 1'000'000);
MixingTime mixing_time(const Kernel& k, const Dist& pi, double eps, std::size_t cap = 1'000'000);

}  // namespace mixlab
