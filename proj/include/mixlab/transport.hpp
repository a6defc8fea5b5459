#pragma once

#include <cstddef>
#include <span>
#include <stdexcept>
#include <vector>

namespace mixlab {

/// Internal failure of the transportation solver. Cannot occur for valid
/// inputs (non-negative masses of equal total, finite non-negative costs).
class SolverError : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

struct TransportPlan {
  double cost = 0.0;
  /// Optimal coupling, row-major n x n (rows: first marginal).
  std::vector<double> coupling;
  /// Kantorovich potential f, 1-Lipschitz for the cost metric, with
  /// mu2(f) - mu1(f) == cost up to rounding. Empty unless requested.
  std::vector<double> potential;
};

struct TransportOptions {
  bool want_coupling = false;
  bool want_potential = false;
};

/// Minimum-cost transportation between mu1 and mu2 for the cost table
/// `cost` (row-major n x n). With a metric cost this is the Wasserstein
/// distance. Solved by successive shortest augmenting paths with Johnson
/// potentials on the bipartite support graph.
TransportPlan solve_transport(std::span<const double> mu1, std::span<const double> mu2,
                              std::span<const double> cost, TransportOptions opts = {});

/// Wasserstein distance under the metric `cost` (row-major n x n).
double wasserstein(std::span<const double> mu1, std::span<const double> mu2,
                   std::span<const double> cost);

}  // namespace mixlab
