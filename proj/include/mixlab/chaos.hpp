#pragma once

// Empirical propagation-of-chaos diagnostic for the supermarket model: TV
// between the joint law of r queue lengths and the product of their
// marginals, from stationary snapshots of the queue vector.

#include <cstdint>
#include <stdexcept>
#include <vector>

namespace mixlab {

class InsufficientSamples : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

struct ChaosOptions {
  int r = 2;
  int k_max = 4;                 // lengths are truncated to min(len, k_max)
  bool pool_groups = true;       // use every disjoint r-group of each snapshot, not only queues 1..r
  std::size_t bootstrap = 200;   // resamples over snapshots
  std::size_t permutations = 50; // null: coordinates shuffled independently across tuples
  std::uint64_t seed = 1;
};

struct ChaosEstimate {
  double tv = 0.0;            // plug-in TV(joint, product of marginals)
  double bootstrap_se = 0.0;
  double null_mean = 0.0;     // plug-in TV under exact independence, same sample size
  double null_sd = 0.0;
  double excess = 0.0;        // tv - null_mean
  double z = 0.0;             // excess / sqrt(bootstrap_se^2 + null_sd^2)
  std::size_t tuples = 0;
  std::size_t snapshots = 0;
};

/// Plug-in TV on already-truncated r-tuples (cells in [0, k_max]^r).
double chaos_tv(const std::vector<std::vector<int>>& tuples, int r, int k_max);

/// Throws InsufficientSamples when fewer than 10 (k_max + 1)^r tuples are
/// available.
ChaosEstimate chaoticity_estimator(const std::vector<std::vector<int>>& snapshots,
                                   const ChaosOptions& options = {});

}  // namespace mixlab
