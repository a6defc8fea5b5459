#pragma once

// Jump chain of the supermarket model: n single-server queues, arrivals
// join the first shortest of d queues sampled uniformly with replacement.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixlab/chain.hpp"

namespace mixlab {

/// Queue-length vector with a level index: at_least[k] is the number of
/// queues of length >= k, so l(k, x) and the maximum are O(1).
class QueueState {
 public:
  QueueState() = default;
  explicit QueueState(int n);
  explicit QueueState(std::vector<int> lengths);

  int n() const noexcept { return static_cast<int>(len_.size()); }
  int operator[](int i) const { return len_[static_cast<std::size_t>(i)]; }
  const std::vector<int>& lengths() const noexcept { return len_; }

  /// l(k, x); k >= 0.
  int at_least(int k) const {
    return k < static_cast<int>(at_least_.size()) ? at_least_[static_cast<std::size_t>(k)] : 0;
  }
  int max() const noexcept { return max_; }
  long total() const noexcept { return total_; }

  void add(int i);
  /// Removes one customer from queue i if it is non-empty; returns whether
  /// anything changed.
  bool remove(int i);

  friend bool operator==(const QueueState& a, const QueueState& b) { return a.len_ == b.len_; }
  friend bool operator<(const QueueState& a, const QueueState& b) { return a.len_ < b.len_; }

 private:
  std::vector<int> len_;
  std::vector<int> at_least_;  // size max_ + 2
  int max_ = 0;
  long total_ = 0;
};

class SupermarketChain {
 public:
  using State = QueueState;

  SupermarketChain(int n, double lambda, int d);

  int n() const noexcept { return n_; }
  double lambda() const noexcept { return lambda_; }
  int d() const noexcept { return d_; }
  double arrival_probability() const noexcept { return lambda_ / (1.0 + lambda_); }

  void step(State& s, Rng& rng) const;

  /// First index of `tuple` whose queue is strictly shortest among the
  /// listed queues.
  static int choose_queue(const State& s, std::span<const int> tuple);
  void apply_arrival(State& s, std::span<const int> tuple) const;
  void apply_departure(State& s, int queue) const;

  std::vector<State> neighbors(const State& s) const;
  /// l1 distance.
  double distance(const State& a, const State& b) const;

  /// Exact one-step law (enumerates n^d tuples; small n only).
  std::vector<std::pair<State, double>> transitions(const State& s) const;

 private:
  int n_;
  double lambda_;
  int d_;
};

/// Same event type, same d-tuple and same departure queue in both copies.
/// From adjacent states the l1 distance never increases.
class SupermarketCoupling {
 public:
  explicit SupermarketCoupling(const SupermarketChain& chain) : chain_(&chain) {}
  void joint_step(QueueState& x, QueueState& y, Rng& rng) const;
  std::vector<std::pair<std::pair<QueueState, QueueState>, double>> joint_transitions(
      const QueueState& x, const QueueState& y) const;

 private:
  const SupermarketChain* chain_;
};

/// lambda^{(d^k - 1)/(d - 1)} (lambda^k for d = 1): the fluid fixed point
/// and the limiting equilibrium fraction of queues of length >= k.
double fluid_fixed_point(double lambda, int d, int k);

/// Burn-in default: ceil(C n ln n) jump steps, C = 20.
std::uint64_t default_burn_in(int n, double factor = 20.0);

struct LevelProfile {
  std::vector<double> fraction;  // time-averaged l(k)/n, k = 0..k_max
  std::uint64_t burn_in = 0;
  std::uint64_t steps = 0;
};

/// Time average of l(k, X_t)/n over `steps` steps after `burn_in` steps
/// from the empty state.
LevelProfile equilibrium_levels(const SupermarketChain& chain, std::uint64_t burn_in,
                                std::uint64_t steps, int k_max, std::uint64_t seed,
                                std::uint64_t replica = 0);

/// Maximum queue length sampled every `spacing` steps after burn-in.
std::vector<int> max_queue_samples(const SupermarketChain& chain, std::uint64_t burn_in,
                                   std::uint64_t spacing, std::size_t count, std::uint64_t seed,
                                   std::uint64_t replica = 0);

/// Stationary snapshots of the full queue vector, every `spacing` steps.
std::vector<std::vector<int>> queue_snapshots(const SupermarketChain& chain, std::uint64_t burn_in,
                                              std::uint64_t spacing, std::size_t count,
                                              std::uint64_t seed, std::uint64_t replica = 0);

/// m_d(n): with i_d(n) the least i >= 0 such that
/// lambda^{(d^i - 1)/(d - 1)} < n^{-1/2} ln^2 n, m_2 = i_2 + 1 and
/// m_d = i_d for d >= 3. Natural logarithm.
int md_predictor(double n, double lambda, int d);

struct MaxQueueSummary {
  std::vector<std::pair<int, std::size_t>> histogram;  // value, count (ascending value)
  int top = 0;          // most frequent value
  int second = 0;       // second most frequent value
  double top_two_mass = 0.0;
  bool adjacent = false;
};

MaxQueueSummary summarize_max_queue(const std::vector<int>& samples);

}  // namespace mixlab
