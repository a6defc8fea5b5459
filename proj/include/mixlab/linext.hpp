#pragma once

// Glauber dynamics on the linear extensions of a poset made of a chain of
// length n-1 plus one incomparable element. A linear extension is fixed by
// the slot (1..n) of the free element; an adjacent transposition of slots
// (i, i+1) moves it when it occupies one of them.

#include <utility>
#include <vector>

#include "mixlab/chain.hpp"

namespace mixlab {

class LinextChain {
 public:
  using State = int;

  explicit LinextChain(int n);

  int n() const noexcept { return n_; }

  void step(State& p, Rng& rng) const;
  /// Applies the transposition of slots (i, i+1), 1 <= i <= n-1.
  void apply(State& p, int i) const;

  std::vector<State> neighbors(const State& p) const;
  double distance(const State& a, const State& b) const;

  std::size_t size() const { return static_cast<std::size_t>(n_); }
  State state(std::size_t id) const { return static_cast<int>(id) + 1; }
  std::size_t index(const State& p) const { return static_cast<std::size_t>(p - 1); }
  std::vector<std::pair<State, double>> transitions(const State& p) const;

 private:
  int n_;
};

/// Standard deviation of the uniform law on 1..n: sqrt((n^2 - 1) / 12).
double linext_stationary_stddev(int n);

struct PositionSummary {
  double mean = 0.0;
  double stddev = 0.0;
  std::size_t samples = 0;
};

/// Position moments pooled over `replicas` runs from slot 1, each burnt in
/// for `burn_in` steps and then sampled every step for `steps` steps.
PositionSummary linext_position_summary(const LinextChain& chain, std::uint64_t burn_in,
                                        std::uint64_t steps, std::size_t replicas,
                                        std::uint64_t seed);

}  // namespace mixlab
