#pragma once

// Chain abstraction shared by every module: a state type, a one-step
// sampler, the finite neighbour list of the transition graph and the
// graph metric it induces.

#include <algorithm>
#include <cmath>
#include <concepts>
#include <cstdint>
#include <functional>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/budget.hpp"
#include "mixlab/rng.hpp"

namespace mixlab {

/// A Markov chain on a locally finite graph. `step` advances a state in
/// place; it may leave the state unchanged (lazy chains) or move it to a
/// member of `neighbors`. `distance` is the shortest-path metric of the
/// transition graph.
template <class C>
concept Chain = requires(const C& c, typename C::State& s, const typename C::State& cs,
                         Rng& rng) {
  typename C::State;
  { c.step(s, rng) } -> std::same_as<void>;
  { c.neighbors(cs) } -> std::convertible_to<std::vector<typename C::State>>;
  { c.distance(cs, cs) } -> std::convertible_to<double>;
};

/// A chain whose state space can be listed and whose transition rows are
/// available exactly. Enumerated mode: dense ids 0..size()-1.
template <class C>
concept EnumerableChain =
    Chain<C> && requires(const C& c, const typename C::State& s, std::size_t id) {
      { c.size() } -> std::convertible_to<std::size_t>;
      { c.state(id) } -> std::convertible_to<typename C::State>;
      { c.index(s) } -> std::convertible_to<std::size_t>;
      { c.transitions(s) } -> std::convertible_to<std::vector<std::pair<typename C::State, double>>>;
    };

/// A coupling of two copies of a chain: both arguments advance together.
/// Each marginal must be distributed as Chain::step.
template <class K, class C>
concept Coupling = Chain<C> && requires(const K& k, typename C::State& x,
                                        typename C::State& y, Rng& rng) {
  { k.joint_step(x, y, rng) } -> std::same_as<void>;
};

template <class State>
struct Trajectory {
  std::vector<State> states;  // times 0..t
  std::uint64_t seed = 0;
  std::uint64_t replica = 0;

  const State& initial() const { return states.front(); }
  std::size_t steps() const { return states.size() - 1; }
};

template <class State>
struct Observable {
  std::string name;
  std::function<double(const State&)> eval;
  double lipschitz = 1.0;
};

/// States 0..t of one replica. Deterministic in (seed, replica).
template <Chain C>
Trajectory<typename C::State> sample_trajectory(const C& chain,
                                                const typename C::State& x0,
                                                std::uint64_t t, std::uint64_t seed,
                                                std::uint64_t replica) {
  check_budget(static_cast<long double>(t), "sample_trajectory");
  Trajectory<typename C::State> traj;
  traj.seed = seed;
  traj.replica = replica;
  traj.states.reserve(t + 1);
  traj.states.push_back(x0);
  Rng rng(seed, replica);
  auto x = x0;
  for (std::uint64_t s = 0; s < t; ++s) {
    chain.step(x, rng);
    traj.states.push_back(x);
  }
  return traj;
}

template <class State>
struct LipschitzViolation {
  State x;
  State y;
  double gap = 0.0;  // |f(x) - f(y)| for adjacent x, y
};

/// Samples n_pairs states, checks the observable across every neighbour of
/// each, and returns the adjacent pairs whose gap exceeds the declared
/// constant (with 1e-12 relative slack). Empty on success.
template <Chain C, class Sampler>
std::vector<LipschitzViolation<typename C::State>> check_lipschitz(
    const C& chain, const Observable<typename C::State>& obs, Sampler&& sample_state,
    std::size_t n_pairs, std::uint64_t seed) {
  std::vector<LipschitzViolation<typename C::State>> report;
  Rng rng(seed, 0x11b5);
  const double slack = 1e-12 * std::max(1.0, obs.lipschitz);
  for (std::size_t i = 0; i < n_pairs; ++i) {
    const typename C::State x = sample_state(rng);
    const double fx = obs.eval(x);
    for (const auto& y : chain.neighbors(x)) {
      const double gap = std::abs(fx - obs.eval(y));
      if (gap > obs.lipschitz + slack) report.push_back({x, y, gap});
    }
  }
  return report;
}

}  // namespace mixlab
