#pragma once

// Couplings, Wasserstein contraction profiles over adjacent pairs,
// coalescence-based total variation bounds and escape probabilities from
// a restricted set of good states.

#include <cstdint>
#include <functional>
#include <iosfwd>
#include <map>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "mixlab/chain.hpp"
#include "mixlab/exact.hpp"
#include "mixlab/kernel.hpp"
#include "mixlab/parallel.hpp"
#include "mixlab/stats.hpp"

namespace mixlab {

enum class ProfileScope { Global, Restricted };
enum class Provenance { Exact, MonteCarlo, ClosedForm };

std::string to_string(ProfileScope s);
std::string to_string(Provenance p);

/// alpha_1..alpha_T: bounds (exact) or estimates (Monte Carlo) of the
/// worst Wasserstein distance between i-step laws from adjacent starts.
struct ContractionProfile {
  std::vector<double> alphas;
  std::vector<double> lower;  // confidence band; equals alphas unless Monte Carlo
  std::vector<double> upper;
  ProfileScope scope = ProfileScope::Global;
  Provenance provenance = Provenance::Exact;
  std::size_t replicas = 0;
  double confidence = 1.0;

  std::size_t length() const noexcept { return alphas.size(); }
  /// sum_{i<=t} alpha_i^2
  double sum_squares(std::size_t t) const;

  static ContractionProfile closed_form(std::vector<double> alphas,
                                        ProfileScope scope = ProfileScope::Global);
  static ContractionProfile geometric(double alpha, std::size_t length);
};

/// CSV with header `i,alpha_i,provenance,lower_conf,upper_conf`.
void write_profile_csv(std::ostream& os, const ContractionProfile& p);

/// Good-state region S0 and its interior S0^0 (states of S0 whose
/// neighbours all lie in S0).
template <class State>
struct RestrictedSet {
  std::function<bool(const State&)> member;
  std::function<bool(const State&)> interior;

  /// Interior derived from the chain's neighbour lists.
  template <Chain C>
  static RestrictedSet from_membership(const C& chain, std::function<bool(const State&)> member) {
    RestrictedSet set;
    set.member = member;
    set.interior = [&chain, member](const State& x) {
      if (!member(x)) return false;
      for (const auto& y : chain.neighbors(x)) {
        if (!member(y)) return false;
      }
      return true;
    };
    return set;
  }

  static RestrictedSet whole_space() {
    return {[](const State&) { return true; }, [](const State&) { return true; }};
  }
};

template <class C>
concept HasTransitions = Chain<C> && requires(const C& c, const typename C::State& s) {
  { c.transitions(s) } -> std::convertible_to<std::vector<std::pair<typename C::State, double>>>;
};

/// A coupling whose one-step joint law can be listed exactly.
template <class K, class C>
concept EnumerableCoupling =
    Coupling<K, C> && requires(const K& k, const typename C::State& x, const typename C::State& y) {
      {
        k.joint_transitions(x, y)
      } -> std::convertible_to<std::vector<std::pair<std::pair<typename C::State, typename C::State>, double>>>;
    };

/// Largest entrywise gap between the coupling's exact marginals from (x,y)
/// and the chain's transition rows from x and from y.
template <class C, class K>
  requires HasTransitions<C> && EnumerableCoupling<K, C>
double coupling_marginal_error(const C& chain, const K& coupling, const typename C::State& x,
                               const typename C::State& y) {
  using S = typename C::State;
  auto collect = [](const std::vector<std::pair<S, double>>& rows) {
    std::map<S, double> m;
    for (const auto& [s, w] : rows) m[s] += w;
    return m;
  };
  std::map<S, double> mx, my;
  for (const auto& [xy, w] : coupling.joint_transitions(x, y)) {
    mx[xy.first] += w;
    my[xy.second] += w;
  }
  double err = 0.0;
  auto compare = [&err](const std::map<S, double>& a, const std::map<S, double>& b) {
    for (const auto& [s, w] : a) {
      const auto it = b.find(s);
      err = std::max(err, std::abs(w - (it == b.end() ? 0.0 : it->second)));
    }
    for (const auto& [s, w] : b) {
      if (a.find(s) == a.end()) err = std::max(err, std::abs(w));
    }
  };
  compare(mx, collect(chain.transitions(x)));
  compare(my, collect(chain.transitions(y)));
  return err;
}

/// Exact alpha_i = max over adjacent (x,y) of W(delta_x P^i, delta_y P^i),
/// i = 1..T. With `in_s0`, only pairs inside S0 count (restricted scope).
ContractionProfile contraction_profile_exact(const Kernel& k, std::size_t T,
                                             const std::vector<bool>& in_s0 = {});

/// One-step exact contraction alpha; the profile alpha^i then follows by
/// induction. Reported even when >= 1 (bound vacuous).
double geometric_alpha(const Kernel& k);

/// Samples a start state, then a uniformly random neighbour of it.
template <Chain C, class StartSampler>
std::vector<std::pair<typename C::State, typename C::State>> sample_adjacent_pairs(
    const C& chain, StartSampler&& start, std::size_t count, std::uint64_t seed) {
  std::vector<std::pair<typename C::State, typename C::State>> pairs;
  pairs.reserve(count);
  Rng rng(seed, 0xad1ace47);
  while (pairs.size() < count) {
    auto x = start(rng);
    const auto nb = chain.neighbors(x);
    if (nb.empty()) continue;
    const auto y = nb[rng.below(nb.size())];
    pairs.emplace_back(std::move(x), y);
  }
  return pairs;
}

/// Monte Carlo profile: for each supplied adjacent pair, the mean of
/// d(X_i, Y_i) over `replicas` coupled runs; alpha_i is the max over pairs
/// and the band is the max over pairs of mean -/+ z99 * SE.
template <Chain C, class K>
  requires Coupling<K, C>
ContractionProfile contraction_profile_mc(
    const C& chain, const K& coupling,
    const std::vector<std::pair<typename C::State, typename C::State>>& pairs, std::size_t T,
    std::size_t replicas, std::uint64_t seed, ProfileScope scope = ProfileScope::Global) {
  if (pairs.empty()) throw std::invalid_argument("contraction_profile_mc: no pairs");
  if (replicas == 0) throw std::invalid_argument("contraction_profile_mc: replicas must be >= 1");
  check_budget(static_cast<long double>(pairs.size()) * replicas * T, "contraction_profile_mc");
  for (const auto& [x, y] : pairs) {
    if (chain.distance(x, y) != 1.0) {
      throw std::invalid_argument("contraction_profile_mc: sampled pair is not adjacent");
    }
  }
  ContractionProfile prof;
  prof.scope = scope;
  prof.provenance = Provenance::MonteCarlo;
  prof.replicas = replicas;
  prof.confidence = 0.99;
  prof.alphas.assign(T, 0.0);
  prof.lower.assign(T, 0.0);
  prof.upper.assign(T, 0.0);
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    const std::uint64_t pair_seed = derive_seed(seed, p);
    const auto blocks = blocked_replicas(
        replicas, std::vector<RunningStats>(T), [&](std::vector<RunningStats>& acc, std::size_t r) {
          Rng rng(pair_seed, r);
          auto x = pairs[p].first;
          auto y = pairs[p].second;
          for (std::size_t i = 0; i < T; ++i) {
            coupling.joint_step(x, y, rng);
            acc[i].add(chain.distance(x, y));
          }
        });
    std::vector<RunningStats> total(T);
    for (const auto& b : blocks) {
      for (std::size_t i = 0; i < T; ++i) total[i].merge(b[i]);
    }
    for (std::size_t i = 0; i < T; ++i) {
      const double m = total[i].mean, half = kZ99 * total[i].sem();
      prof.alphas[i] = std::max(prof.alphas[i], m);
      prof.lower[i] = std::max(prof.lower[i], std::max(0.0, m - half));
      prof.upper[i] = std::max(prof.upper[i], m + half);
    }
  }
  return prof;
}

/// Coalescence time of one coupled run, or t_max + 1 if the copies are
/// still distinct at t_max. Coalescence is exact state equality.
template <Chain C, class K>
  requires Coupling<K, C>
std::uint64_t coalescence_time(const K& coupling, typename C::State x, typename C::State y,
                               std::uint64_t t_max, Rng& rng) {
  for (std::uint64_t t = 0; t <= t_max; ++t) {
    if (x == y) return t;
    if (t == t_max) break;
    coupling.joint_step(x, y, rng);
  }
  return t_max + 1;
}

/// Per-replica coalescence times from (x0, y0), in replica order. y0 is
/// produced per replica by `second_start(rng)` so that a stationary second
/// copy can be used.
template <Chain C, class K, class SecondStart>
  requires Coupling<K, C>
std::vector<std::uint64_t> coalescence_times(const C& chain, const K& coupling,
                                             const typename C::State& x0,
                                             SecondStart&& second_start, std::uint64_t t_max,
                                             std::size_t replicas, std::uint64_t seed) {
  (void)chain;
  check_budget(static_cast<long double>(replicas) * t_max, "coalescence_times");
  std::vector<std::uint64_t> times(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    auto y0 = second_start(rng);
    times[r] = coalescence_time<C>(coupling, x0, std::move(y0), t_max, rng);
  });
  return times;
}

struct CoalescenceBound {
  double estimate = 0.0;  // fraction of replicas not coalesced by t
  double upper = 1.0;     // 99% Wilson upper bound of that fraction
  std::size_t replicas = 0;
};

CoalescenceBound coalescence_bound_from_times(const std::vector<std::uint64_t>& times,
                                              std::uint64_t t);

/// Upper bound on TV(delta_x0 P^t, delta_y0 P^t) from a coupling: the
/// fraction of coupled runs not coalesced by time t.
template <Chain C, class K>
  requires Coupling<K, C>
CoalescenceBound coalescence_tv_bound(const C& chain, const K& coupling,
                                      const typename C::State& x0, const typename C::State& y0,
                                      std::uint64_t t, std::size_t replicas, std::uint64_t seed) {
  const auto times = coalescence_times(
      chain, coupling, x0, [&y0](Rng&) { return y0; }, t, replicas, seed);
  return coalescence_bound_from_times(times, t);
}

struct EscapeEstimate {
  double probability = 0.0;
  double se = 0.0;
  double lower = 0.0;
  double upper = 0.0;
  std::size_t replicas = 0;
};

/// Fraction of runs from x0 in S0^0 that leave S0^0 at some time s <= t.
template <Chain C>
EscapeEstimate escape_probability(const C& chain, const RestrictedSet<typename C::State>& set,
                                  const typename C::State& x0, std::uint64_t t,
                                  std::size_t replicas, std::uint64_t seed) {
  if (!set.interior(x0)) throw std::invalid_argument("escape_probability: x0 is not in S0^0");
  check_budget(static_cast<long double>(replicas) * t, "escape_probability");
  std::vector<char> escaped(replicas, 0);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    auto x = x0;
    for (std::uint64_t s = 0; s < t; ++s) {
      chain.step(x, rng);
      if (!set.interior(x)) {
        escaped[r] = 1;
        return;
      }
    }
  });
  std::size_t k = 0;
  for (char e : escaped) k += static_cast<std::size_t>(e);
  EscapeEstimate out;
  out.replicas = replicas;
  out.probability = static_cast<double>(k) / static_cast<double>(replicas);
  out.se = binomial_se(out.probability, replicas);
  out.lower = wilson_lower(k, replicas);
  out.upper = wilson_upper(k, replicas);
  return out;
}

}  // namespace mixlab
