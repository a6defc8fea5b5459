#pragma once

// Closed-form tail bounds for Lipschitz observables of Markov chains and
// their comparison with Monte Carlo tails.

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "mixlab/chain.hpp"
#include "mixlab/coupling.hpp"
#include "mixlab/parallel.hpp"
#include "mixlab/stats.hpp"

namespace mixlab {

enum class BoundKind { AzumaProfile, StationaryProfile, Geometric, Bernstein, Range, Restricted };

std::string to_string(BoundKind k);

/// u -> probability bound in [0,1], non-increasing in u. Bounds state
/// deviations of 1-Lipschitz observables; for an L-Lipschitz observable
/// use `rescaled(L)`, which evaluates the bound at u / L.
class TailBound {
 public:
  /// Bound of the form min(1, 2 exp(-rate(u))) plus an additive slack.
  TailBound(BoundKind kind, std::map<std::string, double> params, bool vacuous = false);

  double operator()(double u) const;

  BoundKind kind() const noexcept { return kind_; }
  bool vacuous() const noexcept { return vacuous_; }
  const std::map<std::string, double>& parameters() const noexcept { return params_; }
  double lipschitz() const noexcept { return lipschitz_; }
  std::string label() const;

  TailBound rescaled(double lipschitz) const;

 private:
  double exponent(double u) const;

  BoundKind kind_;
  std::map<std::string, double> params_;
  bool vacuous_ = false;
  double lipschitz_ = 1.0;
};

/// 2 exp(-u^2 / (2 sum_{i<=t} alpha_i^2)), time-t deviation from x0.
TailBound azuma_bound(const ContractionProfile& profile, std::size_t t);

/// Restricted-set version of azuma_bound: bounds the deviation event
/// intersected with the path staying in S0^0 up to time t.
TailBound restricted_azuma_bound(const ContractionProfile& profile, std::size_t t);

/// Equilibrium deviation bound in the raw deviation w = 2u:
/// 2 exp(-(w/2)^2 / (2 S)), S = sum_i alpha_i^2 over the whole profile
/// plus `remainder` (the tail of the series beyond the supplied entries).
/// An infinite remainder yields a vacuous bound.
TailBound stationary_bound(const ContractionProfile& profile, double remainder);

/// Same, with S supplied in closed form.
TailBound stationary_bound_sum(double sum_squares);

/// Equilibrium bound from a restricted profile, conditional on a pair
/// (delta, t0) with W(delta_x P^t0, pi) < delta and escape probability
/// <= delta: 2 exp(-(w/2)^2 / (2 sum_{i<=t0} alpha_i^2)) + 2 delta for
/// w / 2 >= delta, and 1 below that.
TailBound conditional_stationary_bound(const ContractionProfile& profile, std::size_t t0,
                                       double delta);

/// 2 exp(-u^2 (1 - alpha^2) / (2 alpha^2)) for a one-step contraction
/// alpha in [0, 1); vacuous for alpha >= 1.
TailBound geometric_bound(double alpha);

/// Normal-concentration shape 2 exp(-u^2 / (c2 n)).
TailBound normal_rate_bound(double c2, double n);

/// 2 exp(-u^2 / (4 v (1 + alpha_hat u / (6 v)))); v > 0, alpha_hat >= 0.
TailBound bernstein_bound(double v, double alpha_hat);

/// 2 exp(-2 u^2 / sum r_j^2) for conditional ranges r_j >= 0.
TailBound mcdiarmid_range_bound(const std::vector<double>& ranges);

struct EmpiricalTail {
  std::vector<double> u_grid;
  std::vector<double> exceed_freq;       // P(|f(X_t) - mean| >= u)
  std::vector<double> exceed_freq_in_s0; // same event intersected with staying in S0^0
  std::size_t replicas = 0;
  std::size_t stayed_in_s0 = 0;
  double center = 0.0;        // empirical mean of f(X_t)
  double center_error = 0.0;  // standard error of the centre
  double stddev = 0.0;
  std::uint64_t t = 0;
  bool restricted = false;

  double se(std::size_t j) const { return binomial_se(exceed_freq[j], replicas); }
};

/// u values evenly spaced on (0, u_max].
std::vector<double> linear_grid(double u_max, std::size_t points);

/// Tail statistics from sampled observable values (one per replica).
EmpiricalTail tail_from_samples(const std::vector<double>& values, const std::vector<double>& u_grid,
                                const std::vector<char>& stayed = {});

/// Monte Carlo tail of |f(X_t) - mean| from x0 over `replicas` runs.
template <Chain C>
EmpiricalTail empirical_tail(
    const C& chain, const Observable<typename C::State>& obs, const typename C::State& x0,
    std::uint64_t t, const std::vector<double>& u_grid, std::size_t replicas, std::uint64_t seed,
    const std::optional<RestrictedSet<typename C::State>>& set = std::nullopt) {
  if (replicas < 100) throw std::invalid_argument("empirical_tail: replicas must be >= 100");
  check_budget(static_cast<long double>(replicas) * t, "empirical_tail");
  std::vector<double> values(replicas);
  std::vector<char> stayed(set ? replicas : 0, 1);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    auto x = x0;
    bool inside = !set || set->interior(x);
    for (std::uint64_t s = 0; s < t; ++s) {
      chain.step(x, rng);
      if (set && inside && !set->interior(x)) inside = false;
    }
    values[r] = obs.eval(x);
    if (set) stayed[r] = inside ? 1 : 0;
  });
  auto tail = tail_from_samples(values, u_grid, stayed);
  tail.t = t;
  return tail;
}

struct ComparisonRow {
  double u = 0.0;
  double bound = 0.0;
  double freq = 0.0;
  double se = 0.0;
  double margin = 0.0;  // bound - freq
  bool ok = true;       // freq <= bound + 3 se
};

struct Comparison {
  std::vector<ComparisonRow> rows;
  bool consistent = true;
  std::string bound_label;
};

/// Verdict "consistent" iff the empirical frequency is at most the bound
/// plus three binomial standard errors at every grid point. Uses the
/// S0-intersected tail when the empirical tail is restricted and the bound
/// is of restricted kind.
Comparison compare(const EmpiricalTail& tail, const TailBound& bound);

/// CSV with header `u,bound,freq,se,margin`.
void write_comparison_csv(std::ostream& os, const Comparison& c);

}  // namespace mixlab
