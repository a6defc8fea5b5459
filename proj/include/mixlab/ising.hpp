#pragma once

// Mean-field (Curie-Weiss) Ising model with single-site heat-bath Glauber
// dynamics, interaction J = 1/n.

#include <cstdint>
#include <span>
#include <utility>
#include <vector>

#include "mixlab/chain.hpp"
#include "mixlab/kernel.hpp"

namespace mixlab {

struct IsingConfig {
  std::vector<std::int8_t> spins;  // each -1 or +1
  int magnetization = 0;           // sum of spins, kept in sync by the chain

  static IsingConfig all_plus(int n);
  static IsingConfig all_minus(int n);
  static IsingConfig from_spins(std::vector<std::int8_t> spins);

  int size() const noexcept { return static_cast<int>(spins.size()); }
  void set(int v, std::int8_t s) {
    magnetization += s - spins[static_cast<std::size_t>(v)];
    spins[static_cast<std::size_t>(v)] = s;
  }

  friend bool operator==(const IsingConfig& a, const IsingConfig& b) { return a.spins == b.spins; }
  friend bool operator<(const IsingConfig& a, const IsingConfig& b) { return a.spins < b.spins; }
};

/// Probability that the refreshed spin is +1, given the sum of the other
/// spins: e^{bM} / (e^{bM} + e^{-bM}) with M = others / n.
double glauber_plus_probability(int n, double beta, int others_sum);

/// Glauber dynamics on {-1,+1}^n. Adjacent = differ in one coordinate.
/// Enumerable for n <= 20; id bit i is set iff spin i is +1.
class IsingChain {
 public:
  using State = IsingConfig;

  IsingChain(int n, double beta);

  int n() const noexcept { return n_; }
  double beta() const noexcept { return beta_; }

  void step(State& s, Rng& rng) const;
  /// Deterministic update of vertex v with uniform coin u in [0,1).
  void update(State& s, int v, double u) const;

  std::vector<State> neighbors(const State& s) const;
  double distance(const State& a, const State& b) const;

  std::size_t size() const;
  State state(std::size_t id) const;
  std::size_t index(const State& s) const;
  std::vector<std::pair<State, double>> transitions(const State& s) const;

 private:
  int n_;
  double beta_;
};

/// Same vertex and same uniform coin in both copies.
class IsingSyncCoupling {
 public:
  explicit IsingSyncCoupling(const IsingChain& chain) : chain_(&chain) {}
  void joint_step(IsingConfig& x, IsingConfig& y, Rng& rng) const;
  std::vector<std::pair<std::pair<IsingConfig, IsingConfig>, double>> joint_transitions(
      const IsingConfig& x, const IsingConfig& y) const;

 private:
  const IsingChain* chain_;
};

/// Magnetization law of the Gibbs measure: m = n - 2k with probability
/// proportional to C(n,k) exp(beta (m^2 - n) / (2n)).
struct MagnetizationLaw {
  int n = 0;
  std::vector<int> values;     // -n, -n+2, ..., n
  std::vector<double> probs;

  double mass_at_least(int m) const;
  double mass_at_most(int m) const;
  double mean() const;
  double variance() const;
  /// Inverse-CDF sample.
  int sample(Rng& rng) const;
};

/// Exact Gibbs distribution over all 2^n configurations (n <= 20), indexed
/// like IsingChain ids.
Dist ising_gibbs_exact(int n, double beta);

/// Magnetization-class mode, n <= 10^4.
MagnetizationLaw ising_magnetization_law(int n, double beta);

/// Configuration distributed exactly as the Gibbs measure: magnetization
/// from the class law, then a uniformly random placement of the spins.
IsingConfig sample_gibbs_config(const MagnetizationLaw& law, Rng& rng);

/// The magnetization process m(X_t) of Glauber dynamics, which is itself a
/// Markov chain (birth-death on -n..n in steps of 2, lumpable by
/// exchangeability). From an exchangeable start such as all-plus, the law of
/// X_t is uniform on each magnetization class, so distances to the Gibbs
/// measure equal distances between magnetization laws.
class MagnetizationChain {
 public:
  using State = int;

  MagnetizationChain(int n, double beta);

  int n() const noexcept { return n_; }
  double beta() const noexcept { return beta_; }

  /// One Glauber step seen through m: a plus vertex is picked with
  /// probability (n + m) / 2n, then refreshed with the heat-bath coin.
  void step(State& m, Rng& rng) const;
  void update(State& m, double vertex_u, double coin_u) const;
  std::vector<State> neighbors(const State& m) const;
  double distance(const State& a, const State& b) const;

  std::size_t size() const { return static_cast<std::size_t>(n_) + 1; }
  State state(std::size_t id) const { return 2 * static_cast<int>(id) - n_; }
  std::size_t index(const State& m) const { return static_cast<std::size_t>((m + n_) / 2); }
  std::vector<std::pair<State, double>> transitions(const State& m) const;

  double up_probability(int m) const;    // m -> m + 2
  double down_probability(int m) const;  // m -> m - 2

 private:
  int n_;
  double beta_;
};

/// Shared vertex-type and coin uniforms for two magnetization chains.
class MagnetizationCoupling {
 public:
  explicit MagnetizationCoupling(const MagnetizationChain& chain) : chain_(&chain) {}
  void joint_step(int& x, int& y, Rng& rng) const;

 private:
  const MagnetizationChain* chain_;
};

/// Mirror coupling of two magnetization chains: while the gap (in units
/// of 2) is even, an up move of the upper copy is paired with a down move
/// of the lower one and vice versa; on an odd gap the copies move
/// independently so the gap can change parity. The gap then behaves like
/// a walk with variance of order one per step, and the copies meet on the
/// diffusive time scale rather than the contraction time scale.
class MagnetizationReflectionCoupling {
 public:
  explicit MagnetizationReflectionCoupling(const MagnetizationChain& chain) : chain_(&chain) {}
  void joint_step(int& x, int& y, Rng& rng) const;

 private:
  const MagnetizationChain* chain_;
};

struct BimodalityRow {
  double c = 0.0;
  double mass_upper = 0.0;  // pi(m >= c n)
  double mass_lower = 0.0;  // pi(m <= -c n)
};

struct BimodalityReport {
  int n = 0;
  double beta = 0.0;
  bool bimodal = false;
  double witness_c = 0.0;  // largest scanned c with both masses >= 1/4 (0 if none)
  double c_min = 0.0;
  std::vector<BimodalityRow> scan;
};

/// Scans c on [3/sqrt(n), 1] and declares bimodality iff both
/// pi(m >= cn) and pi(m <= -cn) reach 1/4 for some scanned c. The lower
/// end keeps cn beyond three standard deviations of independent spins, so
/// ordinary sqrt(n) fluctuations never count as a mode.
BimodalityReport ising_bimodality_check(int n, double beta, std::size_t grid_points = 200);

/// Mass of pi(|m| >= c n) via the magnetization law.
double ising_abs_magnetization_mass(const MagnetizationLaw& law, double c);

struct NormalRateFit {
  double beta = 0.0;
  std::vector<int> sizes;
  std::vector<double> alphas;  // exact one-step contraction per size
  std::vector<double> c2;      // 2 alpha^2 / (n (1 - alpha^2)) per size
  double c2_fitted = 0.0;      // max over sizes
};

/// Exact one-step contraction on small complete graphs, mapped to the
/// constant c2 of the normal-concentration shape 2 exp(-u^2 / (c2 n)).
/// Requires beta < 1 so every alpha < 1.
NormalRateFit ising_fit_normal_rate(double beta, const std::vector<int>& sizes);

}  // namespace mixlab
