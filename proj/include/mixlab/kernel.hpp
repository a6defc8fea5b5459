#pragma once

#include <cstddef>
#include <limits>
#include <span>
#include <stdexcept>
#include <string>
#include <tuple>
#include <vector>

#include <Eigen/Dense>

#include "mixlab/chain.hpp"

namespace mixlab {

/// Raised for malformed kernels, distributions or chains that violate the
/// structural assumptions (symmetric support, connectivity, aperiodicity).
class InvalidChain : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

/// Probability vector over an enumerated state space.
struct Dist {
  std::vector<double> weights;

  Dist() = default;
  explicit Dist(std::vector<double> w) : weights(std::move(w)) {}

  static Dist point_mass(std::size_t n, std::size_t at);
  static Dist uniform(std::size_t n);

  std::size_t size() const noexcept { return weights.size(); }
  double operator[](std::size_t i) const { return weights[i]; }
  std::span<const double> view() const noexcept { return weights; }

  /// Throws InvalidChain unless weights are >= 0 and sum to 1 within tol.
  void validate(double tol = 1e-12) const;
};

struct Triplet {
  std::size_t row;
  std::size_t col;
  double prob;
};

/// Row-stochastic transition matrix of a finite chain together with the
/// shortest-path metric of its transition graph (x ~ y iff P(x,y) > 0,
/// x != y). Immutable after construction.
class Kernel {
 public:
  /// Validates: rows non-negative and summing to 1 within 1e-12,
  /// P(x,y) > 0 iff P(y,x) > 0, transition graph connected.
  explicit Kernel(Eigen::MatrixXd transition, std::vector<std::string> labels = {});
  static Kernel from_triplets(std::size_t n_states, std::span<const Triplet> triplets,
                              std::vector<std::string> labels = {});

  std::size_t size() const noexcept { return static_cast<std::size_t>(p_.rows()); }
  const Eigen::MatrixXd& matrix() const noexcept { return p_; }
  double prob(std::size_t x, std::size_t y) const { return p_(x, y); }
  int distance(std::size_t x, std::size_t y) const { return metric_[x * size() + y]; }
  int diameter() const noexcept { return diameter_; }
  const std::vector<std::string>& labels() const noexcept { return labels_; }

  /// Neighbours of x in the transition graph (self-loops excluded).
  const std::vector<std::size_t>& neighbors(std::size_t x) const { return adjacency_[x]; }
  /// All unordered adjacent pairs (x < y).
  std::vector<std::pair<std::size_t, std::size_t>> adjacent_pairs() const;

  /// Metric as a dense cost table, row-major.
  std::vector<double> cost_table() const;

  /// Period of the (irreducible) chain: gcd of cycle lengths.
  std::size_t period() const;

  std::vector<Triplet> triplets() const;

 private:
  Eigen::MatrixXd p_;
  std::vector<std::string> labels_;
  std::vector<std::vector<std::size_t>> adjacency_;
  std::vector<int> metric_;
  int diameter_ = 0;
};

/// Sampled view of a kernel: states are ids, steps draw from the row by
/// inverse CDF.
class KernelChain {
 public:
  using State = std::size_t;

  explicit KernelChain(const Kernel& k) : k_(&k) {}

  void step(State& x, Rng& rng) const {
    const double u = rng.uniform();
    double acc = 0.0;
    const auto& p = k_->matrix();
    const auto n = static_cast<Eigen::Index>(k_->size());
    Eigen::Index last = 0;
    for (Eigen::Index y = 0; y < n; ++y) {
      const double w = p(static_cast<Eigen::Index>(x), y);
      if (w <= 0.0) continue;
      last = y;
      acc += w;
      if (u < acc) {
        x = static_cast<State>(y);
        return;
      }
    }
    x = static_cast<State>(last);
  }
  std::vector<State> neighbors(const State& x) const { return k_->neighbors(x); }
  double distance(const State& a, const State& b) const { return k_->distance(a, b); }

  const Kernel& kernel() const noexcept { return *k_; }

 private:
  const Kernel* k_;
};

/// Exact kernel of an enumerable chain, indexed by the chain's own ids.
template <EnumerableChain C>
Kernel build_kernel(const C& chain) {
  const std::size_t n = chain.size();
  check_budget(static_cast<long double>(n) * static_cast<long double>(n), "build_kernel");
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n),
                                            static_cast<Eigen::Index>(n));
  for (std::size_t i = 0; i < n; ++i) {
    for (const auto& [to, w] : chain.transitions(chain.state(i))) {
      p(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(chain.index(to))) += w;
    }
  }
  return Kernel(std::move(p));
}

}  // namespace mixlab
