#include "mixlab/kernel.hpp"

#include <cmath>
#include <deque>
#include <numeric>

namespace mixlab {

Dist Dist::point_mass(std::size_t n, std::size_t at) {
  if (at >= n) throw InvalidChain("point_mass: index out of range");
  std::vector<double> w(n, 0.0);
  w[at] = 1.0;
  return Dist(std::move(w));
}

Dist Dist::uniform(std::size_t n) {
  if (n == 0) throw InvalidChain("uniform: empty state space");
  return Dist(std::vector<double>(n, 1.0 / static_cast<double>(n)));
}

void Dist::validate(double tol) const {
  if (weights.empty()) throw InvalidChain("distribution is empty");
  double sum = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0)) throw InvalidChain("distribution has a negative or NaN weight");
    sum += w;
  }
  if (std::abs(sum - 1.0) > tol) {
    throw InvalidChain("distribution sums to " + std::to_string(sum) + ", not 1");
  }
}

Kernel::Kernel(Eigen::MatrixXd transition, std::vector<std::string> labels)
    : p_(std::move(transition)), labels_(std::move(labels)) {
  const auto n = static_cast<std::size_t>(p_.rows());
  if (n == 0 || p_.cols() != p_.rows()) throw InvalidChain("kernel must be square and non-empty");
  if (!labels_.empty() && labels_.size() != n) {
    throw InvalidChain("state_labels length does not match n_states");
  }
  adjacency_.assign(n, {});
  for (std::size_t x = 0; x < n; ++x) {
    double sum = 0.0;
    for (std::size_t y = 0; y < n; ++y) {
      const double v = p_(x, y);
      if (!(v >= 0.0)) {
        throw InvalidChain("kernel row " + std::to_string(x) + " has a negative or NaN entry");
      }
      sum += v;
      if (v > 0.0 && x != y) {
        if (!(p_(y, x) > 0.0)) {
          throw InvalidChain("kernel support is not symmetric at (" + std::to_string(x) + "," +
                             std::to_string(y) + ")");
        }
        adjacency_[x].push_back(y);
      }
    }
    if (std::abs(sum - 1.0) > 1e-12) {
      throw InvalidChain("kernel row " + std::to_string(x) + " sums to " + std::to_string(sum));
    }
  }

  // All-pairs BFS on the unweighted transition graph.
  metric_.assign(n * n, -1);
  std::deque<std::size_t> queue;
  for (std::size_t s = 0; s < n; ++s) {
    int* row = metric_.data() + s * n;
    row[s] = 0;
    queue.assign(1, s);
    while (!queue.empty()) {
      const std::size_t u = queue.front();
      queue.pop_front();
      for (std::size_t v : adjacency_[u]) {
        if (row[v] < 0) {
          row[v] = row[u] + 1;
          queue.push_back(v);
        }
      }
    }
    for (std::size_t y = 0; y < n; ++y) {
      if (row[y] < 0) throw InvalidChain("transition graph is not connected");
      diameter_ = std::max(diameter_, row[y]);
    }
  }
}

Kernel Kernel::from_triplets(std::size_t n_states, std::span<const Triplet> triplets,
                             std::vector<std::string> labels) {
  Eigen::MatrixXd p = Eigen::MatrixXd::Zero(static_cast<Eigen::Index>(n_states),
                                            static_cast<Eigen::Index>(n_states));
  for (const auto& t : triplets) {
    if (t.row >= n_states || t.col >= n_states) throw InvalidChain("triplet index out of range");
    p(static_cast<Eigen::Index>(t.row), static_cast<Eigen::Index>(t.col)) += t.prob;
  }
  return Kernel(std::move(p), std::move(labels));
}

std::vector<std::pair<std::size_t, std::size_t>> Kernel::adjacent_pairs() const {
  std::vector<std::pair<std::size_t, std::size_t>> out;
  for (std::size_t x = 0; x < size(); ++x) {
    for (std::size_t y : adjacency_[x]) {
      if (x < y) out.emplace_back(x, y);
    }
  }
  return out;
}

std::vector<double> Kernel::cost_table() const {
  return std::vector<double>(metric_.begin(), metric_.end());
}

std::size_t Kernel::period() const {
  // BFS levels on the directed support; gcd over arcs of level(u)+1-level(v).
  const std::size_t n = size();
  std::vector<long> level(n, -1);
  std::deque<std::size_t> queue{0};
  level[0] = 0;
  long g = 0;
  while (!queue.empty()) {
    const std::size_t u = queue.front();
    queue.pop_front();
    for (std::size_t v = 0; v < n; ++v) {
      if (!(p_(u, v) > 0.0)) continue;
      if (level[v] < 0) {
        level[v] = level[u] + 1;
        queue.push_back(v);
      } else {
        g = std::gcd(g, std::labs(level[u] + 1 - level[v]));
      }
    }
  }
  return g == 0 ? 0 : static_cast<std::size_t>(g);
}

std::vector<Triplet> Kernel::triplets() const {
  std::vector<Triplet> out;
  for (std::size_t x = 0; x < size(); ++x) {
    for (std::size_t y = 0; y < size(); ++y) {
      if (p_(x, y) > 0.0) out.push_back({x, y, p_(x, y)});
    }
  }
  return out;
}

}  // namespace mixlab
