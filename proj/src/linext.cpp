#include "mixlab/linext.hpp"

#include <cmath>
#include <cstdlib>
#include <stdexcept>

#include "mixlab/parallel.hpp"
#include "mixlab/stats.hpp"

namespace mixlab {

LinextChain::LinextChain(int n) : n_(n) {
  if (n < 2) throw std::invalid_argument("LinextChain: n must be >= 2");
}

void LinextChain::apply(State& p, int i) const {
  if (p == i) {
    p = i + 1;
  } else if (p == i + 1) {
    p = i;
  }
}

void LinextChain::step(State& p, Rng& rng) const {
  apply(p, 1 + static_cast<int>(rng.below(static_cast<std::uint64_t>(n_ - 1))));
}

std::vector<int> LinextChain::neighbors(const State& p) const {
  std::vector<int> out;
  if (p > 1) out.push_back(p - 1);
  if (p < n_) out.push_back(p + 1);
  return out;
}

double LinextChain::distance(const State& a, const State& b) const {
  return static_cast<double>(std::abs(a - b));
}

std::vector<std::pair<int, double>> LinextChain::transitions(const State& p) const {
  const double w = 1.0 / (n_ - 1);
  std::vector<std::pair<int, double>> out;
  double stay = 1.0;
  for (int q : neighbors(p)) {
    out.emplace_back(q, w);
    stay -= w;
  }
  if (stay > 1e-15) out.emplace_back(p, stay);
  return out;
}

double linext_stationary_stddev(int n) {
  return std::sqrt((static_cast<double>(n) * n - 1.0) / 12.0);
}

PositionSummary linext_position_summary(const LinextChain& chain, std::uint64_t burn_in,
                                        std::uint64_t steps, std::size_t replicas,
                                        std::uint64_t seed) {
  if (replicas == 0 || steps == 0) throw std::invalid_argument("linext_position_summary: empty run");
  check_budget(static_cast<long double>(replicas) * (burn_in + steps), "linext_position_summary");
  std::vector<RunningStats> per(replicas);
  parallel_for(replicas, [&](std::size_t r) {
    Rng rng(seed, r);
    int p = 1;
    for (std::uint64_t t = 0; t < burn_in; ++t) chain.step(p, rng);
    for (std::uint64_t t = 0; t < steps; ++t) {
      chain.step(p, rng);
      per[r].add(p);
    }
  });
  RunningStats total;
  for (const auto& s : per) total.merge(s);
  return {total.mean, std::sqrt(total.m2 / static_cast<double>(total.count)), total.count};
}

}  // namespace mixlab
