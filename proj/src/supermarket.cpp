#include "mixlab/supermarket.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <stdexcept>

namespace mixlab {

QueueState::QueueState(int n) : QueueState(std::vector<int>(static_cast<std::size_t>(n), 0)) {}

QueueState::QueueState(std::vector<int> lengths) : len_(std::move(lengths)) {
  if (len_.empty()) throw std::invalid_argument("QueueState: need at least one queue");
  for (int l : len_) {
    if (l < 0) throw std::invalid_argument("QueueState: negative queue length");
    max_ = std::max(max_, l);
    total_ += l;
  }
  at_least_.assign(static_cast<std::size_t>(max_) + 2, 0);
  for (int l : len_) {
    for (int k = 0; k <= l; ++k) ++at_least_[static_cast<std::size_t>(k)];
  }
}

void QueueState::add(int i) {
  const int l = ++len_[static_cast<std::size_t>(i)];
  if (l > max_) {
    max_ = l;
    at_least_.resize(static_cast<std::size_t>(max_) + 2, 0);
  }
  ++at_least_[static_cast<std::size_t>(l)];
  ++total_;
}

bool QueueState::remove(int i) {
  int& l = len_[static_cast<std::size_t>(i)];
  if (l == 0) return false;
  --at_least_[static_cast<std::size_t>(l)];
  if (l == max_ && at_least_[static_cast<std::size_t>(l)] == 0) --max_;
  --l;
  --total_;
  return true;
}

SupermarketChain::SupermarketChain(int n, double lambda, int d) : n_(n), lambda_(lambda), d_(d) {
  if (n < 1) throw std::invalid_argument("SupermarketChain: n must be >= 1");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("SupermarketChain: lambda must lie in (0,1)");
  if (d < 1) throw std::invalid_argument("SupermarketChain: d must be >= 1");
}

int SupermarketChain::choose_queue(const State& s, std::span<const int> tuple) {
  int best = tuple[0];
  for (std::size_t j = 1; j < tuple.size(); ++j) {
    if (s[tuple[j]] < s[best]) best = tuple[j];
  }
  return best;
}

void SupermarketChain::apply_arrival(State& s, std::span<const int> tuple) const {
  s.add(choose_queue(s, tuple));
}

void SupermarketChain::apply_departure(State& s, int queue) const { s.remove(queue); }

void SupermarketChain::step(State& s, Rng& rng) const {
  const auto n = static_cast<std::uint64_t>(n_);
  if (rng.uniform() < arrival_probability()) {
    int best = static_cast<int>(rng.below(n));
    for (int j = 1; j < d_; ++j) {
      const int q = static_cast<int>(rng.below(n));
      if (s[q] < s[best]) best = q;
    }
    s.add(best);
  } else {
    s.remove(static_cast<int>(rng.below(n)));
  }
}

std::vector<QueueState> SupermarketChain::neighbors(const State& s) const {
  std::vector<QueueState> out;
  out.reserve(2 * static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) {
    QueueState up = s;
    up.add(i);
    out.push_back(std::move(up));
    if (s[i] > 0) {
      QueueState down = s;
      down.remove(i);
      out.push_back(std::move(down));
    }
  }
  return out;
}

double SupermarketChain::distance(const State& a, const State& b) const {
  long d = 0;
  for (int i = 0; i < n_; ++i) d += std::abs(a[i] - b[i]);
  return static_cast<double>(d);
}

namespace {

// Calls fn(tuple, weight) for every d-tuple of queue indices.
template <class Fn>
void for_each_tuple(int n, int d, Fn&& fn) {
  double count = std::pow(static_cast<double>(n), d);
  if (count > 1e6) throw std::invalid_argument("supermarket transitions: n^d too large to enumerate");
  std::vector<int> tuple(static_cast<std::size_t>(d), 0);
  const double w = 1.0 / count;
  for (;;) {
    fn(std::span<const int>(tuple), w);
    int j = d - 1;
    while (j >= 0 && ++tuple[static_cast<std::size_t>(j)] == n) tuple[static_cast<std::size_t>(j--)] = 0;
    if (j < 0) break;
  }
}

}  // namespace

std::vector<std::pair<QueueState, double>> SupermarketChain::transitions(const State& s) const {
  std::map<QueueState, double> acc;
  const double pa = arrival_probability();
  for_each_tuple(n_, d_, [&](std::span<const int> tuple, double w) {
    QueueState t = s;
    apply_arrival(t, tuple);
    acc[t] += pa * w;
  });
  for (int i = 0; i < n_; ++i) {
    QueueState t = s;
    t.remove(i);
    acc[t] += (1.0 - pa) / n_;
  }
  return {acc.begin(), acc.end()};
}

void SupermarketCoupling::joint_step(QueueState& x, QueueState& y, Rng& rng) const {
  const auto n = static_cast<std::uint64_t>(chain_->n());
  if (rng.uniform() < chain_->arrival_probability()) {
    int bx = static_cast<int>(rng.below(n));
    int by = bx;
    for (int j = 1; j < chain_->d(); ++j) {
      const int q = static_cast<int>(rng.below(n));
      if (x[q] < x[bx]) bx = q;
      if (y[q] < y[by]) by = q;
    }
    x.add(bx);
    y.add(by);
  } else {
    const int q = static_cast<int>(rng.below(n));
    x.remove(q);
    y.remove(q);
  }
}

std::vector<std::pair<std::pair<QueueState, QueueState>, double>> SupermarketCoupling::joint_transitions(
    const QueueState& x, const QueueState& y) const {
  std::map<std::pair<QueueState, QueueState>, double> acc;
  const double pa = chain_->arrival_probability();
  for_each_tuple(chain_->n(), chain_->d(), [&](std::span<const int> tuple, double w) {
    QueueState a = x, b = y;
    chain_->apply_arrival(a, tuple);
    chain_->apply_arrival(b, tuple);
    acc[{std::move(a), std::move(b)}] += pa * w;
  });
  for (int i = 0; i < chain_->n(); ++i) {
    QueueState a = x, b = y;
    a.remove(i);
    b.remove(i);
    acc[{std::move(a), std::move(b)}] += (1.0 - pa) / chain_->n();
  }
  return {acc.begin(), acc.end()};
}

double fluid_fixed_point(double lambda, int d, int k) {
  if (k <= 0) return 1.0;
  const double exponent = d == 1 ? static_cast<double>(k)
                                 : (std::pow(static_cast<double>(d), k) - 1.0) / (d - 1.0);
  return std::exp(exponent * std::log(lambda));
}

std::uint64_t default_burn_in(int n, double factor) {
  return static_cast<std::uint64_t>(std::ceil(factor * n * std::log(static_cast<double>(n))));
}

LevelProfile equilibrium_levels(const SupermarketChain& chain, std::uint64_t burn_in,
                                std::uint64_t steps, int k_max, std::uint64_t seed,
                                std::uint64_t replica) {
  check_budget(static_cast<long double>(burn_in) + steps, "equilibrium_levels");
  Rng rng(seed, replica);
  QueueState s(chain.n());
  for (std::uint64_t t = 0; t < burn_in; ++t) chain.step(s, rng);
  std::vector<long double> sums(static_cast<std::size_t>(k_max) + 1, 0.0L);
  for (std::uint64_t t = 0; t < steps; ++t) {
    chain.step(s, rng);
    const int top = std::min(k_max, s.max());
    for (int k = 0; k <= top; ++k) sums[static_cast<std::size_t>(k)] += s.at_least(k);
  }
  LevelProfile out;
  out.burn_in = burn_in;
  out.steps = steps;
  for (auto v : sums) {
    out.fraction.push_back(steps == 0 ? 0.0
                                      : static_cast<double>(v / (static_cast<long double>(steps) * chain.n())));
  }
  return out;
}

std::vector<int> max_queue_samples(const SupermarketChain& chain, std::uint64_t burn_in,
                                   std::uint64_t spacing, std::size_t count, std::uint64_t seed,
                                   std::uint64_t replica) {
  check_budget(static_cast<long double>(burn_in) + static_cast<long double>(spacing) * count,
               "max_queue_samples");
  Rng rng(seed, replica);
  QueueState s(chain.n());
  for (std::uint64_t t = 0; t < burn_in; ++t) chain.step(s, rng);
  std::vector<int> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::uint64_t t = 0; t < spacing; ++t) chain.step(s, rng);
    out.push_back(s.max());
  }
  return out;
}

std::vector<std::vector<int>> queue_snapshots(const SupermarketChain& chain, std::uint64_t burn_in,
                                              std::uint64_t spacing, std::size_t count,
                                              std::uint64_t seed, std::uint64_t replica) {
  check_budget(static_cast<long double>(burn_in) + static_cast<long double>(spacing) * count,
               "queue_snapshots");
  Rng rng(seed, replica);
  QueueState s(chain.n());
  for (std::uint64_t t = 0; t < burn_in; ++t) chain.step(s, rng);
  std::vector<std::vector<int>> out;
  out.reserve(count);
  for (std::size_t c = 0; c < count; ++c) {
    for (std::uint64_t t = 0; t < spacing; ++t) chain.step(s, rng);
    out.push_back(s.lengths());
  }
  return out;
}

int md_predictor(double n, double lambda, int d) {
  if (d < 2) throw std::invalid_argument("md_predictor: d must be >= 2");
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("md_predictor: lambda must lie in (0,1)");
  if (!(n > 1.0)) throw std::invalid_argument("md_predictor: n must be > 1");
  const double log_n = std::log(n);
  const double log_threshold = -0.5 * log_n + 2.0 * std::log(log_n);
  int i = 0;
  // log lambda^{(d^i-1)/(d-1)} decreases without bound, so the loop ends.
  while (((std::pow(static_cast<double>(d), i) - 1.0) / (d - 1.0)) * std::log(lambda) >= log_threshold) ++i;
  return d == 2 ? i + 1 : i;
}

MaxQueueSummary summarize_max_queue(const std::vector<int>& samples) {
  if (samples.empty()) throw std::invalid_argument("summarize_max_queue: no samples");
  std::map<int, std::size_t> counts;
  for (int v : samples) ++counts[v];
  MaxQueueSummary s;
  s.histogram.assign(counts.begin(), counts.end());
  auto ranked = s.histogram;
  // Most frequent first; ties go to the smaller value.
  std::stable_sort(ranked.begin(), ranked.end(),
                   [](const auto& a, const auto& b) { return a.second > b.second; });
  s.top = ranked[0].first;
  std::size_t mass = ranked[0].second;
  if (ranked.size() > 1) {
    s.second = ranked[1].first;
    mass += ranked[1].second;
    s.adjacent = std::abs(s.top - s.second) == 1;
  } else {
    s.second = s.top;
    s.adjacent = true;
  }
  s.top_two_mass = static_cast<double>(mass) / static_cast<double>(samples.size());
  return s;
}

}  // namespace mixlab
