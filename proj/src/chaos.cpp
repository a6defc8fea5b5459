#include "mixlab/chaos.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixlab/rng.hpp"
#include "mixlab/stats.hpp"

namespace mixlab {
namespace {

std::size_t cell_count(int r, int k_max) {
  std::size_t c = 1;
  for (int j = 0; j < r; ++j) c *= static_cast<std::size_t>(k_max) + 1;
  return c;
}

// Tuples of each snapshot, grouped so that bootstrap resamples whole snapshots.
std::vector<std::vector<std::vector<int>>> group_tuples(const std::vector<std::vector<int>>& snaps,
                                                        const ChaosOptions& o) {
  std::vector<std::vector<std::vector<int>>> out;
  out.reserve(snaps.size());
  for (const auto& s : snaps) {
    if (s.size() < static_cast<std::size_t>(o.r)) {
      throw std::invalid_argument("chaoticity_estimator: snapshot has fewer than r queues");
    }
    const std::size_t groups = o.pool_groups ? s.size() / static_cast<std::size_t>(o.r) : 1;
    std::vector<std::vector<int>> ts;
    for (std::size_t g = 0; g < groups; ++g) {
      std::vector<int> t(static_cast<std::size_t>(o.r));
      for (int j = 0; j < o.r; ++j) {
        t[static_cast<std::size_t>(j)] = std::min(s[g * static_cast<std::size_t>(o.r) + static_cast<std::size_t>(j)], o.k_max);
      }
      ts.push_back(std::move(t));
    }
    out.push_back(std::move(ts));
  }
  return out;
}

}  // namespace

double chaos_tv(const std::vector<std::vector<int>>& tuples, int r, int k_max) {
  if (tuples.empty()) return 0.0;
  const std::size_t K = static_cast<std::size_t>(k_max) + 1;
  const std::size_t cells = cell_count(r, k_max);
  std::vector<double> joint(cells, 0.0);
  std::vector<std::vector<double>> marg(static_cast<std::size_t>(r), std::vector<double>(K, 0.0));
  const double w = 1.0 / static_cast<double>(tuples.size());
  for (const auto& t : tuples) {
    std::size_t id = 0;
    for (int j = 0; j < r; ++j) {
      const auto v = static_cast<std::size_t>(t[static_cast<std::size_t>(j)]);
      id = id * K + v;
      marg[static_cast<std::size_t>(j)][v] += w;
    }
    joint[id] += w;
  }
  double tv = 0.0;
  for (std::size_t id = 0; id < cells; ++id) {
    double prod = 1.0;
    std::size_t rest = id;
    for (int j = r - 1; j >= 0; --j) {
      prod *= marg[static_cast<std::size_t>(j)][rest % K];
      rest /= K;
    }
    tv += std::abs(joint[id] - prod);
  }
  return 0.5 * tv;
}

ChaosEstimate chaoticity_estimator(const std::vector<std::vector<int>>& snapshots,
                                   const ChaosOptions& o) {
  if (o.r < 2) throw std::invalid_argument("chaoticity_estimator: r must be >= 2");
  if (o.k_max < 1) throw std::invalid_argument("chaoticity_estimator: k_max must be >= 1");
  const auto grouped = group_tuples(snapshots, o);
  std::vector<std::vector<int>> all;
  for (const auto& g : grouped) all.insert(all.end(), g.begin(), g.end());
  const std::size_t need = 10 * cell_count(o.r, o.k_max);
  if (all.size() < need) {
    throw InsufficientSamples("chaoticity_estimator: " + std::to_string(all.size()) +
                              " tuples for " + std::to_string(cell_count(o.r, o.k_max)) +
                              " cells; need at least " + std::to_string(need));
  }
  ChaosEstimate est;
  est.tuples = all.size();
  est.snapshots = snapshots.size();
  est.tv = chaos_tv(all, o.r, o.k_max);

  Rng rng(o.seed, 0xc4a05);
  RunningStats boot;
  std::vector<std::vector<int>> sample;
  for (std::size_t b = 0; b < o.bootstrap; ++b) {
    sample.clear();
    for (std::size_t s = 0; s < grouped.size(); ++s) {
      const auto& g = grouped[rng.below(grouped.size())];
      sample.insert(sample.end(), g.begin(), g.end());
    }
    boot.add(chaos_tv(sample, o.r, o.k_max));
  }
  est.bootstrap_se = boot.stddev();

  RunningStats null;
  std::vector<std::vector<int>> perm = all;
  for (std::size_t p = 0; p < o.permutations; ++p) {
    for (int j = 1; j < o.r; ++j) {
      // Fisher-Yates on coordinate j only.
      for (std::size_t i = perm.size(); i > 1; --i) {
        const std::size_t k = rng.below(i);
        std::swap(perm[i - 1][static_cast<std::size_t>(j)], perm[k][static_cast<std::size_t>(j)]);
      }
    }
    null.add(chaos_tv(perm, o.r, o.k_max));
  }
  est.null_mean = null.mean;
  est.null_sd = null.stddev();
  est.excess = est.tv - est.null_mean;
  const double scale = std::hypot(est.bootstrap_se, est.null_sd);
  est.z = scale > 0.0 ? est.excess / scale : 0.0;
  return est;
}

}  // namespace mixlab
