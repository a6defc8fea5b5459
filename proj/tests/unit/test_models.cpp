#include <doctest.h>

#include <bit>
#include <cmath>
#include <map>
#include <numeric>

#include "mixlab/chaos.hpp"
#include "mixlab/exact.hpp"
#include "mixlab/fluid.hpp"
#include "mixlab/ising.hpp"
#include "mixlab/linext.hpp"
#include "mixlab/supermarket.hpp"
#include "oracles.hpp"

using namespace mixlab;

TEST_CASE("Glauber heat-bath probability") {
  CHECK(glauber_plus_probability(2, 1.0, 1) == doctest::Approx(1.0 / (1.0 + std::exp(-1.0))).epsilon(1e-14));
  CHECK(glauber_plus_probability(2, 1.0, 1) == doctest::Approx(0.73106).epsilon(1e-5));
  for (int s : {-5, 0, 3}) CHECK(glauber_plus_probability(9, 0.0, s) == 0.5);

  const IsingChain chain(2, 1.0);
  auto cfg = IsingConfig::all_plus(2);
  chain.update(cfg, 0, 0.73);
  CHECK(cfg.spins[0] == 1);
  chain.update(cfg, 0, 0.7311);
  CHECK(cfg.spins[0] == -1);
  CHECK(cfg.magnetization == 0);
}

TEST_CASE("Curie-Weiss Gibbs measure and reversibility") {
  const auto g = ising_gibbs_exact(2, 2.0);
  const double pp = std::exp(1.0) / (2 * std::exp(1.0) + 2 * std::exp(-1.0));
  CHECK(g[3] == doctest::Approx(pp).epsilon(1e-14));
  CHECK(g[0] == doctest::Approx(pp).epsilon(1e-14));
  CHECK(g[0] == doctest::Approx(0.44039).epsilon(1e-5));

  for (int n = 1; n <= 6; ++n) {
    for (double beta : {0.0, 0.5, 1.0, 2.5}) {
      const auto gibbs = ising_gibbs_exact(n, beta);
      const auto ref = oracle::curie_weiss(n, beta);
      double mean_m = 0.0;
      for (std::size_t i = 0; i < ref.size(); ++i) {
        CHECK(std::abs(gibbs[i] - ref[i]) <= 1e-12);
        mean_m += gibbs[i] * (2.0 * std::popcount(i) - n);
      }
      CHECK(std::abs(mean_m) <= 1e-12);
      if (n < 2) continue;
      const Kernel k = build_kernel(IsingChain(n, beta));
      for (std::size_t x = 0; x < k.size(); ++x)
        for (std::size_t y = 0; y < k.size(); ++y)
          CHECK(std::abs(gibbs[x] * k.prob(x, y) - gibbs[y] * k.prob(y, x)) <= 1e-12);
    }
  }
}

TEST_CASE("magnetization law matches enumeration") {
  for (int n : {3, 8}) {
    const double beta = 0.9;
    const auto law = ising_magnetization_law(n, beta);
    const auto ref = oracle::curie_weiss(n, beta);
    std::vector<double> by_m(static_cast<std::size_t>(n) + 1, 0.0);
    for (std::size_t i = 0; i < ref.size(); ++i) by_m[static_cast<std::size_t>(std::popcount(i))] += ref[i];
    for (std::size_t j = 0; j < law.values.size(); ++j) {
      const int plus = (law.values[j] + n) / 2;
      CHECK(law.probs[j] == doctest::Approx(by_m[static_cast<std::size_t>(plus)]).epsilon(1e-12));
    }
    CHECK(std::abs(law.mean()) <= 1e-12);
  }
}

TEST_CASE("magnetization chain is the lumped Glauber chain") {
  const int n = 5;
  const double beta = 1.3;
  const IsingChain full(n, beta);
  const MagnetizationChain lumped(n, beta);
  const Kernel k = build_kernel(full);
  for (std::size_t x = 0; x < k.size(); ++x) {
    const int m = full.state(x).magnetization;
    std::map<int, double> agg;
    for (std::size_t y = 0; y < k.size(); ++y) agg[full.state(y).magnetization] += k.prob(x, y);
    for (const auto& [mm, p] : lumped.transitions(m)) CHECK(p == doctest::Approx(agg[mm]).epsilon(1e-12));
  }
}

TEST_CASE("bimodality") {
  CHECK_FALSE(ising_bimodality_check(1000, 0.5).bimodal);
  const auto hot = ising_bimodality_check(1000, 1.5);
  CHECK(hot.bimodal);
  CHECK(hot.witness_c > 0.0);
  for (int n : {16, 64, 256}) {
    const auto law = ising_magnetization_law(n, 0.0);
    CHECK(law.mass_at_least(n / 2) < 0.25);
    CHECK(law.mass_at_most(-n / 2) < 0.25);
  }
}

TEST_CASE("supermarket transitions follow the tie rule") {
  const SupermarketChain chain(3, 0.5, 2);
  QueueState q(std::vector<int>{0, 0});
  const SupermarketChain two(2, 0.5, 2);
  const std::vector<int> t21 = {1, 0};  // queues 2 and 1, zero-based
  two.apply_arrival(q, t21);
  CHECK(q.lengths() == std::vector<int>{0, 1});

  QueueState e(std::vector<int>{0, 0});
  two.apply_departure(e, 0);
  two.apply_departure(e, 1);
  CHECK(e.lengths() == std::vector<int>{0, 0});

  QueueState s(std::vector<int>{3, 1});
  const std::vector<int> t12 = {0, 1};
  two.apply_arrival(s, t12);
  CHECK(s.lengths() == std::vector<int>{3, 2});
  CHECK(s.total() == 5);
  CHECK(s.max() == 3);
  CHECK(s.at_least(2) == 2);
  (void)chain;
}

TEST_CASE("supermarket steps change the load by one or zero") {
  const SupermarketChain chain(20, 0.8, 3);
  Rng rng(4, 0);
  QueueState s(20);
  for (int i = 0; i < 20000; ++i) {
    const long before = s.total();
    chain.step(s, rng);
    const long diff = s.total() - before;
    CHECK((diff == 1 || diff == -1 || diff == 0));
    if (diff == 0) CHECK(before >= 0);
  }
  int recount = 0, top = 0;
  for (int l : s.lengths()) {
    recount += l;
    top = std::max(top, l);
  }
  CHECK(recount == s.total());
  CHECK(top == s.max());
  for (int k = 0; k <= top + 1; ++k) {
    const auto c = std::count_if(s.lengths().begin(), s.lengths().end(), [k](int l) { return l >= k; });
    CHECK(c == s.at_least(k));
  }
}

TEST_CASE("supermarket exact rows sum to one") {
  const SupermarketChain chain(3, 0.6, 2);
  const QueueState s(std::vector<int>{1, 0, 2});
  double total = 0.0;
  for (const auto& [t, p] : chain.transitions(s)) total += p;
  CHECK(total == doctest::Approx(1.0).epsilon(1e-14));
}

TEST_CASE("fluid fixed point") {
  CHECK(fluid_fixed_point(0.7, 2, 3) == doctest::Approx(std::pow(0.7, 7)));
  CHECK(fluid_fixed_point(0.7, 1, 3) == doctest::Approx(std::pow(0.7, 3)));
  CHECK(fluid_fixed_point(0.7, 3, 2) == doctest::Approx(std::pow(0.7, 4)));
  for (int d : {1, 2}) {
    const int km = default_fluid_kmax(0.7, d);
    CHECK(fluid_fixed_point(0.7, d, km) < 1e-14);
    CHECK(fluid_fixed_point(0.7, d, km - 1) >= 1e-14);
    const auto fp = fluid_fixed_point_state(0.7, d, km);
    const auto out = fluid_ode_integrate(0.7, d, fp, 10.0, 0.01);
    CHECK(fluid_fixed_point_error(0.7, d, out) <= 1e-9);
  }
}

TEST_CASE("fluid ODE converges from empty at two step sizes") {
  const int km = default_fluid_kmax(0.7, 2);
  const auto a = fluid_ode_integrate(0.7, 2, fluid_empty_state(km), 200.0, 0.05);
  const auto b = fluid_ode_integrate(0.7, 2, fluid_empty_state(km), 200.0, 0.025);
  CHECK(fluid_fixed_point_error(0.7, 2, a) <= 1e-6);
  CHECK(fluid_fixed_point_error(0.7, 2, b) <= 1e-6);
  for (int k = 0; k <= km; ++k) CHECK(std::abs(a.v[k] - b.v[k]) <= 1e-8);
  CHECK(a.t == doctest::Approx(200.0));
}

TEST_CASE("fluid ODE rejects unstable steps and bad input") {
  const int km = default_fluid_kmax(0.9, 3);
  CHECK_THROWS_AS(fluid_ode_integrate(0.9, 3, fluid_empty_state(km), 10.0, 5.0), FluidInstability);
  FluidState bad = fluid_empty_state(4);
  bad.v[2] = 0.5;
  CHECK_THROWS(fluid_ode_integrate(0.9, 2, bad, 1.0, 0.01));
}

TEST_CASE("max-queue predictor") {
  CHECK(md_predictor(1e4, 0.9, 2) == 3);
  CHECK(md_predictor(1e4, 0.5, 2) == 2);
  int prev = 0;
  for (double n = 100; n < 1e9; n *= 1.5) {
    const int m = md_predictor(n, 0.9, 2);
    CHECK(m >= prev);
    prev = m;
  }
  CHECK_THROWS(md_predictor(1e4, 0.9, 1));
}

TEST_CASE("max-queue summary") {
  const auto s = summarize_max_queue({5, 6, 6, 6, 5, 7});
  CHECK(s.top == 6);
  CHECK(s.second == 5);
  CHECK(s.adjacent);
  CHECK(s.top_two_mass == doctest::Approx(5.0 / 6.0));
  CHECK_FALSE(summarize_max_queue({3, 3, 5}).adjacent);
  CHECK(summarize_max_queue({4, 4}).adjacent);
}

TEST_CASE("equilibrium levels track the fixed point") {
  const SupermarketChain chain(200, 0.7, 2);
  const auto lv = equilibrium_levels(chain, default_burn_in(200), 400000, 3, 5);
  CHECK(lv.fraction[0] == doctest::Approx(1.0));
  for (int k = 1; k <= 3; ++k) CHECK(std::abs(lv.fraction[k] - fluid_fixed_point(0.7, 2, k)) <= 0.03);
}

TEST_CASE("linear-extension moves") {
  const LinextChain two(2);
  Rng rng(1, 1);
  for (int i = 0; i < 10; ++i) {
    int p = 1;
    two.step(p, rng);
    CHECK(p == 2);
  }
  const LinextChain chain(5);
  int p = 3;
  chain.apply(p, 3);
  CHECK(p == 4);
  chain.apply(p, 3);
  CHECK(p == 3);
  chain.apply(p, 1);
  CHECK(p == 3);
  CHECK(chain.neighbors(1) == std::vector<int>{2});
  CHECK(chain.neighbors(5) == std::vector<int>{4});
  CHECK(Kernel(build_kernel(two)).period() == 2);
}

TEST_CASE("linear-extension stationary law is uniform") {
  for (int n = 3; n <= 12; ++n) {
    const auto pi = stationary(build_kernel(LinextChain(n)));
    for (std::size_t i = 0; i < pi.size(); ++i) CHECK(pi[i] == doctest::Approx(1.0 / n).epsilon(1e-10));
  }
  CHECK(linext_stationary_stddev(64) == doctest::Approx(std::sqrt((64.0 * 64.0 - 1) / 12)));
  const auto s = linext_position_summary(LinextChain(12), 20000, 200000, 8, 2);
  CHECK(s.mean == doctest::Approx(6.5).epsilon(0.05));
  CHECK(s.stddev == doctest::Approx(linext_stationary_stddev(12)).epsilon(0.05));
}

TEST_CASE("chaos estimator") {
  // Independent uniform cells: the plug-in TV sits on the null.
  Rng rng(6, 0);
  std::vector<std::vector<int>> snaps;
  for (int s = 0; s < 400; ++s) {
    std::vector<int> q(40);
    for (auto& x : q) x = static_cast<int>(rng.below(5));
    snaps.push_back(q);
  }
  const auto est = chaoticity_estimator(snaps);
  CHECK(std::abs(est.z) < 3.0);
  CHECK(est.tuples == 400 * 20);

  // Product of identical marginals, laid out exactly.
  std::vector<std::vector<int>> grid;
  for (int a = 0; a < 5; ++a)
    for (int b = 0; b < 5; ++b) grid.push_back({a, b});
  CHECK(chaos_tv(grid, 2, 4) == doctest::Approx(0.0).epsilon(1e-15));

  // Perfectly correlated pairs.
  std::vector<std::vector<int>> diag;
  for (int i = 0; i < 500; ++i) diag.push_back({i % 2, i % 2});
  CHECK(chaos_tv(diag, 2, 4) == doctest::Approx(0.5));

  CHECK_THROWS_AS(chaoticity_estimator({{1, 2}, {2, 1}}), InsufficientSamples);
}

TEST_CASE("chaos: independent queues for d = 1, decreasing estimate for d = 2") {
  const int n1 = 100;
  const SupermarketChain one(n1, 0.7, 1);
  const auto s1 = queue_snapshots(one, default_burn_in(n1), 20 * n1, 400, 3);
  CHECK(std::abs(chaoticity_estimator(s1).z) < 3.0);

  double prev = 1.0;
  for (int n : {50, 200, 800}) {
    const SupermarketChain chain(n, 0.7, 2);
    const auto snaps = queue_snapshots(chain, default_burn_in(n), 20 * static_cast<std::uint64_t>(n), 300, 4);
    const double tv = chaoticity_estimator(snaps).tv;
    CHECK(tv < prev);
    prev = tv;
  }
}
