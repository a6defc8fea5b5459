#include <doctest.h>

#include <sstream>

#include "mixlab/coupling.hpp"
#include "mixlab/ising.hpp"
#include "mixlab/supermarket.hpp"

using namespace mixlab;

namespace {

// Every row equals the same law: both copies land on the same state.
struct Reset {
  using State = int;
  std::vector<double> nu{0.2, 0.3, 0.5};
  void step(State& s, Rng& r) const {
    const double u = r.uniform();
    s = u < 0.2 ? 0 : (u < 0.5 ? 1 : 2);
  }
  std::vector<State> neighbors(const State& s) const {
    std::vector<State> v;
    for (int i = 0; i < 3; ++i)
      if (i != s) v.push_back(i);
    return v;
  }
  double distance(const State& a, const State& b) const { return a == b ? 0.0 : 1.0; }
};

struct ResetCoupling {
  void joint_step(int& x, int& y, Rng& r) const {
    Reset{}.step(x, r);
    y = x;
  }
};

Kernel reset_kernel() {
  Eigen::MatrixXd m(3, 3);
  m << 0.2, 0.3, 0.5, 0.2, 0.3, 0.5, 0.2, 0.3, 0.5;
  return Kernel(m);
}

}  // namespace

TEST_CASE("exact profile: distance preserved, one-step reset, Curie-Weiss n=3") {
  Eigen::MatrixXd flip(2, 2);
  flip << 0, 1, 1, 0;
  const auto p = contraction_profile_exact(Kernel(flip), 5);
  for (double a : p.alphas) CHECK(a == doctest::Approx(1.0));
  CHECK(p.provenance == Provenance::Exact);

  const auto r = contraction_profile_exact(reset_kernel(), 3);
  CHECK(r.alphas[0] == doctest::Approx(0.0));
  CHECK(geometric_alpha(reset_kernel()) == doctest::Approx(0.0));

  const auto cw = contraction_profile_exact(build_kernel(IsingChain(3, 0.0)), 1);
  CHECK(cw.alphas[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-12));
}

TEST_CASE("geometric alpha and submultiplicativity") {
  const Kernel k = build_kernel(IsingChain(4, 0.5));
  const double a = geometric_alpha(k);
  CHECK(a < 1.0);
  const auto prof = contraction_profile_exact(k, 8);
  CHECK(prof.alphas[0] == doctest::Approx(a).epsilon(1e-12));
  for (std::size_t i = 1; i <= 4; ++i)
    for (std::size_t j = 1; i + j <= 8; ++j) CHECK(prof.alphas[i + j - 1] <= prof.alphas[i - 1] * prof.alphas[j - 1] + 1e-9);

  CHECK(geometric_alpha(build_kernel(IsingChain(4, 3.0))) >= 1.0);
}

TEST_CASE("restricted exact profile only counts pairs inside S0") {
  const IsingChain chain(4, 0.5);
  const Kernel k = build_kernel(chain);
  std::vector<bool> in(k.size());
  for (std::size_t i = 0; i < k.size(); ++i) in[i] = std::abs(chain.state(i).magnetization) <= 2;
  const auto full = contraction_profile_exact(k, 2);
  const auto restricted = contraction_profile_exact(k, 2, in);
  CHECK(restricted.scope == ProfileScope::Restricted);
  CHECK(restricted.alphas[0] <= full.alphas[0] + 1e-12);
}

TEST_CASE("coupling marginals equal the kernel rows") {
  const IsingChain ising(4, 0.7);
  const IsingSyncCoupling sync(ising);
  const Kernel k = build_kernel(ising);
  for (const auto& [x, y] : k.adjacent_pairs()) {
    CHECK(coupling_marginal_error(ising, sync, ising.state(x), ising.state(y)) <= 1e-12);
  }
  CHECK(coupling_marginal_error(ising, sync, IsingConfig::all_plus(4), IsingConfig::all_minus(4)) <= 1e-12);

  const SupermarketChain sm(3, 0.6, 2);
  const SupermarketCoupling mono(sm);
  const std::vector<std::vector<int>> states = {{0, 0, 0}, {1, 0, 2}, {3, 1, 1}, {0, 2, 0}};
  for (const auto& a : states) {
    for (const auto& b : sm.neighbors(QueueState(a))) {
      CHECK(coupling_marginal_error(sm, mono, QueueState(a), b) <= 1e-12);
    }
  }
}

TEST_CASE("magnetization couplings have the right one-step marginals") {
  const MagnetizationChain mc(30, 0.8);
  const MagnetizationCoupling mono(mc);
  const MagnetizationReflectionCoupling refl(mc);
  const std::size_t N = 200000;
  for (auto [x0, y0] : {std::pair{10, 4}, std::pair{10, 6}, std::pair{-30, 30}, std::pair{2, 2}}) {
    std::map<int, double> fx, fy;
    std::map<int, double> fx2, fy2;
    Rng r(9, static_cast<std::uint64_t>(x0 + 100 * y0 + 10000));
    for (std::size_t i = 0; i < N; ++i) {
      int x = x0, y = y0;
      refl.joint_step(x, y, r);
      fx[x] += 1.0 / N;
      fy[y] += 1.0 / N;
      int a = x0, b = y0;
      mono.joint_step(a, b, r);
      fx2[a] += 1.0 / N;
      fy2[b] += 1.0 / N;
    }
    auto check = [](const std::map<int, double>& f, const std::vector<std::pair<int, double>>& row) {
      for (const auto& [s, p] : row) {
        const auto it = f.find(s);
        const double got = it == f.end() ? 0.0 : it->second;
        CHECK(std::abs(got - p) <= 5 * std::sqrt(p * (1 - p) / N) + 1e-12);
      }
    };
    check(fx, mc.transitions(x0));
    check(fy, mc.transitions(y0));
    check(fx2, mc.transitions(x0));
    check(fy2, mc.transitions(y0));
  }
}

TEST_CASE("Monte Carlo profile") {
  const Reset reset;
  const std::vector<std::pair<int, int>> pairs = {{0, 1}, {1, 2}};
  const auto p = contraction_profile_mc(reset, ResetCoupling{}, pairs, 4, 200, 1);
  for (double a : p.alphas) CHECK(a == 0.0);
  CHECK(p.provenance == Provenance::MonteCarlo);

  const std::vector<std::pair<int, int>> same = {{1, 1}};
  CHECK_THROWS_AS(contraction_profile_mc(reset, ResetCoupling{}, same, 4, 200, 1), std::invalid_argument);
}

TEST_CASE("Monte Carlo upper band covers the exact profile") {
  const IsingChain chain(4, 0.5);
  const IsingSyncCoupling sync(chain);
  const Kernel k = build_kernel(chain);
  const auto exact = contraction_profile_exact(k, 4);
  std::vector<std::pair<IsingConfig, IsingConfig>> pairs;
  for (const auto& [x, y] : k.adjacent_pairs()) pairs.emplace_back(chain.state(x), chain.state(y));
  int covered = 0;
  const int seeds = 20;
  for (int s = 0; s < seeds; ++s) {
    const auto mc = contraction_profile_mc(chain, sync, pairs, 4, 400, static_cast<std::uint64_t>(s));
    bool ok = true;
    for (std::size_t i = 0; i < 4; ++i) ok = ok && mc.upper[i] >= exact.alphas[i];
    covered += ok ? 1 : 0;
  }
  CHECK(covered >= seeds - 1);
}

TEST_CASE("Monte Carlo profile: Curie-Weiss n=100 one-step contraction") {
  const int n = 100;
  const double beta = 0.5;
  const IsingChain chain(n, beta);
  const auto law = ising_magnetization_law(n, beta);
  const auto pairs = sample_adjacent_pairs(chain, [&law](Rng& r) { return sample_gibbs_config(law, r); }, 10, 3);
  const auto p = contraction_profile_mc(chain, IsingSyncCoupling(chain), pairs, 1, 4000, 4);
  // 3 sigma above 1 - (1 - beta) / n, sigma the per-pair standard error.
  const double se = std::max(p.upper[0] - p.alphas[0], 0.0) / kZ99;
  CHECK(p.alphas[0] <= 1.0 - (1.0 - beta) / n + 3 * se + 1e-12);
}

TEST_CASE("Monte Carlo profile is schedule independent") {
  const IsingChain chain(20, 0.9);
  const auto pairs = sample_adjacent_pairs(chain, [](Rng&) { return IsingConfig::all_plus(20); }, 3, 1);
  set_thread_count(1);
  const auto a = contraction_profile_mc(chain, IsingSyncCoupling(chain), pairs, 5, 300, 8);
  set_thread_count(4);
  const auto b = contraction_profile_mc(chain, IsingSyncCoupling(chain), pairs, 5, 300, 8);
  set_thread_count(0);
  CHECK(a.alphas == b.alphas);
  CHECK(a.upper == b.upper);
}

TEST_CASE("supermarket profile with the monotone coupling stays at most 1") {
  const SupermarketChain chain(50, 0.7, 2);
  const auto snaps = queue_snapshots(chain, default_burn_in(50, 20), 50, 10, 2);
  Rng r(1, 1);
  std::vector<std::pair<QueueState, QueueState>> pairs;
  for (const auto& s : snaps) {
    QueueState x(s);
    const auto nb = chain.neighbors(x);
    pairs.emplace_back(x, nb[r.below(nb.size())]);
  }
  const auto p = contraction_profile_mc(chain, SupermarketCoupling(chain), pairs, 20, 200, 5, ProfileScope::Restricted);
  for (double a : p.alphas) CHECK(a <= 1.0);
}

TEST_CASE("profile CSV schema") {
  std::ostringstream os;
  write_profile_csv(os, ContractionProfile::geometric(0.5, 2));
  CHECK(os.str() == "i,alpha_i,provenance,lower_conf,upper_conf\n1,0.5,closed-form,0.5,0.5\n2,0.25,closed-form,0.25,0.25\n");
}

TEST_CASE("coalescence bounds") {
  const IsingChain chain(6, 0.5);
  const IsingSyncCoupling sync(chain);
  const auto plus = IsingConfig::all_plus(6), minus = IsingConfig::all_minus(6);
  CHECK(coalescence_tv_bound(chain, sync, plus, plus, 10, 100, 1).estimate == 0.0);
  CHECK(coalescence_tv_bound(chain, sync, plus, minus, 0, 100, 1).estimate == 1.0);

  const Kernel k = build_kernel(chain);
  const auto times = coalescence_times(chain, sync, plus, [&minus](Rng&) { return minus; }, 200, 2000, 3);
  const Dist dp = Dist::point_mass(k.size(), chain.index(plus));
  const Dist dm = Dist::point_mass(k.size(), chain.index(minus));
  for (std::size_t t : {5, 10, 20, 40, 80}) {
    const auto b = coalescence_bound_from_times(times, t);
    const double exact = tv_distance(kernel_power_apply(k, dp, t), kernel_power_apply(k, dm, t));
    CHECK(b.upper >= exact);
  }
}

TEST_CASE("escape probability") {
  const SupermarketChain chain(200, 0.7, 2);
  const QueueState empty(200);
  const auto whole = RestrictedSet<QueueState>::whole_space();
  CHECK(escape_probability(chain, whole, empty, 1000, 100, 1).probability == 0.0);

  // Interior in closed form: one more customer anywhere stays inside.
  auto s0 = [](double c) {
    const double l1 = c * 200, linf = c * std::log(200.0);
    return RestrictedSet<QueueState>{
        [=](const QueueState& s) { return s.total() <= l1 && s.max() <= linf; },
        [=](const QueueState& s) { return s.total() + 1 <= l1 && s.max() + 1 <= linf; }};
  };
  const std::uint64_t t = 200ULL * 200ULL;
  const auto e1 = escape_probability(chain, s0(0.8), empty, t, 200, 2);
  const auto e2 = escape_probability(chain, s0(1.2), empty, t, 200, 2);
  const auto e3 = escape_probability(chain, s0(2.0), empty, t, 200, 2);
  CHECK(e1.probability >= e2.probability);
  CHECK(e2.probability >= e3.probability);
  CHECK(e3.probability <= 0.05);

  QueueState big(std::vector<int>(200, 10));
  CHECK_THROWS_AS(escape_probability(chain, s0(1.0), big, 10, 10, 1), std::invalid_argument);

  // A state that never moves stays inside.
  const Reset reset;
  const auto inside = RestrictedSet<int>::from_membership(reset, [](const int&) { return true; });
  CHECK(escape_probability(reset, inside, 0, 100, 100, 1).probability == 0.0);
}
