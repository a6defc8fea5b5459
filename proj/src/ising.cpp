#include "mixlab/ising.hpp"

#include <algorithm>
#include <bit>
#include <limits>
#include <cmath>
#include <numeric>
#include <stdexcept>
#include <string>

#include "mixlab/coupling.hpp"

namespace mixlab {

IsingConfig IsingConfig::all_plus(int n) {
  return {std::vector<std::int8_t>(static_cast<std::size_t>(n), 1), n};
}

IsingConfig IsingConfig::all_minus(int n) {
  return {std::vector<std::int8_t>(static_cast<std::size_t>(n), -1), -n};
}

IsingConfig IsingConfig::from_spins(std::vector<std::int8_t> spins) {
  int m = 0;
  for (auto s : spins) {
    if (s != 1 && s != -1) throw std::invalid_argument("IsingConfig: spins must be +-1");
    m += s;
  }
  return {std::move(spins), m};
}

double glauber_plus_probability(int n, double beta, int others_sum) {
  const double field = beta * static_cast<double>(others_sum) / static_cast<double>(n);
  // e^{f} / (e^{f} + e^{-f}) = 1 / (1 + e^{-2f})
  return 1.0 / (1.0 + std::exp(-2.0 * field));
}

IsingChain::IsingChain(int n, double beta) : n_(n), beta_(beta) {
  if (n < 2) throw std::invalid_argument("IsingChain: n must be >= 2");
  if (!(beta >= 0.0)) throw std::invalid_argument("IsingChain: beta must be >= 0");
}

void IsingChain::update(State& s, int v, double u) const {
  const int others = s.magnetization - s.spins[static_cast<std::size_t>(v)];
  s.set(v, u < glauber_plus_probability(n_, beta_, others) ? 1 : -1);
}

void IsingChain::step(State& s, Rng& rng) const {
  const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(n_)));
  update(s, v, rng.uniform());
}

std::vector<IsingConfig> IsingChain::neighbors(const State& s) const {
  std::vector<IsingConfig> out;
  out.reserve(static_cast<std::size_t>(n_));
  for (int v = 0; v < n_; ++v) {
    IsingConfig t = s;
    t.set(v, static_cast<std::int8_t>(-s.spins[static_cast<std::size_t>(v)]));
    out.push_back(std::move(t));
  }
  return out;
}

double IsingChain::distance(const State& a, const State& b) const {
  int d = 0;
  for (std::size_t i = 0; i < a.spins.size(); ++i) d += a.spins[i] != b.spins[i] ? 1 : 0;
  return d;
}

std::size_t IsingChain::size() const {
  if (n_ > 20) throw std::invalid_argument("IsingChain: enumeration limited to n <= 20");
  return std::size_t{1} << n_;
}

IsingConfig IsingChain::state(std::size_t id) const {
  std::vector<std::int8_t> spins(static_cast<std::size_t>(n_));
  for (int i = 0; i < n_; ++i) spins[static_cast<std::size_t>(i)] = (id >> i) & 1U ? 1 : -1;
  return IsingConfig::from_spins(std::move(spins));
}

std::size_t IsingChain::index(const State& s) const {
  std::size_t id = 0;
  for (int i = 0; i < n_; ++i) {
    if (s.spins[static_cast<std::size_t>(i)] > 0) id |= std::size_t{1} << i;
  }
  return id;
}

std::vector<std::pair<IsingConfig, double>> IsingChain::transitions(const State& s) const {
  std::vector<std::pair<IsingConfig, double>> out;
  const double pick = 1.0 / n_;
  for (int v = 0; v < n_; ++v) {
    const double p = glauber_plus_probability(n_, beta_, s.magnetization - s.spins[static_cast<std::size_t>(v)]);
    IsingConfig up = s, down = s;
    up.set(v, 1);
    down.set(v, -1);
    out.emplace_back(std::move(up), pick * p);
    out.emplace_back(std::move(down), pick * (1.0 - p));
  }
  return out;
}

void IsingSyncCoupling::joint_step(IsingConfig& x, IsingConfig& y, Rng& rng) const {
  const int v = static_cast<int>(rng.below(static_cast<std::uint64_t>(chain_->n())));
  const double u = rng.uniform();
  chain_->update(x, v, u);
  chain_->update(y, v, u);
}

std::vector<std::pair<std::pair<IsingConfig, IsingConfig>, double>> IsingSyncCoupling::joint_transitions(
    const IsingConfig& x, const IsingConfig& y) const {
  // The shared coin splits [0,1) at the two plus-probabilities.
  std::vector<std::pair<std::pair<IsingConfig, IsingConfig>, double>> out;
  const int n = chain_->n();
  const double pick = 1.0 / n;
  for (int v = 0; v < n; ++v) {
    const auto sv = static_cast<std::size_t>(v);
    const double px = glauber_plus_probability(n, chain_->beta(), x.magnetization - x.spins[sv]);
    const double py = glauber_plus_probability(n, chain_->beta(), y.magnetization - y.spins[sv]);
    const double lo = std::min(px, py), hi = std::max(px, py);
    auto emit = [&](std::int8_t sx, std::int8_t sy, double w) {
      if (w <= 0.0) return;
      IsingConfig a = x, b = y;
      a.set(v, sx);
      b.set(v, sy);
      out.push_back({{std::move(a), std::move(b)}, pick * w});
    };
    emit(1, 1, lo);
    if (px > py) emit(1, -1, hi - lo);
    if (py > px) emit(-1, 1, hi - lo);
    emit(-1, -1, 1.0 - hi);
  }
  return out;
}

double MagnetizationLaw::mass_at_least(int m) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] >= m) s += probs[i];
  }
  return s;
}

double MagnetizationLaw::mass_at_most(int m) const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (values[i] <= m) s += probs[i];
  }
  return s;
}

double MagnetizationLaw::mean() const {
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += values[i] * probs[i];
  return s;
}

double MagnetizationLaw::variance() const {
  const double mu = mean();
  double s = 0.0;
  for (std::size_t i = 0; i < values.size(); ++i) s += (values[i] - mu) * (values[i] - mu) * probs[i];
  return s;
}

int MagnetizationLaw::sample(Rng& rng) const {
  const double u = rng.uniform();
  double acc = 0.0;
  for (std::size_t i = 0; i < probs.size(); ++i) {
    acc += probs[i];
    if (u < acc) return values[i];
  }
  return values.back();
}

Dist ising_gibbs_exact(int n, double beta) {
  if (n < 1 || n > 20) throw std::invalid_argument("ising_gibbs_exact: enumeration needs 1 <= n <= 20");
  if (!(beta >= 0.0)) throw std::invalid_argument("ising_gibbs_exact: beta must be >= 0");
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> logw(size);
  double top = -std::numeric_limits<double>::infinity();
  for (std::size_t id = 0; id < size; ++id) {
    const int m = 2 * std::popcount(id) - n;
    // (beta/n) sum_{i<j} s_i s_j = beta (m^2 - n) / (2n)
    logw[id] = beta * (static_cast<double>(m) * m - n) / (2.0 * n);
    top = std::max(top, logw[id]);
  }
  std::vector<double> w(size);
  double z = 0.0;
  for (std::size_t id = 0; id < size; ++id) z += (w[id] = std::exp(logw[id] - top));
  for (double& x : w) x /= z;
  return Dist(std::move(w));
}

MagnetizationLaw ising_magnetization_law(int n, double beta) {
  if (n < 1 || n > 10000) throw std::invalid_argument("ising_magnetization_law: needs 1 <= n <= 10^4");
  if (!(beta >= 0.0)) throw std::invalid_argument("ising_magnetization_law: beta must be >= 0");
  MagnetizationLaw law;
  law.n = n;
  std::vector<double> logw(static_cast<std::size_t>(n) + 1);
  double top = -std::numeric_limits<double>::infinity();
  for (int plus = 0; plus <= n; ++plus) {
    const int m = 2 * plus - n;
    law.values.push_back(m);
    const double log_binom = std::lgamma(n + 1.0) - std::lgamma(plus + 1.0) - std::lgamma(n - plus + 1.0);
    logw[static_cast<std::size_t>(plus)] = log_binom + beta * (static_cast<double>(m) * m - n) / (2.0 * n);
    top = std::max(top, logw[static_cast<std::size_t>(plus)]);
  }
  double z = 0.0;
  for (double lw : logw) {
    law.probs.push_back(std::exp(lw - top));
    z += law.probs.back();
  }
  for (double& p : law.probs) p /= z;
  return law;
}

IsingConfig sample_gibbs_config(const MagnetizationLaw& law, Rng& rng) {
  const int m = law.sample(rng);
  const int plus = (law.n + m) / 2;
  std::vector<std::int8_t> spins(static_cast<std::size_t>(law.n), -1);
  std::fill(spins.begin(), spins.begin() + plus, 1);
  for (std::size_t i = spins.size(); i > 1; --i) std::swap(spins[i - 1], spins[rng.below(i)]);
  return IsingConfig::from_spins(std::move(spins));
}

MagnetizationChain::MagnetizationChain(int n, double beta) : n_(n), beta_(beta) {
  if (n < 2) throw std::invalid_argument("MagnetizationChain: n must be >= 2");
  if (!(beta >= 0.0)) throw std::invalid_argument("MagnetizationChain: beta must be >= 0");
}

void MagnetizationChain::update(State& m, double vertex_u, double coin_u) const {
  const double plus_frac = static_cast<double>(n_ + m) / (2.0 * n_);
  if (vertex_u < plus_frac) {
    if (coin_u >= glauber_plus_probability(n_, beta_, m - 1)) m -= 2;
  } else {
    if (coin_u < glauber_plus_probability(n_, beta_, m + 1)) m += 2;
  }
}

void MagnetizationChain::step(State& m, Rng& rng) const {
  const double vu = rng.uniform();
  update(m, vu, rng.uniform());
}

std::vector<int> MagnetizationChain::neighbors(const State& m) const {
  std::vector<int> out;
  if (m - 2 >= -n_) out.push_back(m - 2);
  if (m + 2 <= n_) out.push_back(m + 2);
  return out;
}

double MagnetizationChain::distance(const State& a, const State& b) const {
  return std::abs(a - b) / 2;
}

double MagnetizationChain::up_probability(int m) const {
  const double minus_frac = static_cast<double>(n_ - m) / (2.0 * n_);
  return minus_frac * glauber_plus_probability(n_, beta_, m + 1);
}

double MagnetizationChain::down_probability(int m) const {
  const double plus_frac = static_cast<double>(n_ + m) / (2.0 * n_);
  return plus_frac * (1.0 - glauber_plus_probability(n_, beta_, m - 1));
}

std::vector<std::pair<int, double>> MagnetizationChain::transitions(const State& m) const {
  const double down = down_probability(m);
  const double up = up_probability(m);
  std::vector<std::pair<int, double>> out;
  if (down > 0.0) out.emplace_back(m - 2, down);
  if (up > 0.0) out.emplace_back(m + 2, up);
  out.emplace_back(m, 1.0 - up - down);
  return out;
}

void MagnetizationCoupling::joint_step(int& x, int& y, Rng& rng) const {
  const double vu = rng.uniform();
  const double cu = rng.uniform();
  chain_->update(x, vu, cu);
  chain_->update(y, vu, cu);
}

void MagnetizationReflectionCoupling::joint_step(int& x, int& y, Rng& rng) const {
  if (x == y) {
    chain_->step(x, rng);
    y = x;
    return;
  }
  int& hi = x > y ? x : y;
  int& lo = x > y ? y : x;
  const int gap = (hi - lo) / 2;
  const double u = rng.uniform();
  const double v = gap % 2 == 0 ? u : rng.uniform();
  const double hu = chain_->up_probability(hi), hd = chain_->down_probability(hi);
  const double lu = chain_->up_probability(lo), ld = chain_->down_probability(lo);
  // hi: [up | down | stay]
  if (u < hu) {
    hi += 2;
  } else if (u < hu + hd) {
    hi -= 2;
  }
  // lo: [down | up | stay], so that on an even gap hi and lo move in mirror
  if (v < ld) {
    lo -= 2;
  } else if (v < ld + lu) {
    lo += 2;
  }
}

double ising_abs_magnetization_mass(const MagnetizationLaw& law, double c) {
  const int thr = static_cast<int>(std::ceil(c * law.n - 1e-9));
  return law.mass_at_least(thr) + law.mass_at_most(-thr);
}

BimodalityReport ising_bimodality_check(int n, double beta, std::size_t grid_points) {
  if (!(beta > 0.0)) throw std::invalid_argument("ising_bimodality_check: beta must be > 0");
  if (grid_points < 2) throw std::invalid_argument("ising_bimodality_check: grid too small");
  const auto law = ising_magnetization_law(n, beta);
  BimodalityReport rep;
  rep.n = n;
  rep.beta = beta;
  rep.c_min = std::min(1.0, 3.0 / std::sqrt(static_cast<double>(n)));
  for (std::size_t j = 0; j < grid_points; ++j) {
    const double c = rep.c_min + (1.0 - rep.c_min) * static_cast<double>(j) / static_cast<double>(grid_points - 1);
    const int thr = static_cast<int>(std::ceil(c * n - 1e-9));
    BimodalityRow row{c, law.mass_at_least(thr), law.mass_at_most(-thr)};
    if (row.mass_upper >= 0.25 && row.mass_lower >= 0.25) {
      rep.bimodal = true;
      rep.witness_c = c;
    }
    rep.scan.push_back(row);
  }
  return rep;
}

NormalRateFit ising_fit_normal_rate(double beta, const std::vector<int>& sizes) {
  if (!(beta >= 0.0 && beta < 1.0)) {
    throw std::invalid_argument("ising_fit_normal_rate: requires 0 <= beta < 1");
  }
  if (sizes.empty()) throw std::invalid_argument("ising_fit_normal_rate: no sizes");
  NormalRateFit fit;
  fit.beta = beta;
  for (int n : sizes) {
    const double a = geometric_alpha(build_kernel(IsingChain(n, beta)));
    if (!(a < 1.0)) throw std::runtime_error("ising_fit_normal_rate: no contraction at n=" + std::to_string(n));
    fit.sizes.push_back(n);
    fit.alphas.push_back(a);
    fit.c2.push_back(2.0 * a * a / (n * (1.0 - a * a)));
    fit.c2_fitted = std::max(fit.c2_fitted, fit.c2.back());
  }
  return fit;
}

}  // namespace mixlab
