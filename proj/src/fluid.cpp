#include "mixlab/fluid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "mixlab/supermarket.hpp"

namespace mixlab {
namespace {

void check_params(double lambda, int d) {
  if (!(lambda > 0.0 && lambda < 1.0)) throw std::invalid_argument("fluid: lambda must lie in (0,1)");
  if (d < 1) throw std::invalid_argument("fluid: d must be >= 1");
}

void check_profile(const std::vector<double>& v, double slack, const char* what) {
  for (std::size_t k = 1; k < v.size(); ++k) {
    if (v[k] > v[k - 1] + slack || v[k] < -slack || v[k] > 1.0 + slack || !std::isfinite(v[k])) {
      throw FluidInstability(std::string(what) + ": profile not monotone in [0,1] at k=" +
                             std::to_string(k) + "; reduce dt");
    }
  }
}

}  // namespace

int default_fluid_kmax(double lambda, int d) {
  check_params(lambda, d);
  int k = 1;
  while (fluid_fixed_point(lambda, d, k) >= 1e-14) ++k;
  return k;
}

FluidState fluid_empty_state(int k_max) {
  if (k_max < 1) throw std::invalid_argument("fluid: k_max must be >= 1");
  FluidState s;
  s.v.assign(static_cast<std::size_t>(k_max) + 1, 0.0);
  s.v[0] = 1.0;
  return s;
}

FluidState fluid_fixed_point_state(double lambda, int d, int k_max) {
  check_params(lambda, d);
  FluidState s = fluid_empty_state(k_max);
  for (int k = 1; k <= k_max; ++k) s.v[static_cast<std::size_t>(k)] = fluid_fixed_point(lambda, d, k);
  return s;
}

std::vector<double> fluid_rhs(double lambda, int d, const std::vector<double>& v) {
  const std::size_t K = v.size() - 1;
  std::vector<double> dv(v.size(), 0.0);
  std::vector<double> pw(v.size());
  for (std::size_t k = 0; k <= K; ++k) pw[k] = d == 1 ? v[k] : std::pow(std::max(0.0, v[k]), d);
  for (std::size_t k = 1; k <= K; ++k) {
    const double next = k < K ? v[k + 1] : 0.0;
    dv[k] = lambda * (pw[k - 1] - pw[k]) - (v[k] - next);
  }
  return dv;
}

FluidState fluid_ode_integrate(double lambda, int d, const FluidState& v0, double t_end, double dt) {
  check_params(lambda, d);
  if (v0.v.size() < 2 || v0.v[0] != 1.0) throw std::invalid_argument("fluid: v0 must have v(0) = 1 and k_max >= 1");
  if (!(dt > 0.0)) throw std::invalid_argument("fluid: dt must be > 0");
  if (!(t_end >= v0.t)) throw std::invalid_argument("fluid: t_end precedes the initial time");
  check_profile(v0.v, 1e-12, "fluid initial condition");

  FluidState s = v0;
  const std::size_t n = s.v.size();
  std::vector<double> tmp(n);
  auto axpy = [&](const std::vector<double>& base, const std::vector<double>& k, double h) {
    for (std::size_t i = 0; i < n; ++i) tmp[i] = base[i] + h * k[i];
    return tmp;
  };
  while (s.t < t_end) {
    const double h = std::min(dt, t_end - s.t);
    const auto k1 = fluid_rhs(lambda, d, s.v);
    const auto k2 = fluid_rhs(lambda, d, axpy(s.v, k1, h / 2));
    const auto k3 = fluid_rhs(lambda, d, axpy(s.v, k2, h / 2));
    const auto k4 = fluid_rhs(lambda, d, axpy(s.v, k3, h));
    for (std::size_t i = 1; i < n; ++i) s.v[i] += h / 6.0 * (k1[i] + 2 * k2[i] + 2 * k3[i] + k4[i]);
    check_profile(s.v, 1e-9, "fluid_ode_integrate");
    for (std::size_t i = 1; i < n; ++i) s.v[i] = std::clamp(s.v[i], 0.0, 1.0);
    s.t = (t_end - s.t <= dt) ? t_end : s.t + h;
  }
  return s;
}

double fluid_fixed_point_error(double lambda, int d, const FluidState& s) {
  double err = 0.0;
  for (int k = 0; k <= s.k_max(); ++k) {
    err = std::max(err, std::abs(s.v[static_cast<std::size_t>(k)] - fluid_fixed_point(lambda, d, k)));
  }
  return err;
}

}  // namespace mixlab
