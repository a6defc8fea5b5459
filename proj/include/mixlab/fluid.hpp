#pragma once

// Fluid limit of the supermarket model:
//   dv(k)/dt = lambda (v(k-1)^d - v(k)^d) - (v(k) - v(k+1)),  k >= 1,
// with v(0) = 1 and the truncation closure v(k_max + 1) = 0.

#include <stdexcept>
#include <vector>

namespace mixlab {

struct FluidState {
  std::vector<double> v;  // v(0..k_max), v(0) = 1
  double t = 0.0;

  int k_max() const noexcept { return static_cast<int>(v.size()) - 1; }
};

class FluidInstability : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Smallest k_max with lambda^{(d^k_max - 1)/(d - 1)} < 1e-14.
int default_fluid_kmax(double lambda, int d);

FluidState fluid_empty_state(int k_max);
FluidState fluid_fixed_point_state(double lambda, int d, int k_max);

/// Right-hand side of the ODE at v (entry 0 is always 0).
std::vector<double> fluid_rhs(double lambda, int d, const std::vector<double>& v);

/// Classical fourth-order Runge-Kutta with fixed step dt up to t_end
/// (the last step is shortened to land on t_end). Throws FluidInstability
/// if an intermediate profile loses monotonicity by more than 1e-9; the
/// output is clipped to [0,1].
FluidState fluid_ode_integrate(double lambda, int d, const FluidState& v0, double t_end, double dt);

/// Max_k |v(k) - fixed point(k)|.
double fluid_fixed_point_error(double lambda, int d, const FluidState& s);

}  // namespace mixlab
