#include "mixlab/exact.hpp"

#include <cmath>
#include <string>

namespace mixlab {
namespace {

Eigen::RowVectorXd as_row(const Dist& mu) {
  Eigen::RowVectorXd r(static_cast<Eigen::Index>(mu.size()));
  for (std::size_t i = 0; i < mu.size(); ++i) r(static_cast<Eigen::Index>(i)) = mu[i];
  return r;
}

Dist as_dist(const Eigen::RowVectorXd& r) {
  return Dist(std::vector<double>(r.data(), r.data() + r.size()));
}

void require_same_size(const Dist& a, const Dist& b, const char* what) {
  if (a.size() != b.size()) throw std::invalid_argument(std::string(what) + ": size mismatch");
}

double row_tv(const Eigen::Ref<const Eigen::RowVectorXd>& a, const Dist& b) {
  double s = 0.0;
  for (Eigen::Index i = 0; i < a.size(); ++i) s += std::abs(a(i) - b[static_cast<std::size_t>(i)]);
  return 0.5 * s;
}

}  // namespace

Dist kernel_power_apply(const Kernel& k, const Dist& mu, std::size_t t) {
  if (mu.size() != k.size()) throw std::invalid_argument("kernel_power_apply: size mismatch");
  const auto n = static_cast<long double>(k.size());
  check_budget(static_cast<long double>(t) * n * n, "kernel_power_apply");
  Eigen::RowVectorXd r = as_row(mu);
  for (std::size_t s = 0; s < t; ++s) r = r * k.matrix();
  return as_dist(r);
}

double stationarity_residual(const Kernel& k, const Dist& pi) {
  const Eigen::RowVectorXd r = as_row(pi);
  return (r * k.matrix() - r).cwiseAbs().sum();
}

Dist stationary(const Kernel& k, StationaryOptions opts) {
  const std::size_t n = k.size();
  if (k.period() != 1) {
    throw InvalidChain("stationary: kernel is periodic (period " + std::to_string(k.period()) +
                       "); mixing quantities are undefined");
  }
  if (n == 1) return Dist({1.0});

  if (n <= opts.direct_limit) {
    // Solve (P^T - I) pi = 0 with the last equation replaced by sum(pi) = 1.
    Eigen::MatrixXd a = k.matrix().transpose() - Eigen::MatrixXd::Identity(k.matrix().rows(), k.matrix().cols());
    a.row(a.rows() - 1).setOnes();
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(a.rows());
    rhs(rhs.size() - 1) = 1.0;
    Eigen::VectorXd x = a.fullPivLu().solve(rhs);
    for (Eigen::Index i = 0; i < x.size(); ++i) x(i) = std::max(0.0, x(i));
    x /= x.sum();
    Dist pi(std::vector<double>(x.data(), x.data() + x.size()));
    if (stationarity_residual(k, pi) <= opts.tol) return pi;
  }

  // Power iteration from the uniform distribution.
  Eigen::RowVectorXd r = Eigen::RowVectorXd::Constant(static_cast<Eigen::Index>(n), 1.0 / static_cast<double>(n));
  const std::uint64_t max_iter = std::max<std::uint64_t>(1, opts.max_row_ops / n);
  double residual = 1.0;
  for (std::uint64_t it = 0; it < max_iter; ++it) {
    Eigen::RowVectorXd next = r * k.matrix();
    residual = (next - r).cwiseAbs().sum();
    r = next / next.sum();
    if (residual <= opts.tol) return as_dist(r);
  }
  throw NotConverged("stationary: power iteration did not reach tol " + std::to_string(opts.tol) +
                         " (residual " + std::to_string(residual) + ")",
                     residual);
}

double tv_distance(const Dist& mu1, const Dist& mu2) {
  require_same_size(mu1, mu2, "tv_distance");
  double s = 0.0;
  for (std::size_t i = 0; i < mu1.size(); ++i) s += std::abs(mu1[i] - mu2[i]);
  return std::min(1.0, 0.5 * s);
}

double wasserstein(const Dist& mu1, const Dist& mu2, const Kernel& k) {
  require_same_size(mu1, mu2, "wasserstein");
  if (mu1.size() != k.size()) throw std::invalid_argument("wasserstein: kernel size mismatch");
  const auto cost = k.cost_table();
  return wasserstein(mu1.view(), mu2.view(), cost);
}

std::vector<double> distance_curve(const Kernel& k, const Dist& pi, std::size_t t_max) {
  require_same_size(pi, Dist::uniform(k.size()), "distance_curve");
  const auto n = static_cast<long double>(k.size());
  check_budget(static_cast<long double>(t_max) * n * n * n, "distance_curve");
  std::vector<double> curve;
  curve.reserve(t_max + 1);
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(k.matrix().rows(), k.matrix().cols());
  for (std::size_t t = 0;; ++t) {
    double worst = 0.0;
    for (Eigen::Index x = 0; x < power.rows(); ++x) worst = std::max(worst, row_tv(power.row(x), pi));
    curve.push_back(std::min(1.0, worst));
    if (t == t_max) break;
    power = power * k.matrix();
  }
  return curve;
}

std::vector<double> distance_curve(const Kernel& k, std::size_t t_max) {
  return distance_curve(k, stationary(k), t_max);
}

MixingTime mixing_time(const Kernel& k, const Dist& pi, double eps, std::size_t cap) {
  if (!(eps > 0.0 && eps < 1.0)) throw std::invalid_argument("mixing_time: eps must lie in (0,1)");
  const auto n = static_cast<long double>(k.size());
  MixingTime out;
  out.cap = cap;
  Eigen::MatrixXd power = Eigen::MatrixXd::Identity(k.matrix().rows(), k.matrix().cols());
  for (std::size_t t = 0; t <= cap; ++t) {
    double worst = 0.0;
    for (Eigen::Index x = 0; x < power.rows(); ++x) worst = std::max(worst, row_tv(power.row(x), pi));
    out.last_distance = worst;
    if (worst <= eps) {
      out.steps = t;
      return out;
    }
    if (t < cap) {
      check_budget(static_cast<long double>(t + 1) * n * n * n, "mixing_time");
      power = power * k.matrix();
    }
  }
  return out;
}

MixingTime mixing_time(const Kernel& k, double eps, std::size_t cap) {
  return mixing_time(k, stationary(k), eps, cap);
}

}  // namespace mixlab
