#pragma once

// Independent reference computations used only by the tests.

#include <algorithm>
#include <cmath>
#include <limits>
#include <vector>

#include <Eigen/Dense>

namespace oracle {

/// Minimum transportation cost by enumerating basic solutions of the
/// transportation polytope: every choice of 2n-1 cells whose equality
/// system has full column rank, solved exactly, kept if non-negative.
inline double transport_bruteforce(const std::vector<double>& mu1, const std::vector<double>& mu2,
                                   const std::vector<double>& cost) {
  const int n = static_cast<int>(mu1.size());
  const int cells = n * n, basis = 2 * n - 1;
  Eigen::MatrixXd a(2 * n, cells);
  a.setZero();
  Eigen::VectorXd b(2 * n);
  for (int i = 0; i < n; ++i) {
    b(i) = mu1[static_cast<std::size_t>(i)];
    b(n + i) = mu2[static_cast<std::size_t>(i)];
    for (int j = 0; j < n; ++j) {
      a(i, i * n + j) = 1.0;
      a(n + j, i * n + j) = 1.0;
    }
  }
  double best = std::numeric_limits<double>::infinity();
  std::vector<int> pick(static_cast<std::size_t>(basis));
  for (int i = 0; i < basis; ++i) pick[static_cast<std::size_t>(i)] = i;
  for (;;) {
    Eigen::MatrixXd sub(2 * n, basis);
    for (int k = 0; k < basis; ++k) sub.col(k) = a.col(pick[static_cast<std::size_t>(k)]);
    Eigen::FullPivLU<Eigen::MatrixXd> lu(sub);
    if (lu.rank() == basis) {
      const Eigen::VectorXd x = sub.colPivHouseholderQr().solve(b);
      if ((sub * x - b).cwiseAbs().maxCoeff() < 1e-11 && x.minCoeff() > -1e-12) {
        double c = 0.0;
        for (int k = 0; k < basis; ++k) c += x(k) * cost[static_cast<std::size_t>(pick[static_cast<std::size_t>(k)])];
        best = std::min(best, c);
      }
    }
    int k = basis - 1;
    while (k >= 0 && pick[static_cast<std::size_t>(k)] == cells - basis + k) --k;
    if (k < 0) break;
    ++pick[static_cast<std::size_t>(k)];
    for (int j = k + 1; j < basis; ++j) pick[static_cast<std::size_t>(j)] = pick[static_cast<std::size_t>(j - 1)] + 1;
  }
  return best;
}

/// Shortest-path closure of a symmetric weight table (Floyd-Warshall).
inline std::vector<double> metric_closure(std::vector<double> w, int n) {
  for (int k = 0; k < n; ++k)
    for (int i = 0; i < n; ++i)
      for (int j = 0; j < n; ++j)
        w[static_cast<std::size_t>(i * n + j)] =
            std::min(w[static_cast<std::size_t>(i * n + j)],
                     w[static_cast<std::size_t>(i * n + k)] + w[static_cast<std::size_t>(k * n + j)]);
  return w;
}

/// Row vector mu times P^t by repeated dense products.
inline Eigen::RowVectorXd power_apply(const Eigen::MatrixXd& p, Eigen::RowVectorXd mu, std::size_t t) {
  Eigen::MatrixXd q = Eigen::MatrixXd::Identity(p.rows(), p.cols());
  for (std::size_t s = 0; s < t; ++s) q = q * p;
  return mu * q;
}

/// Curie-Weiss Gibbs weights by direct summation over pairs i < j.
inline std::vector<double> curie_weiss(int n, double beta) {
  const std::size_t size = std::size_t{1} << n;
  std::vector<double> w(size);
  double z = 0.0;
  for (std::size_t id = 0; id < size; ++id) {
    double h = 0.0;
    for (int i = 0; i < n; ++i)
      for (int j = i + 1; j < n; ++j) {
        const double si = (id >> i) & 1 ? 1.0 : -1.0, sj = (id >> j) & 1 ? 1.0 : -1.0;
        h += si * sj;
      }
    w[id] = std::exp(beta / n * h);
    z += w[id];
  }
  for (auto& x : w) x /= z;
  return w;
}

/// sup over events of |mu1(A) - mu2(A)| by enumerating all subsets.
inline double tv_by_events(const std::vector<double>& a, const std::vector<double>& b) {
  double best = 0.0;
  const std::size_t n = a.size();
  for (std::size_t mask = 0; mask < (std::size_t{1} << n); ++mask) {
    double s = 0.0;
    for (std::size_t i = 0; i < n; ++i)
      if ((mask >> i) & 1) s += a[i] - b[i];
    best = std::max(best, std::abs(s));
  }
  return best;
}

}  // namespace oracle
