#include "mixlab/transport.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <string>

namespace mixlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

}  // namespace

TransportPlan solve_transport(std::span<const double> mu1, std::span<const double> mu2,
                              std::span<const double> cost, TransportOptions opts) {
  const std::size_t n = mu1.size();
  if (mu2.size() != n || cost.size() != n * n) {
    throw std::invalid_argument("solve_transport: size mismatch");
  }
  std::vector<std::size_t> src, snk;
  double total1 = 0.0, total2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    if (!(mu1[i] >= 0.0) || !(mu2[i] >= 0.0)) {
      throw std::invalid_argument("solve_transport: negative or NaN mass");
    }
    if (mu1[i] > 0.0) src.push_back(i);
    if (mu2[i] > 0.0) snk.push_back(i);
    total1 += mu1[i];
    total2 += mu2[i];
  }
  if (std::abs(total1 - total2) > 1e-9 * std::max(1.0, total1)) {
    throw std::invalid_argument("solve_transport: marginals have different total mass");
  }

  const std::size_t p = src.size(), q = snk.size();
  // Node layout: sources [0,p), sinks [p,p+q), super source S, super sink T.
  const std::size_t S = p + q, T = p + q + 1, V = p + q + 2;
  const double tol = 1e-15 * std::max(1.0, total1);

  std::vector<double> supply(p), demand(q), flow(p * q, 0.0), c(p * q);
  for (std::size_t a = 0; a < p; ++a) supply[a] = mu1[src[a]];
  for (std::size_t b = 0; b < q; ++b) demand[b] = mu2[snk[b]];
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < q; ++b) {
      const double w = cost[src[a] * n + snk[b]];
      if (!(w >= 0.0) || !std::isfinite(w)) {
        throw std::invalid_argument("solve_transport: costs must be finite and non-negative");
      }
      c[a * q + b] = w;
    }
  }

  std::vector<double> pot(V, 0.0), dist(V);
  std::vector<std::size_t> parent(V);
  std::vector<char> done(V);
  double remaining = std::accumulate(supply.begin(), supply.end(), 0.0);
  // Each augmentation saturates a supply, a demand or a reverse arc.
  const std::size_t max_rounds = 4 * (p + 1) * (q + 1) + 16;

  for (std::size_t round = 0; remaining > tol; ++round) {
    if (round > max_rounds) throw SolverError("solve_transport: augmentation did not terminate");

    std::fill(dist.begin(), dist.end(), kInf);
    std::fill(done.begin(), done.end(), 0);
    dist[S] = 0.0;
    for (;;) {
      std::size_t u = V;
      double best = kInf;
      for (std::size_t v = 0; v < V; ++v) {
        if (!done[v] && dist[v] < best) {
          best = dist[v];
          u = v;
        }
      }
      if (u == V) break;
      done[u] = 1;
      auto relax = [&](std::size_t v, double arc_cost) {
        const double reduced = std::max(0.0, arc_cost + pot[u] - pot[v]);
        if (dist[u] + reduced < dist[v]) {
          dist[v] = dist[u] + reduced;
          parent[v] = u;
        }
      };
      if (u == S) {
        for (std::size_t a = 0; a < p; ++a) {
          if (supply[a] > tol) relax(a, 0.0);
        }
      } else if (u < p) {
        for (std::size_t b = 0; b < q; ++b) relax(p + b, c[u * q + b]);
      } else if (u < p + q) {
        const std::size_t b = u - p;
        for (std::size_t a = 0; a < p; ++a) {
          if (flow[a * q + b] > tol) relax(a, -c[a * q + b]);
        }
        if (demand[b] > tol) relax(T, 0.0);
      }
    }
    if (!(dist[T] < kInf)) {
      throw SolverError("solve_transport: no augmenting path with remaining mass " +
                        std::to_string(remaining));
    }
    double reach = 0.0;
    for (std::size_t v = 0; v < V; ++v) {
      if (dist[v] < kInf) reach = std::max(reach, dist[v]);
    }
    for (std::size_t v = 0; v < V; ++v) pot[v] += dist[v] < kInf ? dist[v] : reach;

    // Bottleneck along T <- ... <- S.
    double amount = kInf;
    for (std::size_t v = T; v != S; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == S) {
        amount = std::min(amount, supply[v]);
      } else if (v == T) {
        amount = std::min(amount, demand[u - p]);
      } else if (u >= p) {  // reverse arc sink u -> source v
        amount = std::min(amount, flow[v * q + (u - p)]);
      }
    }
    for (std::size_t v = T; v != S; v = parent[v]) {
      const std::size_t u = parent[v];
      if (u == S) {
        supply[v] -= amount;
      } else if (v == T) {
        demand[u - p] -= amount;
      } else if (u < p) {
        flow[u * q + (v - p)] += amount;
      } else {
        double& f = flow[v * q + (u - p)];
        f = std::max(0.0, f - amount);
      }
    }
    remaining -= amount;
  }

  TransportPlan plan;
  for (std::size_t a = 0; a < p; ++a) {
    for (std::size_t b = 0; b < q; ++b) plan.cost += flow[a * q + b] * c[a * q + b];
  }
  if (opts.want_coupling) {
    plan.coupling.assign(n * n, 0.0);
    for (std::size_t a = 0; a < p; ++a) {
      for (std::size_t b = 0; b < q; ++b) plan.coupling[src[a] * n + snk[b]] = flow[a * q + b];
    }
  }
  if (opts.want_potential) {
    // Johnson potentials are an optimal dual pair (h on sources, g on
    // sinks); the c-transform of h is 1-Lipschitz and attains the optimum.
    plan.potential.assign(n, 0.0);
    if (p > 0) {
      for (std::size_t y = 0; y < n; ++y) {
        double f = kInf;
        for (std::size_t a = 0; a < p; ++a) f = std::min(f, pot[a] + cost[src[a] * n + y]);
        plan.potential[y] = f;
      }
    }
  }
  return plan;
}

double wasserstein(std::span<const double> mu1, std::span<const double> mu2,
                   std::span<const double> cost) {
  return solve_transport(mu1, mu2, cost).cost;
}

}  // namespace mixlab
