#include "mixlab/coupling.hpp"

#include <ostream>

#include "mixlab/format.hpp"

namespace mixlab {

std::string to_string(ProfileScope s) {
  return s == ProfileScope::Global ? "global" : "restricted";
}

std::string to_string(Provenance p) {
  switch (p) {
    case Provenance::Exact: return "exact";
    case Provenance::MonteCarlo: return "monte-carlo";
    case Provenance::ClosedForm: return "closed-form";
  }
  return "unknown";
}

double ContractionProfile::sum_squares(std::size_t t) const {
  if (t > alphas.size()) throw std::out_of_range("profile shorter than requested horizon");
  double s = 0.0;
  for (std::size_t i = 0; i < t; ++i) s += alphas[i] * alphas[i];
  return s;
}

ContractionProfile ContractionProfile::closed_form(std::vector<double> alphas, ProfileScope scope) {
  for (double a : alphas) {
    if (!(a >= 0.0)) throw std::invalid_argument("contraction profile entries must be >= 0");
  }
  ContractionProfile p;
  p.lower = alphas;
  p.upper = alphas;
  p.alphas = std::move(alphas);
  p.scope = scope;
  p.provenance = Provenance::ClosedForm;
  return p;
}

ContractionProfile ContractionProfile::geometric(double alpha, std::size_t length) {
  std::vector<double> a(length);
  double v = 1.0;
  for (auto& x : a) x = (v *= alpha);
  return closed_form(std::move(a));
}

void write_profile_csv(std::ostream& os, const ContractionProfile& p) {
  os << "i,alpha_i,provenance,lower_conf,upper_conf\n";
  const std::string prov = to_string(p.provenance);
  for (std::size_t i = 0; i < p.alphas.size(); ++i) {
    const double lo = i < p.lower.size() ? p.lower[i] : p.alphas[i];
    const double hi = i < p.upper.size() ? p.upper[i] : p.alphas[i];
    os << (i + 1) << ',' << format_double(p.alphas[i]) << ',' << prov << ',' << format_double(lo)
       << ',' << format_double(hi) << '\n';
  }
}

ContractionProfile contraction_profile_exact(const Kernel& k, std::size_t T,
                                             const std::vector<bool>& in_s0) {
  const std::size_t n = k.size();
  if (!in_s0.empty() && in_s0.size() != n) {
    throw std::invalid_argument("contraction_profile_exact: S0 mask has wrong size");
  }
  std::vector<std::pair<std::size_t, std::size_t>> pairs;
  for (const auto& [x, y] : k.adjacent_pairs()) {
    if (in_s0.empty() || (in_s0[x] && in_s0[y])) pairs.emplace_back(x, y);
  }
  check_budget(static_cast<long double>(T) * (static_cast<long double>(n) * n * n +
                                               static_cast<long double>(pairs.size()) * n * n),
               "contraction_profile_exact");
  const auto cost = k.cost_table();

  ContractionProfile prof;
  prof.scope = in_s0.empty() ? ProfileScope::Global : ProfileScope::Restricted;
  prof.provenance = Provenance::Exact;
  Eigen::MatrixXd power = k.matrix();
  std::vector<double> w(pairs.size());
  for (std::size_t i = 1; i <= T; ++i) {
    // Row-major copies of each row of P^i.
    parallel_for(pairs.size(), [&](std::size_t j) {
      std::vector<double> a(n), b(n);
      const auto [x, y] = pairs[j];
      for (std::size_t z = 0; z < n; ++z) {
        a[z] = power(static_cast<Eigen::Index>(x), static_cast<Eigen::Index>(z));
        b[z] = power(static_cast<Eigen::Index>(y), static_cast<Eigen::Index>(z));
      }
      w[j] = wasserstein(a, b, cost);
    });
    double alpha = 0.0;
    for (double v : w) alpha = std::max(alpha, v);
    prof.alphas.push_back(alpha);
    if (i < T) power = power * k.matrix();
  }
  prof.lower = prof.alphas;
  prof.upper = prof.alphas;
  return prof;
}

double geometric_alpha(const Kernel& k) {
  const auto prof = contraction_profile_exact(k, 1);
  return prof.alphas.empty() ? 0.0 : prof.alphas.front();
}

CoalescenceBound coalescence_bound_from_times(const std::vector<std::uint64_t>& times,
                                              std::uint64_t t) {
  CoalescenceBound b;
  b.replicas = times.size();
  std::size_t open = 0;
  for (auto tau : times) open += tau > t ? 1 : 0;
  b.estimate = times.empty() ? 1.0 : static_cast<double>(open) / static_cast<double>(times.size());
  b.upper = wilson_upper(open, times.size());
  return b;
}

}  // namespace mixlab
