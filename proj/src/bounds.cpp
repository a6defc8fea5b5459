#include "mixlab/bounds.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numeric>
#include <ostream>
#include <stdexcept>

#include "mixlab/format.hpp"

namespace mixlab {
namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double param(const std::map<std::string, double>& p, const char* key) {
  const auto it = p.find(key);
  if (it == p.end()) throw std::logic_error(std::string("TailBound: missing parameter ") + key);
  return it->second;
}

}  // namespace

std::string to_string(BoundKind k) {
  switch (k) {
    case BoundKind::AzumaProfile: return "azuma-profile";
    case BoundKind::StationaryProfile: return "stationary-profile";
    case BoundKind::Geometric: return "geometric";
    case BoundKind::Bernstein: return "bernstein";
    case BoundKind::Range: return "range";
    case BoundKind::Restricted: return "restricted";
  }
  return "unknown";
}

TailBound::TailBound(BoundKind kind, std::map<std::string, double> params, bool vacuous)
    : kind_(kind), params_(std::move(params)), vacuous_(vacuous) {}

// Every bound is 2 exp(-u^2 / denominator(u)) (+ slack). The denominator
// carries the kind-specific variance proxy.
double TailBound::exponent(double u) const {
  switch (kind_) {
    case BoundKind::AzumaProfile:
    case BoundKind::Restricted:
    case BoundKind::Geometric:
    case BoundKind::Range:
    case BoundKind::StationaryProfile: {
      const double denom = param(params_, "denominator");
      if (denom <= 0.0) return kInf;
      return u * u / denom;
    }
    case BoundKind::Bernstein: {
      const double v = param(params_, "v"), a = param(params_, "alpha_hat");
      return u * u / (4.0 * v * (1.0 + a * u / (6.0 * v)));
    }
  }
  return 0.0;
}

double TailBound::operator()(double u_raw) const {
  if (vacuous_) return 1.0;
  if (!(u_raw > 0.0)) return 1.0;
  double u = u_raw / lipschitz_;
  const auto shift = params_.find("deviation_scale");
  if (shift != params_.end()) u *= shift->second;  // deviation w -> u = w/2
  const auto floor = params_.find("valid_from");
  if (floor != params_.end() && u < floor->second) return 1.0;
  const auto slack = params_.find("slack");
  const double extra = slack == params_.end() ? 0.0 : slack->second;
  const double e = exponent(u);
  const double b = (std::isinf(e) ? 0.0 : 2.0 * std::exp(-e)) + extra;
  return std::min(1.0, b);
}

std::string TailBound::label() const {
  std::string s = to_string(kind_);
  if (vacuous_) s += " (vacuous)";
  if (kind_ == BoundKind::Restricted && params_.count("delta") != 0) {
    s += " (conditional on (delta,t0) inputs)";
  }
  return s;
}

TailBound TailBound::rescaled(double lipschitz) const {
  if (!(lipschitz > 0.0)) throw std::invalid_argument("TailBound::rescaled: L must be > 0");
  TailBound b = *this;
  b.lipschitz_ = lipschitz_ * lipschitz;
  return b;
}

TailBound azuma_bound(const ContractionProfile& profile, std::size_t t) {
  const double s = profile.sum_squares(t);
  return TailBound(BoundKind::AzumaProfile,
                   {{"t", static_cast<double>(t)}, {"sum_alpha_sq", s}, {"denominator", 2.0 * s}});
}

TailBound restricted_azuma_bound(const ContractionProfile& profile, std::size_t t) {
  const double s = profile.sum_squares(t);
  return TailBound(BoundKind::Restricted,
                   {{"t", static_cast<double>(t)}, {"sum_alpha_sq", s}, {"denominator", 2.0 * s}});
}

TailBound stationary_bound_sum(double sum_squares) {
  if (!(sum_squares >= 0.0)) throw std::invalid_argument("stationary_bound: negative sum");
  const bool vacuous = std::isinf(sum_squares);
  return TailBound(BoundKind::StationaryProfile,
                   {{"sum_alpha_sq", sum_squares},
                    {"denominator", vacuous ? kInf : 2.0 * sum_squares},
                    {"deviation_scale", 0.5}},
                   vacuous);
}

TailBound stationary_bound(const ContractionProfile& profile, double remainder) {
  if (!(remainder >= 0.0)) throw std::invalid_argument("stationary_bound: remainder must be >= 0");
  return stationary_bound_sum(profile.sum_squares(profile.length()) + remainder);
}

TailBound conditional_stationary_bound(const ContractionProfile& profile, std::size_t t0,
                                       double delta) {
  if (!(delta >= 0.0)) throw std::invalid_argument("conditional_stationary_bound: delta < 0");
  const double s = profile.sum_squares(t0);
  return TailBound(BoundKind::Restricted, {{"t0", static_cast<double>(t0)},
                                           {"delta", delta},
                                           {"sum_alpha_sq", s},
                                           {"denominator", 2.0 * s},
                                           {"deviation_scale", 0.5},
                                           {"valid_from", delta},
                                           {"slack", 2.0 * delta}});
}

TailBound geometric_bound(double alpha) {
  if (!(alpha >= 0.0)) throw std::invalid_argument("geometric_bound: alpha must be >= 0");
  if (alpha >= 1.0) return TailBound(BoundKind::Geometric, {{"alpha", alpha}, {"denominator", kInf}}, true);
  const double denom = 2.0 * alpha * alpha / (1.0 - alpha * alpha);
  return TailBound(BoundKind::Geometric, {{"alpha", alpha}, {"denominator", denom}});
}

TailBound normal_rate_bound(double c2, double n) {
  if (!(c2 > 0.0) || !(n > 0.0)) throw std::invalid_argument("normal_rate_bound: c2, n must be > 0");
  return TailBound(BoundKind::Geometric, {{"c2", c2}, {"n", n}, {"denominator", c2 * n}});
}

TailBound bernstein_bound(double v, double alpha_hat) {
  if (!(v > 0.0)) throw std::invalid_argument("bernstein_bound: v must be > 0");
  if (!(alpha_hat >= 0.0)) throw std::invalid_argument("bernstein_bound: alpha_hat must be >= 0");
  return TailBound(BoundKind::Bernstein, {{"v", v}, {"alpha_hat", alpha_hat}});
}

TailBound mcdiarmid_range_bound(const std::vector<double>& ranges) {
  if (ranges.empty()) throw std::invalid_argument("mcdiarmid_range_bound: empty ranges");
  double s = 0.0;
  for (double r : ranges) {
    if (!(r >= 0.0)) throw std::invalid_argument("mcdiarmid_range_bound: ranges must be >= 0");
    s += r * r;
  }
  return TailBound(BoundKind::Range, {{"sum_range_sq", s}, {"denominator", s / 2.0}});
}

std::vector<double> linear_grid(double u_max, std::size_t points) {
  if (points == 0 || !(u_max > 0.0)) throw std::invalid_argument("linear_grid: bad range");
  std::vector<double> g(points);
  for (std::size_t j = 0; j < points; ++j) {
    g[j] = u_max * static_cast<double>(j + 1) / static_cast<double>(points);
  }
  return g;
}

EmpiricalTail tail_from_samples(const std::vector<double>& values, const std::vector<double>& u_grid,
                                const std::vector<char>& stayed) {
  if (!std::is_sorted(u_grid.begin(), u_grid.end())) {
    throw std::invalid_argument("empirical tail: u grid must be increasing");
  }
  EmpiricalTail tail;
  tail.u_grid = u_grid;
  tail.replicas = values.size();
  tail.restricted = !stayed.empty();
  RunningStats st;
  for (double v : values) st.add(v);
  tail.center = st.mean;
  tail.center_error = st.sem();
  tail.stddev = st.stddev();

  std::vector<double> dev(values.size());
  for (std::size_t r = 0; r < values.size(); ++r) dev[r] = std::abs(values[r] - tail.center);
  const double n = static_cast<double>(values.size());
  tail.exceed_freq.resize(u_grid.size());
  tail.exceed_freq_in_s0.resize(u_grid.size());
  for (char s : stayed) tail.stayed_in_s0 += s ? 1 : 0;
  for (std::size_t j = 0; j < u_grid.size(); ++j) {
    std::size_t all = 0, inside = 0;
    for (std::size_t r = 0; r < dev.size(); ++r) {
      if (dev[r] >= u_grid[j]) {
        ++all;
        if (!stayed.empty() && stayed[r]) ++inside;
      }
    }
    tail.exceed_freq[j] = n > 0 ? static_cast<double>(all) / n : 0.0;
    tail.exceed_freq_in_s0[j] = stayed.empty() ? tail.exceed_freq[j] : static_cast<double>(inside) / n;
  }
  return tail;
}

Comparison compare(const EmpiricalTail& tail, const TailBound& bound) {
  Comparison c;
  c.bound_label = bound.label();
  const bool use_s0 = tail.restricted && bound.kind() == BoundKind::Restricted;
  const auto& freq = use_s0 ? tail.exceed_freq_in_s0 : tail.exceed_freq;
  for (std::size_t j = 0; j < tail.u_grid.size(); ++j) {
    ComparisonRow row;
    row.u = tail.u_grid[j];
    row.bound = bound(row.u);
    row.freq = freq[j];
    row.se = binomial_se(row.freq, tail.replicas);
    row.margin = row.bound - row.freq;
    row.ok = row.freq <= row.bound + 3.0 * row.se;
    c.consistent = c.consistent && row.ok;
    c.rows.push_back(row);
  }
  return c;
}

void write_comparison_csv(std::ostream& os, const Comparison& c) {
  os << "u,bound,freq,se,margin\n";
  for (const auto& r : c.rows) {
    os << format_double(r.u) << ',' << format_double(r.bound) << ',' << format_double(r.freq) << ','
       << format_double(r.se) << ',' << format_double(r.margin) << '\n';
  }
}

}  // namespace mixlab
