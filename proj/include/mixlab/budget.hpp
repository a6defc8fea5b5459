#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace mixlab {

/// Raised when a request would exceed the global work budget.
class BudgetExceeded : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Global cap on simulated steps (or dense row operations) per call.
/// Defaults to kDefaultStepCap; the MIXLAB_CAP_STEPS environment variable
/// overrides it the first time it is read.
std::uint64_t step_cap();
void set_step_cap(std::uint64_t cap);

inline constexpr std::uint64_t kDefaultStepCap = 20'000'000'000ULL;

/// Throws BudgetExceeded if work > step_cap(). `what` names the request.
void check_budget(long double work, const std::string& what);

}  // namespace mixlab
