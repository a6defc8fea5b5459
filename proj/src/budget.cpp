#include "mixlab/budget.hpp"

#include <atomic>
#include <cstdlib>
#include <mutex>

namespace mixlab {
namespace {

std::atomic<std::uint64_t> g_cap{0};
std::once_flag g_init;

void init_from_env() {
  std::uint64_t cap = kDefaultStepCap;
  if (const char* env = std::getenv("MIXLAB_CAP_STEPS"); env != nullptr && *env != '\0') {
    char* end = nullptr;
    const unsigned long long v = std::strtoull(env, &end, 10);
    if (end != nullptr && *end == '\0' && v > 0) cap = v;
  }
  std::uint64_t expected = 0;
  g_cap.compare_exchange_strong(expected, cap);
}

}  // namespace

std::uint64_t step_cap() {
  std::call_once(g_init, init_from_env);
  return g_cap.load();
}

void set_step_cap(std::uint64_t cap) {
  std::call_once(g_init, init_from_env);
  g_cap.store(cap);
}

void check_budget(long double work, const std::string& what) {
  const auto cap = static_cast<long double>(step_cap());
  if (work > cap) {
    throw BudgetExceeded(what + ": requested work " + std::to_string(static_cast<double>(work)) +
                         " exceeds step cap " + std::to_string(step_cap()) +
                         " (set MIXLAB_CAP_STEPS to raise it)");
  }
}

}  // namespace mixlab
