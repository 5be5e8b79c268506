#include "cviqp/reduce.hpp"

#include "cviqp/errors.hpp"

namespace cviqp {

namespace {
std::atomic<int> g_max_threads{0};
}

int max_threads() { return g_max_threads.load(); }

void set_max_threads(int n) {
  if (n < 0) throw ValidationError("thread count must be >= 0");
  g_max_threads.store(n);
}

int effective_threads(std::int64_t work_items) {
  int cap = max_threads();
  if (cap == 0) {
    const unsigned hw = std::thread::hardware_concurrency();
    cap = hw == 0 ? 1 : static_cast<int>(hw);
  }
  const std::int64_t limit = std::max<std::int64_t>(1, work_items);
  return static_cast<int>(std::min<std::int64_t>(cap, limit));
}

}  // namespace cviqp
