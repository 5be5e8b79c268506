#include "cviqp/errors.hpp"

#include <atomic>

namespace cviqp {

namespace {
std::atomic<std::int64_t> g_grid_budget{std::int64_t{1} << 24};
std::atomic<std::int64_t> g_outcome_budget{std::int64_t{1} << 20};
}  // namespace

std::int64_t grid_budget() { return g_grid_budget.load(); }

void set_grid_budget(std::int64_t points) {
  if (points <= 0) throw ValidationError("grid budget must be positive");
  g_grid_budget.store(points);
}

std::int64_t outcome_budget() { return g_outcome_budget.load(); }

void set_outcome_budget(std::int64_t outcomes) {
  if (outcomes <= 0) throw ValidationError("outcome budget must be positive");
  g_outcome_budget.store(outcomes);
}

void check_grid_budget(std::int64_t required, const char* what) {
  const std::int64_t allowed = grid_budget();
  if (required > allowed) {
    throw BudgetError(std::string(what) + ": requires " + std::to_string(required) +
                      " grid points, budget is " + std::to_string(allowed));
  }
}

void check_outcome_budget(std::int64_t required, const char* what) {
  const std::int64_t allowed = outcome_budget();
  if (required > allowed) {
    throw BudgetError(std::string(what) + ": requires " + std::to_string(required) +
                      " outcomes, budget is " + std::to_string(allowed));
  }
}

}  // namespace cviqp
