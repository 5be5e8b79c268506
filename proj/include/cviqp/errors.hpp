#pragma once

// Error taxonomy and resource budgets shared by the library and the CLI.
// ValidationError: bad inputs or configs (CLI exit 2).
// BudgetError: a request would exceed the configured work budget (CLI exit 3).
// NumericalError: an internal numerical assertion failed (CLI exit 4).

#include <cstdint>
#include <stdexcept>
#include <string>

namespace cviqp {

struct ValidationError : std::invalid_argument {
  using std::invalid_argument::invalid_argument;
};

struct BudgetError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

struct NumericalError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

// Process-wide caps on quadrature grid points and on outcome-lattice size.
// Defaults: 2^24 grid points, 2^20 outcomes.
std::int64_t grid_budget();
void set_grid_budget(std::int64_t points);
std::int64_t outcome_budget();
void set_outcome_budget(std::int64_t outcomes);

// Throws BudgetError naming the required and allowed sizes.
void check_grid_budget(std::int64_t required, const char* what);
void check_outcome_budget(std::int64_t required, const char* what);

}  // namespace cviqp
