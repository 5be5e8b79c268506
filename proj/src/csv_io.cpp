#include "cviqp/csv_io.hpp"

#include <cstdio>

#include "cviqp/errors.hpp"

namespace cviqp {

std::string format_g17(double value) {
  char buffer[40];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

namespace {

void write_outcome_header(std::ostream& out, int n_modes, bool with_probability) {
  for (int mode = 0; mode < n_modes; ++mode) {
    if (mode > 0) out << ',';
    out << "s_" << (mode + 1);
  }
  if (with_probability) out << ",probability";
  out << '\n';
}

void write_outcome_coords(std::ostream& out, const OutcomeGrid& grid, std::int64_t index,
                          std::vector<double>& scratch) {
  grid.decode(index, scratch.data());
  for (int mode = 0; mode < grid.n_modes; ++mode) {
    if (mode > 0) out << ',';
    out << format_g17(scratch[static_cast<std::size_t>(mode)]);
  }
}

}  // namespace

void write_distribution_csv(std::ostream& out, const OutcomeDistribution& d) {
  write_outcome_header(out, d.grid.n_modes, true);
  std::vector<double> scratch(static_cast<std::size_t>(d.grid.n_modes));
  for (std::int64_t i = 0; i < d.grid.total(); ++i) {
    write_outcome_coords(out, d.grid, i, scratch);
    out << ',' << format_g17(d.probs[i]) << '\n';
  }
}

void write_samples_csv(std::ostream& out, const OutcomeGrid& grid,
                       const std::vector<std::int64_t>& draws) {
  write_outcome_header(out, grid.n_modes, false);
  std::vector<double> scratch(static_cast<std::size_t>(grid.n_modes));
  for (const std::int64_t index : draws) {
    if (index < 0 || index >= grid.total())
      throw ValidationError("sample index outside the outcome lattice");
    write_outcome_coords(out, grid, index, scratch);
    out << '\n';
  }
}

void write_contour_csv(std::ostream& out, const ContourField& field) {
  out << "q2\\q1";
  for (Eigen::Index col = 0; col < field.q1.size(); ++col)
    out << ',' << format_g17(field.q1[col]);
  out << '\n';
  for (Eigen::Index row = 0; row < field.q2.size(); ++row) {
    out << format_g17(field.q2[row]);
    for (Eigen::Index col = 0; col < field.q1.size(); ++col)
      out << ',' << format_g17(field.values(row, col));
    out << '\n';
  }
}

}  // namespace cviqp
