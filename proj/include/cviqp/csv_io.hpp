#pragma once

// CSV writers for distributions, sample lists and contour fields. Numbers
// are rendered with %.17g so files round-trip doubles exactly and reruns
// are byte-identical.

#include <cstdint>
#include <ostream>
#include <string>
#include <vector>

#include "cviqp/contour.hpp"
#include "cviqp/sampler.hpp"

namespace cviqp {

std::string format_g17(double value);

// Header s_1,...,s_n,probability; one row per outcome in lattice order.
void write_distribution_csv(std::ostream& out, const OutcomeDistribution& d);

// Header s_1,...,s_n; one row of outcome coordinates per draw.
void write_samples_csv(std::ostream& out, const OutcomeGrid& grid,
                       const std::vector<std::int64_t>& draws);

// Corner cell q2\q1, then the q1 axis across the first row and the q2 axis
// down the first column.
void write_contour_csv(std::ostream& out, const ContourField& field);

}  // namespace cviqp
