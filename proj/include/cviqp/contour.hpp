#pragma once

// Two-mode visualization field: the real part of the phase factor times the
// squeezing envelope, sampled on a left-endpoint square lattice. Plotting
// these fields side by side for decreasing sigma shows the envelope taming
// the integrand's oscillation.

#include <Eigen/Dense>

#include "cviqp/polynomial.hpp"

namespace cviqp {

struct ContourField {
  Eigen::VectorXd q1;      // column coordinates, resolution entries
  Eigen::VectorXd q2;      // row coordinates
  Eigen::MatrixXd values;  // values(i, j) = field at (q1[j], q2[i])
};

// cos(f(q1, q2)) * exp(-(q1^2 + q2^2) / (2 sigma^2)) for a two-variable
// phase polynomial; sigma may be infinite (no envelope). Coordinates run
// over {-L + i * 2L / resolution}.
ContourField contour_field(const Polynomial& p, double sigma, int resolution, double L);

}  // namespace cviqp
