#include "cviqp/contour.hpp"

#include <cmath>

#include "cviqp/errors.hpp"
#include "cviqp/reduce.hpp"

namespace cviqp {

ContourField contour_field(const Polynomial& p, double sigma, int resolution, double L) {
  if (p.n_vars() != 2) throw ValidationError("contour fields need a two-variable phase");
  if (!(sigma > 0.0)) throw ValidationError("sigma must be positive");
  if (resolution < 2) throw ValidationError("resolution must be at least 2");
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("L must be positive and finite");
  check_grid_budget(static_cast<std::int64_t>(resolution) * resolution, "contour field");

  ContourField field;
  field.q1.resize(resolution);
  field.q2.resize(resolution);
  const double step = 2.0 * L / static_cast<double>(resolution);
  for (int i = 0; i < resolution; ++i) {
    field.q1[i] = -L + step * static_cast<double>(i);
    field.q2[i] = field.q1[i];
  }

  const bool enveloped = std::isfinite(sigma);
  const double inv_two_sigma_sq = enveloped ? 1.0 / (2.0 * sigma * sigma) : 0.0;
  field.values.resize(resolution, resolution);
  parallel_for(resolution, [&](std::int64_t row) {
    const double q2 = field.q2[static_cast<Eigen::Index>(row)];
    double q[2];
    q[1] = q2;
    for (int col = 0; col < resolution; ++col) {
      q[0] = field.q1[col];
      double value = std::cos(eval(p, q, 2));
      if (enveloped) value *= std::exp(-(q[0] * q[0] + q2 * q2) * inv_two_sigma_sq);
      field.values(static_cast<Eigen::Index>(row), col) = value;
    }
  });
  return field;
}

}  // namespace cviqp
