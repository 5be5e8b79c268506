#include "cviqp/sampler.hpp"

#include <algorithm>
#include <cmath>

#include "cviqp/errors.hpp"
#include "cviqp/reduce.hpp"
#include "cviqp/rng.hpp"

namespace cviqp {

bool same_lattice(const OutcomeGrid& a, const OutcomeGrid& b) {
  return a.n_modes == b.n_modes && a.L == b.L && a.delta_p == b.delta_p && a.ell == b.ell;
}

OutcomeDistribution distribution(const CircuitSpec& c, const GridSpec& g) {
  if (!c.sigma_finite())
    throw ValidationError("outcome distributions need finite sigma");
  if (g.n_modes != c.n_modes) throw ValidationError("grid mode count does not match circuit");
  if (c.n_modes > 8) throw ValidationError("more than 8 modes is not supported");
  const OutcomeGrid lattice = make_outcome_grid(c.n_modes, g.L, c.delta_p);
  const std::int64_t outcomes = lattice.total();
  check_outcome_budget(outcomes, "distribution");
  check_grid_budget(g.total_points(), "distribution per-outcome quadrature");

  OutcomeDistribution d;
  d.grid = lattice;
  d.probs.resize(outcomes);
  parallel_for(outcomes, [&](std::int64_t index) {
    double s[8];
    lattice.decode(index, s);
    Eigen::Map<const Eigen::VectorXd> sv(s, c.n_modes);
    const AmplitudeEstimate est = squeezed_amplitude_grid(c, sv, g);
    d.probs[index] = std::norm(est.value);
  });
  d.total_mass =
      pairwise_sum<double>(outcomes, [&](std::int64_t index) { return d.probs[index]; });

  // Window probabilities over disjoint windows cannot exceed 1; allow slack
  // for domain truncation, discretization, and the dropped sinc kernel
  // (relative error of order (sigma * delta_p)^2).
  const double slack = 0.05 + 3.0 * (c.sigma * c.delta_p) * (c.sigma * c.delta_p);
  if (d.total_mass > 1.0 + slack)
    throw NumericalError("captured probability mass exceeds 1 beyond tolerance");
  d.normalized = false;
  return d;
}

OutcomeDistribution normalize(const OutcomeDistribution& d) {
  if (!(d.total_mass > 0.0))
    throw ValidationError("cannot normalize a distribution with zero mass");
  OutcomeDistribution out = d;
  out.probs /= d.total_mass;
  out.total_mass = pairwise_sum<double>(out.probs.size(),
                                        [&](std::int64_t i) { return out.probs[i]; });
  out.normalized = true;
  return out;
}

std::vector<std::int64_t> sample(const OutcomeDistribution& d, std::int64_t count,
                                 std::uint64_t seed) {
  if (!d.normalized) throw ValidationError("sampling needs a normalized distribution");
  if (count < 0) throw ValidationError("sample count must be non-negative");
  const std::int64_t outcomes = d.probs.size();
  std::vector<double> cdf(static_cast<std::size_t>(outcomes));
  double acc = 0.0;
  for (std::int64_t i = 0; i < outcomes; ++i) {
    acc += d.probs[i];
    cdf[static_cast<std::size_t>(i)] = acc;
  }
  Rng rng(seed);
  std::vector<std::int64_t> draws(static_cast<std::size_t>(count));
  for (std::int64_t t = 0; t < count; ++t) {
    const double u = rng.uniform01() * acc;
    const auto it = std::upper_bound(cdf.begin(), cdf.end(), u);
    draws[static_cast<std::size_t>(t)] =
        it == cdf.end() ? outcomes - 1 : static_cast<std::int64_t>(it - cdf.begin());
  }
  return draws;
}

OutcomeDistribution perturb(const OutcomeDistribution& d, double eps, std::uint64_t seed) {
  if (!(eps >= 0.0) || !(eps <= 1.0))
    throw ValidationError("perturbation distance must lie in [0, 1]");
  if (!d.normalized) throw ValidationError("perturbation needs a normalized distribution");
  OutcomeDistribution out = d;
  if (eps == 0.0) return out;
  const std::int64_t outcomes = d.probs.size();
  if (outcomes < 2) throw ValidationError("perturbation needs at least two outcomes");

  Rng rng(seed);
  std::vector<bool> subset(static_cast<std::size_t>(outcomes));
  const double half = 0.5 * eps;
  double mass_in = 0.0, mass_out = 0.0;
  bool ok = false;
  for (int attempt = 0; attempt < 64 && !ok; ++attempt) {
    mass_in = mass_out = 0.0;
    for (std::int64_t i = 0; i < outcomes; ++i) {
      const bool in = rng.coin();
      subset[static_cast<std::size_t>(i)] = in;
      (in ? mass_in : mass_out) += d.probs[i];
    }
    ok = mass_in > half && mass_out > 0.0;
  }
  if (!ok)
    throw ValidationError("could not draw a subset heavy enough for the requested distance");

  // Donors scale down by half/mass_in, receivers up by half/mass_out: the
  // l1 distance is half + half = eps and the total mass is unchanged.
  const double down = 1.0 - half / mass_in;
  const double up = 1.0 + half / mass_out;
  for (std::int64_t i = 0; i < outcomes; ++i)
    out.probs[i] = d.probs[i] * (subset[static_cast<std::size_t>(i)] ? down : up);
  out.total_mass = pairwise_sum<double>(outcomes, [&](std::int64_t i) { return out.probs[i]; });
  return out;
}

double l1_distance(const OutcomeDistribution& a, const OutcomeDistribution& b) {
  if (!same_lattice(a.grid, b.grid))
    throw ValidationError("distributions live on different lattices");
  return pairwise_sum<double>(a.probs.size(),
                              [&](std::int64_t i) { return std::abs(a.probs[i] - b.probs[i]); });
}

}  // namespace cviqp
