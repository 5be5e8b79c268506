#pragma once

// Outcome distributions over the measurement lattice, inverse-CDF sampling,
// and the l1-bounded adversarial perturbation used by robustness checks.

#include <cstdint>
#include <vector>

#include "cviqp/circuit.hpp"
#include "cviqp/integrator.hpp"

namespace cviqp {

struct OutcomeDistribution {
  OutcomeGrid grid;
  Eigen::VectorXd probs;  // lattice-lexicographic, one entry per outcome
  double total_mass = 0.0;
  bool normalized = false;
};

bool same_lattice(const OutcomeGrid& a, const OutcomeGrid& b);

// |amplitude|^2 for every outcome of the lattice induced by (g.L, delta_p).
// Unnormalized; total_mass collects the window-probability mass captured by
// the lattice and must not exceed 1 beyond truncation/discretization slack.
OutcomeDistribution distribution(const CircuitSpec& c, const GridSpec& g);

// Explicit renormalization to total mass 1 (never done silently elsewhere).
OutcomeDistribution normalize(const OutcomeDistribution& d);

// count i.i.d. draws by inverse CDF over the lattice-lexicographic order;
// requires a normalized distribution. Returns outcome indices.
std::vector<std::int64_t> sample(const OutcomeDistribution& d, std::int64_t count,
                                 std::uint64_t seed);

// Adversary at exact l1 distance eps: moves eps/2 mass from a random proper
// subset to its complement, proportionally, keeping the total mass fixed.
OutcomeDistribution perturb(const OutcomeDistribution& d, double eps, std::uint64_t seed);

double l1_distance(const OutcomeDistribution& a, const OutcomeDistribution& b);

}  // namespace cviqp
