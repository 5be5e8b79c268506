#include "cviqp/hardness.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <utility>

#include "cviqp/errors.hpp"
#include "cviqp/integrator.hpp"
#include "cviqp/reduce.hpp"
#include "cviqp/rng.hpp"

namespace cviqp {

namespace {

constexpr double kPi = 3.14159265358979323846264338328;
constexpr double kTwoPi = 6.283185307179586476925286766559;

// Phase assigned to accepted strings of the b-th selector block. The same
// expression is used when the table is built and when the sum is
// reconstructed from popcounts, so the two sides agree to rounding.
double sharp_p_midphase(std::int64_t b, std::int64_t bins) {
  return kTwoPi * (static_cast<double>(b) + 0.5) / static_cast<double>(bins);
}

double riemann_scale(const GridSpec& g) {
  double scale = 1.0;
  const double per_mode = g.delta_q() / kTwoPi;
  for (int mode = 0; mode < g.n_modes; ++mode) scale *= per_mode;
  return scale;
}

int selector_bits(std::int64_t bins) {
  int l = 0;
  while ((std::int64_t{1} << l) < bins) ++l;
  return l;
}

}  // namespace

std::int64_t BooleanOracle::popcount() const {
  std::int64_t count = 0;
  for (const std::uint8_t v : table) count += v;
  return count;
}

void validate_oracles(const std::vector<BooleanOracle>& oracles) {
  const auto bins = static_cast<std::int64_t>(oracles.size());
  if (bins < 2) throw ValidationError("need at least two oracles");
  if ((bins & (bins - 1)) != 0) throw ValidationError("oracle count must be a power of two");
  const int arity = oracles.front().arity;
  if (arity < 0 || arity > 30) throw ValidationError("oracle arity must be in 0..30");
  for (const auto& oracle : oracles) {
    if (oracle.arity != arity) throw ValidationError("all oracles must share one arity");
    if (oracle.table.size() != (std::size_t{1} << arity))
      throw ValidationError("oracle table size must be 2^arity");
    for (const std::uint8_t v : oracle.table)
      if (v > 1) throw ValidationError("oracle table entries must be 0 or 1");
  }
}

PhaseFunction build_sharp_p_phase(const std::vector<BooleanOracle>& oracles,
                                  const GridSpec& g) {
  validate_oracles(oracles);
  const auto bins = static_cast<std::int64_t>(oracles.size());
  const int l = selector_bits(bins);
  const int arity = oracles.front().arity;
  if (g.m_bits() != l + arity)
    throw ValidationError("grid bit count must equal selector bits plus oracle arity");
  const std::int64_t total = g.total_points();
  check_grid_budget(total, "tabulated phase construction");

  const std::int64_t y_mask = (std::int64_t{1} << arity) - 1;
  TabulatedPhase t;
  t.m_bits = g.m_bits();
  t.phases.resize(total);
  parallel_for(total, [&](std::int64_t x) {
    const std::int64_t b = x >> arity;
    const std::int64_t y = x & y_mask;
    t.phases[x] = oracles[static_cast<std::size_t>(b)].table[static_cast<std::size_t>(y)]
                      ? sharp_p_midphase(b, bins)
                      : 0.0;
  });
  return PhaseFunction::from_table(std::move(t));
}

SharpPSumCheck verify_sharp_p_sum(const std::vector<BooleanOracle>& oracles,
                                  const GridSpec& g) {
  if (g.m_bits() > 20)
    throw ValidationError("brute-force verification is limited to 20 bits");
  const PhaseFunction phase = build_sharp_p_phase(oracles, g);
  const auto bins = static_cast<std::int64_t>(oracles.size());

  // N popcounts plus the count of zero-phase strings (which contribute
  // exp(i * 0) = 1 each) reconstruct the full 2^m-term sum.
  std::complex<double> acc{0.0, 0.0};
  std::int64_t accepted = 0;
  for (std::int64_t b = 0; b < bins; ++b) {
    const std::int64_t pop = oracles[static_cast<std::size_t>(b)].popcount();
    const double angle = sharp_p_midphase(b, bins);
    acc += static_cast<double>(pop) * std::complex<double>(std::cos(angle), std::sin(angle));
    accepted += pop;
  }
  acc += static_cast<double>(g.total_points() - accepted);

  SharpPSumCheck check;
  check.reconstructed = riemann_scale(g) * acc;
  check.direct =
      riemann_amplitude(phase, Eigen::VectorXd::Zero(g.n_modes), g).value;
  check.abs_gap = std::abs(check.reconstructed - check.direct);
  return check;
}

ArccosEmbedding arccos_embed(const std::function<double(const Eigen::VectorXd&)>& phi,
                             double c, const GridSpec& g) {
  if (!phi) throw ValidationError("arccos embedding needs a function");
  if (!(c > 0.0) || !std::isfinite(c))
    throw ValidationError("arccos embedding bound must be positive and finite");
  const std::int64_t total = g.total_points();
  check_grid_budget(total, "arccos embedding");

  TabulatedPhase t;
  t.m_bits = g.m_bits();
  t.phases.resize(total);
  std::vector<std::uint8_t> clamp_mark(static_cast<std::size_t>(total), 0);
  // Workers must not throw (phi is caller code); record trouble and raise
  // it after the loop.
  std::atomic<bool> bad{false};
  parallel_for(total, [&](std::int64_t x) {
    double v = 0.0;
    try {
      Eigen::VectorXd q(g.n_modes);
      g.decode(x, q.data());
      v = phi(q) / c;
    } catch (...) {
      bad.store(true, std::memory_order_relaxed);
      v = 1.0;
    }
    if (!std::isfinite(v)) {
      bad.store(true, std::memory_order_relaxed);
      v = 1.0;
    }
    if (v > 1.0) {
      v = 1.0;
      clamp_mark[static_cast<std::size_t>(x)] = 1;
    } else if (v < -1.0) {
      v = -1.0;
      clamp_mark[static_cast<std::size_t>(x)] = 1;
    }
    // acos lands in [0, pi], inside the required [0, 2 pi) phase range, and
    // cos(acos(v)) = v makes Re of the phase sum the plain quadrature of
    // phi / c.
    t.phases[x] = std::acos(v);
  });
  if (bad.load())
    throw NumericalError("arccos embedding saw a non-finite or throwing integrand");

  ArccosEmbedding out{PhaseFunction::from_table(std::move(t)), 0};
  for (const std::uint8_t flag : clamp_mark) out.clamped += flag;
  return out;
}

FoolingInstance make_fooling_instance(Eigen::MatrixXd nodes, double delta) {
  if (nodes.cols() < 1) throw ValidationError("fooling instance needs at least one mode");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("fooling delta must be positive and finite");
  if (!nodes.allFinite()) throw ValidationError("fooling nodes must be finite");
  FoolingInstance inst;
  inst.nodes = std::move(nodes);
  inst.delta = delta;
  return inst;
}

double fooling_eval(const FoolingInstance& inst, const Eigen::VectorXd& q) {
  if (q.size() != inst.n()) throw ValidationError("fooling evaluation dimension mismatch");
  if (inst.count() == 0) return 1.0;
  double dmin = std::numeric_limits<double>::infinity();
  for (Eigen::Index i = 0; i < inst.nodes.rows(); ++i) {
    const double d = (q.transpose() - inst.nodes.row(i)).norm();
    dmin = std::min(dmin, d);
  }
  const double radius = inst.ball_radius();
  return std::min(1.0, std::max(0.0, (dmin - radius) / radius));
}

FoolingDemoReport fooling_demo(const FoolingInstance& inst, double sigma, const GridSpec& g) {
  if (g.n_modes != inst.n()) throw ValidationError("fooling demo grid dimension mismatch");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ValidationError("fooling demo needs a positive finite sigma");
  const std::int64_t total = g.total_points();
  check_grid_budget(total, "fooling demo quadrature");

  const double inv_two_sigma_sq = 1.0 / (2.0 * sigma * sigma);
  const auto envelope = [&](const Eigen::VectorXd& q) {
    return std::exp(-q.squaredNorm() * inv_two_sigma_sq);
  };

  // Equal-weight rule with the adversary's own nodes: (2L)^n / count times
  // the sum of integrand values there (an empty rule outputs 0). The bump
  // vanishes on every node, so the rule returns (sign-dependent) zero for
  // both signed integrands; the + 0.0 collapses -0 and +0 to one
  // representation before comparison.
  double volume = 1.0;
  for (int mode = 0; mode < g.n_modes; ++mode) volume *= 2.0 * g.L;
  const double node_weight =
      inst.count() > 0 ? volume / static_cast<double>(inst.count()) : 0.0;
  double sum_plus = 0.0;
  double sum_minus = 0.0;
  for (Eigen::Index i = 0; i < inst.nodes.rows(); ++i) {
    const Eigen::VectorXd node = inst.nodes.row(i).transpose();
    const double value = fooling_eval(inst, node) * envelope(node);
    sum_plus += value;
    sum_minus += -value;
  }

  FoolingDemoReport report;
  report.rule_plus = node_weight * sum_plus + 0.0;
  report.rule_minus = node_weight * sum_minus + 0.0;
  report.rule_outputs_identical =
      report.rule_plus == report.rule_minus &&
      std::signbit(report.rule_plus) == std::signbit(report.rule_minus);

  // Fine-grid value of the integral the rule cannot see. Any quadrature
  // that returns the same answer for +bump and -bump misses at least one of
  // them by the integral's magnitude.
  double cell = 1.0;
  for (int mode = 0; mode < g.n_modes; ++mode) cell *= g.delta_q();
  const double integral = cell * pairwise_sum<double>(total, [&](std::int64_t x) {
    Eigen::VectorXd q(g.n_modes);
    g.decode(x, q.data());
    return fooling_eval(inst, q) * envelope(q);
  });
  report.integral_phi_g = integral;
  report.error_lower_bound = integral;
  report.nodes = inst.count();
  report.delta = inst.delta;
  report.sigma = sigma;
  return report;
}

double fooling_node_bound(int n, double sigma, double delta, double eps, double eps_b) {
  if (n < 1) throw ValidationError("node bound needs at least one mode");
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ValidationError("node bound needs a positive finite sigma");
  if (!(delta > 0.0) || !std::isfinite(delta))
    throw ValidationError("node bound needs a positive finite delta");
  const double base = sigma / (delta * std::sqrt(std::exp(1.0)));
  return std::pow(base, static_cast<double>(n)) - (eps - 2.0 * eps_b);
}

bool fooling_bound_exponential(double sigma, double delta) {
  return delta < sigma / std::sqrt(std::exp(1.0));
}

AntiConcentrationReport anticoncentration_report(const CircuitSpec& c, const GridSpec& g,
                                                 double alpha, std::int64_t trials,
                                                 std::uint64_t seed) {
  if (!c.sigma_finite())
    throw ValidationError("anti-concentration statistics need finite squeezing");
  if (!(alpha > 0.0) || !(alpha < 1.0)) throw ValidationError("alpha must lie in (0, 1)");
  if (trials < 0) throw ValidationError("trial count must be nonnegative");

  const OutcomeGrid lattice = make_outcome_grid(c.n_modes, g.L, c.delta_p);
  const std::int64_t lattice_total = lattice.total();
  double uniform_prob = 1.0;
  for (int mode = 0; mode < c.n_modes; ++mode)
    uniform_prob /= static_cast<double>(lattice.ell);

  AntiConcentrationReport report;
  report.alpha = alpha;
  report.l_condition_value = std::sqrt(c.delta_p * g.L) / kPi;
  report.l_condition_ok =
      std::abs(report.l_condition_value - 1.0) <= 1.0 / static_cast<double>(c.n_modes);

  Eigen::VectorXd probs;
  double mean = 0.0;
  if (trials == 0) {
    // Exhaustive pass over the outcome lattice shares the distribution code
    // path, so the scaled mean is by construction the captured mass.
    const OutcomeDistribution d = distribution(c, g);
    probs = d.probs;
    report.trials = lattice_total;
    report.exhaustive = true;
    report.mean_mass_scaled =
        pairwise_sum<double>(probs.size(), [&](std::int64_t i) { return probs[i]; });
    mean = report.mean_mass_scaled * uniform_prob;
  } else {
    check_outcome_budget(lattice_total, "anti-concentration shift lattice");
    Rng rng(seed);
    std::vector<std::int64_t> picks(static_cast<std::size_t>(trials));
    for (auto& pick : picks)
      pick = static_cast<std::int64_t>(
          rng.uniform_index(static_cast<std::uint64_t>(lattice_total)));
    probs.resize(trials);
    Eigen::VectorXd s(c.n_modes);
    for (std::int64_t t = 0; t < trials; ++t) {
      lattice.decode(picks[static_cast<std::size_t>(t)], s.data());
      probs[t] = std::norm(squeezed_amplitude_grid(c, s, g).value);
    }
    report.trials = trials;
    mean = pairwise_sum<double>(trials, [&](std::int64_t i) { return probs[i]; }) /
           static_cast<double>(trials);
    report.mean_mass_scaled = mean / uniform_prob;
  }

  const std::int64_t count = report.trials;
  report.second_moment =
      pairwise_sum<double>(count, [&](std::int64_t i) { return probs[i] * probs[i]; }) /
      static_cast<double>(count);
  report.ratio =
      report.second_moment > 0.0 ? mean * mean / report.second_moment : 0.0;
  report.pz_floor = (1.0 - alpha) * (1.0 - alpha) * report.ratio;

  const double mean_threshold = alpha * mean;
  const double uniform_threshold = alpha * uniform_prob;
  std::int64_t above_mean = 0;
  std::int64_t above_uniform = 0;
  for (std::int64_t i = 0; i < count; ++i) {
    if (probs[i] >= mean_threshold) ++above_mean;
    if (probs[i] >= uniform_threshold) ++above_uniform;
  }
  report.frac_above_mean = static_cast<double>(above_mean) / static_cast<double>(count);
  report.frac_above_uniform =
      static_cast<double>(above_uniform) / static_cast<double>(count);
  return report;
}

MarkovReport markov_check(const OutcomeDistribution& exact,
                          const OutcomeDistribution& approx, double eps, double delta) {
  if (!(eps > 0.0) || !std::isfinite(eps))
    throw ValidationError("markov check needs a positive finite eps");
  if (!(delta > 0.0) || !(delta < 1.0)) throw ValidationError("delta must lie in (0, 1)");

  MarkovReport report;
  report.eps = eps;
  report.delta = delta;
  report.l1 = l1_distance(exact, approx);
  if (report.l1 > eps)
    throw ValidationError("distributions are farther apart than eps in l1");

  const std::int64_t total = exact.grid.total();
  report.threshold = eps / (delta * static_cast<double>(total));
  std::int64_t above = 0;
  for (std::int64_t i = 0; i < total; ++i)
    if (std::abs(exact.probs[i] - approx.probs[i]) >= report.threshold) ++above;
  report.fraction = static_cast<double>(above) / static_cast<double>(total);
  report.holds = report.fraction <= delta;
  // Given l1 <= eps this is Markov's inequality under the uniform outcome
  // measure; a violation means the arithmetic itself went wrong.
  if (!report.holds)
    throw NumericalError("heavy-outcome fraction exceeded delta despite the l1 bound");
  return report;
}

}  // namespace cviqp
