#pragma once

// Reductions between amplitudes and counting, and the statistical checks
// that make approximation-hardness arguments concrete at desk scale:
// tabulated phases whose amplitude is a weighted sum of Boolean-oracle
// popcounts, fooling functions invisible to fixed-node quadrature rules,
// anti-concentration statistics under uniform outcome shifts, and the
// Markov fraction test for l1-close distributions.

#include <cmath>
#include <complex>
#include <cstdint>
#include <functional>
#include <vector>

#include "cviqp/circuit.hpp"
#include "cviqp/sampler.hpp"

namespace cviqp {

struct BooleanOracle {
  int arity = 0;
  std::vector<std::uint8_t> table;  // 2^arity entries of 0/1

  std::int64_t popcount() const;
};

void validate_oracles(const std::vector<BooleanOracle>& oracles);

// Tabulated phase on g with N = 2^l oracles of arity m - l: string x = (b, y)
// with b the leading l bits gets phase 2 pi (b + 1/2) / N when the b-th
// oracle accepts y, and phase 0 otherwise.
PhaseFunction build_sharp_p_phase(const std::vector<BooleanOracle>& oracles,
                                  const GridSpec& g);

struct SharpPSumCheck {
  std::complex<double> reconstructed;  // from the N popcounts alone
  std::complex<double> direct;         // brute-force sum over all 2^m strings
  double abs_gap = 0.0;
};

// The zero-outcome amplitude of the constructed phase, once from oracle
// popcounts (N + 1 terms) and once by full enumeration.
SharpPSumCheck verify_sharp_p_sum(const std::vector<BooleanOracle>& oracles,
                                  const GridSpec& g);

struct ArccosEmbedding {
  PhaseFunction phase;
  std::int64_t clamped = 0;  // grid points where |phi/c| exceeded 1
};

// Phase arccos(phi(q)/c) tabulated on g; the real part of its zero-outcome
// amplitude is the grid quadrature of phi/c up to the usual scale factor.
ArccosEmbedding arccos_embed(const std::function<double(const Eigen::VectorXd&)>& phi,
                             double c, const GridSpec& g);

struct FoolingInstance {
  Eigen::MatrixXd nodes;  // one node per row
  double delta = 0.0;

  int n() const { return static_cast<int>(nodes.cols()); }
  std::int64_t count() const { return nodes.rows(); }
  double ball_radius() const { return delta * std::sqrt(static_cast<double>(n())); }
};

FoolingInstance make_fooling_instance(Eigen::MatrixXd nodes, double delta);

// Distance-ramp bump: 0 on the radius-(delta sqrt n) balls around the nodes,
// 1 once an extra delta sqrt n away, linear in between; 1 everywhere when
// there are no nodes. 1/(delta sqrt n)-Lipschitz.
double fooling_eval(const FoolingInstance& inst, const Eigen::VectorXd& q);

struct FoolingDemoReport {
  double rule_plus = 0.0;   // equal-weight node rule applied to +phi * g
  double rule_minus = 0.0;  // the same rule applied to -phi * g
  bool rule_outputs_identical = false;
  double integral_phi_g = 0.0;      // fine-grid integral of phi * envelope
  double error_lower_bound = 0.0;   // any rule on these nodes errs by >= this
  std::int64_t nodes = 0;
  double delta = 0.0;
  double sigma = 0.0;
};

FoolingDemoReport fooling_demo(const FoolingInstance& inst, double sigma, const GridSpec& g);

// (sigma / (delta sqrt e))^n - (eps - 2 eps_b): how many nodes a rule needs
// before it can tell +phi from -phi at this accuracy.
double fooling_node_bound(int n, double sigma, double delta, double eps, double eps_b);
// The bound grows exponentially with n only while delta < sigma / sqrt(e).
bool fooling_bound_exponential(double sigma, double delta);

struct AntiConcentrationReport {
  std::int64_t trials = 0;
  bool exhaustive = false;
  double mean_mass_scaled = 0.0;   // empirical E[|A(0)|^2] * ell^n
  double second_moment = 0.0;      // empirical E[|A(0)|^4]
  double ratio = 0.0;              // E[|A|^2]^2 / E[|A|^4]
  double pz_floor = 0.0;           // (1 - alpha)^2 * ratio
  double frac_above_mean = 0.0;    // fraction with P >= alpha * empirical mean
  double frac_above_uniform = 0.0; // fraction with P >= alpha * ell^-n
  double alpha = 0.0;
  double l_condition_value = 0.0;  // sqrt(delta_p * L) / pi
  bool l_condition_ok = false;     // within the 1/n slack of 1
};

// Statistics of P(r) = |amplitude at outcome r|^2 over uniform lattice
// shifts r (outcome relabeling makes P(r) the zero-outcome probability of
// the r-displaced circuit). trials = 0 enumerates the lattice exhaustively.
AntiConcentrationReport anticoncentration_report(const CircuitSpec& c, const GridSpec& g,
                                                 double alpha, std::int64_t trials,
                                                 std::uint64_t seed);

struct MarkovReport {
  double l1 = 0.0;
  double eps = 0.0;
  double delta = 0.0;
  double threshold = 0.0;  // eps / (delta * ell^n)
  double fraction = 0.0;   // outcomes with per-outcome gap >= threshold
  bool holds = false;      // fraction <= delta (a theorem given l1 <= eps)
};

MarkovReport markov_check(const OutcomeDistribution& exact,
                          const OutcomeDistribution& approx, double eps, double delta);

}  // namespace cviqp
