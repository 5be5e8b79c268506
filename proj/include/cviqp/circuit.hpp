#pragma once

// Circuit description and grid geometry. A phase function is either a
// polynomial with an accumulated linear shift (displacements fold into the
// shift vector and are subtracted once at evaluation time, which keeps
// displacement composition and outcome relabeling exact at the float level)
// or a table of phases over the m-bit position strings of a grid.

#include <Eigen/Dense>
#include <cstdint>
#include <optional>

#include "cviqp/polynomial.hpp"

namespace cviqp {

struct TabulatedPhase {
  int m_bits = 0;
  Eigen::VectorXd phases;  // size 2^m, each value in [0, 2*pi)
};

class PhaseFunction {
 public:
  // Empty placeholder (a zero-variable polynomial); factories below build
  // usable instances.
  PhaseFunction() = default;

  static PhaseFunction from_polynomial(Polynomial p);
  static PhaseFunction from_table(TabulatedPhase t);

  bool is_polynomial() const { return table_ == std::nullopt; }
  const Polynomial& base_polynomial() const;
  const Eigen::VectorXd& shift() const;
  const TabulatedPhase& table() const;

  // base(q) - (shift + extra) . q with the shift applied in one pass.
  Polynomial folded(const Eigen::VectorXd& extra) const;
  // base(q) - shift . q as a concrete polynomial.
  Polynomial materialized() const;

  // Phase with r . q subtracted; rejects tabulated phases.
  PhaseFunction displaced(const Eigen::VectorXd& r) const;

 private:
  Polynomial poly_;
  Eigen::VectorXd shift_;
  std::optional<TabulatedPhase> table_;
};

struct CircuitSpec {
  int n_modes = 0;
  PhaseFunction phase;
  double sigma = 0.0;    // squeezing width; +infinity for the ideal circuit
  double delta_p = 0.0;  // homodyne window half-width

  bool sigma_finite() const;
  // The single-window probability formula drops a sinc kernel; that is
  // controlled only when sigma * delta_p is small. Flag raised above 0.01.
  bool sinc_regime_flagged() const;
};

CircuitSpec make_circuit(int n_modes, PhaseFunction phase, double sigma, double delta_p);

// Shifts the phase by -r . q; measurement statistics of the result are the
// original ones with outcome labels shifted by r.
CircuitSpec displace(const CircuitSpec& c, const Eigen::VectorXd& r);

// Position quadrature lattice over [-L, L)^n: 2^k left-endpoint nodes per
// mode, spacing delta_q = 2L / 2^k. Global indices are mode-major with mode
// 0 occupying the most significant k bits of the m = k*n bit string.
struct GridSpec {
  int n_modes = 0;
  double L = 0.0;
  int k = 0;

  double delta_q() const;
  std::int64_t points_per_mode() const { return std::int64_t{1} << k; }
  int m_bits() const { return k * n_modes; }
  std::int64_t total_points() const { return std::int64_t{1} << m_bits(); }
  double axis_value(std::int64_t i) const { return -L + delta_q() * static_cast<double>(i); }
  std::int64_t axis_index(std::int64_t x, int mode) const;
  void decode(std::int64_t x, double* q) const;
  std::int64_t encode(const std::int64_t* axis_indices) const;
};

GridSpec make_grid(int n_modes, double L, int k);

// Picks L so the Gaussian tail mass outside [-L, L] is at most
// target_truncation (rounded up to an integer multiple of delta_p), and k so
// delta_q <= min(sigma, oscillation scale) / 8. For sigma = infinity, L
// falls back to twice the phase's oscillation scale; degree <= 1 phases have
// no scale and are rejected (supply the grid explicitly).
GridSpec default_grid(const CircuitSpec& c, double target_truncation);

// Measurement outcome lattice: per mode the ell = L / delta_p half-open
// window centers {-L, -L + 2 delta_p, ..., L - 2 delta_p}. Outcome indices
// are lattice-lexicographic, mode 0 most significant.
struct OutcomeGrid {
  int n_modes = 0;
  double L = 0.0;
  double delta_p = 0.0;
  std::int64_t ell = 0;

  std::int64_t total() const;
  double outcome_value(std::int64_t a) const {
    return -L + 2.0 * delta_p * static_cast<double>(a);
  }
  void decode(std::int64_t index, double* s) const;
  std::int64_t encode(const std::int64_t* axis_indices) const;
  // Index of a lattice-commensurate point; rejects points off the lattice.
  std::int64_t index_of(const Eigen::VectorXd& s) const;
};

OutcomeGrid make_outcome_grid(int n_modes, double L, double delta_p);

}  // namespace cviqp
