#pragma once

// Outcome-amplitude quadratures. The target object is the oscillatory
// integral A_f(s) = (2 pi)^-n Integral exp(i f(q) - i s.q) dq^n and its
// finitely squeezed counterpart with Gaussian envelope exp(-|q|^2/(2 sigma^2))
// and prefactor (delta_p / (pi^(3/2) sigma))^(n/2). Error accounting splits
// into eps_a (domain truncation), eps_b (discretization, estimated by one
// grid refinement on demand), eps_c (phase binning, guaranteed bound).

#include <complex>
#include <cstdint>
#include <utility>
#include <vector>

#include "cviqp/circuit.hpp"

namespace cviqp {

struct AmplitudeEstimate {
  std::complex<double> value{0.0, 0.0};
  const char* method = "";
  double eps_a = 0.0;
  double eps_b = 0.0;
  double eps_c = 0.0;
  double mc_stderr = 0.0;
  // True when eps_a is the unbounded-domain heuristic rather than a bound.
  bool eps_a_heuristic = false;
};

struct PhaseBinReport {
  std::int64_t bins = 0;
  std::vector<std::int64_t> counts;
  double angle(std::int64_t b) const;  // lower bin edge 2 pi b / N
};

struct QuadratureOptions {
  // Fill eps_b by recomputing on the half-spacing grid (doubles the work;
  // the refined grid must also fit the budget).
  bool richardson = false;
};

// Left-endpoint Riemann sum of the ideal-circuit amplitude over the grid.
AmplitudeEstimate riemann_amplitude(const PhaseFunction& f, const Eigen::VectorXd& s,
                                    const GridSpec& g, const QuadratureOptions& opts = {});

// Riemann sum with phases rounded down onto N = 2^l bin edges; the report
// carries the per-bin occupation counts (they sum to the grid size).
std::pair<AmplitudeEstimate, PhaseBinReport> binned_amplitude(
    const PhaseFunction& f, const Eigen::VectorXd& s, const GridSpec& g, int l,
    const QuadratureOptions& opts = {});

// Finitely squeezed amplitude by grid quadrature; eps_a is the exact
// Gaussian mass outside [-L, L]^n times the envelope normalization.
AmplitudeEstimate squeezed_amplitude_grid(const CircuitSpec& c, const Eigen::VectorXd& s,
                                          const GridSpec& g,
                                          const QuadratureOptions& opts = {});

// Monte Carlo form of the same quantity with q ~ N(0, sigma^2 I):
// value = prefactor * (sqrt(2 pi) sigma)^n * mean[exp(i f_s(q))], and
// mc_stderr combines the real/imaginary sample errors in quadrature.
AmplitudeEstimate squeezed_amplitude_mc(const CircuitSpec& c, const Eigen::VectorXd& s,
                                        std::int64_t samples, std::uint64_t seed);

// Closed form for degree <= 2 phases via the complex Gaussian integral
// Integral exp(-q^T A q / 2 + b.q) dq = (2 pi)^(n/2) det(A)^(-1/2)
// exp(b^T A^-1 b / 2) with A = I/sigma^2 - 2 i M, b = i (lin - s).
std::complex<double> gaussian_closed_form(const Polynomial& p, const Eigen::VectorXd& s,
                                          double sigma, double delta_p);

// Single-mode homodyne-window probability without the sinc approximation:
// a 2-D quadrature of the exact kernel sinc[delta_p (q - q')]. The result
// is real; a residual imaginary part above 1e-10 raises NumericalError.
double exact_probability_sinc_1d(const CircuitSpec& c, double s);
double exact_probability_sinc_1d(const CircuitSpec& c, double s, const GridSpec& g);

// Radius at which the gradient-magnitude bound of p reaches 2 pi: the root
// of sum over terms of |coeff| * degree * r^(degree-1) = 2 pi. Needs
// degree >= 2; decreasing under coordinate rescaling with T > 1.
double oscillation_scale(const Polynomial& p);

}  // namespace cviqp
