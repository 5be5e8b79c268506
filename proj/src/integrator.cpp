#include "cviqp/integrator.hpp"

#include <Eigen/Eigenvalues>
#include <array>
#include <cmath>

#include "cviqp/errors.hpp"
#include "cviqp/reduce.hpp"
#include "cviqp/rng.hpp"

namespace cviqp {

namespace {

constexpr double kTwoPi = 6.283185307179586476925286766559;
constexpr double kPi = 3.1415926535897932384626433832795;

// Flat evaluator for the hot per-grid-point loops: nonzero (variable,
// exponent) pairs per term, exponents unrolled up to cubic.
struct CompiledPoly {
  struct Factor {
    int var;
    int exponent;
  };
  struct CTerm {
    double coeff;
    int n_factors;
    std::array<Factor, 8> factors;
  };
  std::vector<CTerm> cterms;

  static CompiledPoly from(const Polynomial& p) {
    CompiledPoly out;
    out.cterms.reserve(p.terms().size());
    for (const auto& [exponents, coeff] : p.terms()) {
      CTerm t{coeff, 0, {}};
      for (int v = 0; v < p.n_vars(); ++v) {
        const int e = exponents[static_cast<std::size_t>(v)];
        if (e == 0) continue;
        if (t.n_factors == 8) throw ValidationError("too many variables in one term");
        t.factors[static_cast<std::size_t>(t.n_factors++)] = Factor{v, e};
      }
      out.cterms.push_back(t);
    }
    return out;
  }

  double operator()(const double* q) const {
    double acc = 0.0;
    for (const CTerm& t : cterms) {
      double term = t.coeff;
      for (int j = 0; j < t.n_factors; ++j) {
        const double x = q[t.factors[static_cast<std::size_t>(j)].var];
        switch (t.factors[static_cast<std::size_t>(j)].exponent) {
          case 1: term *= x; break;
          case 2: term *= x * x; break;
          case 3: term *= x * x * x; break;
          default: term *= std::pow(x, t.factors[static_cast<std::size_t>(j)].exponent);
        }
      }
      acc += term;
    }
    return acc;
  }
};

void check_dimensions(const PhaseFunction& f, const Eigen::VectorXd& s, const GridSpec& g) {
  if (s.size() != g.n_modes) throw ValidationError("outcome dimension does not match grid");
  if (f.is_polynomial()) {
    if (f.base_polynomial().n_vars() != g.n_modes)
      throw ValidationError("phase variable count does not match grid");
  } else if (f.table().m_bits != g.m_bits()) {
    throw ValidationError("tabulated phase size does not match grid");
  }
}

// Phase evaluation over grid points with the outcome folded in. For the
// polynomial variant the fold happens once, in coefficient space; tabulated
// phases subtract s.q per point.
struct PhaseOnGrid {
  const GridSpec& g;
  bool tabulated;
  CompiledPoly poly;
  const double* table = nullptr;
  Eigen::VectorXd s;
  std::vector<double> axis;

  PhaseOnGrid(const PhaseFunction& f, const Eigen::VectorXd& s_in, const GridSpec& g_in)
      : g(g_in), tabulated(!f.is_polynomial()), s(s_in) {
    if (tabulated) {
      table = f.table().phases.data();
    } else {
      poly = CompiledPoly::from(f.folded(s_in));
    }
    axis.resize(static_cast<std::size_t>(g.points_per_mode()));
    for (std::int64_t i = 0; i < g.points_per_mode(); ++i)
      axis[static_cast<std::size_t>(i)] = g.axis_value(i);
  }

  void point(std::int64_t x, double* q) const {
    const std::int64_t mask = g.points_per_mode() - 1;
    for (int mode = g.n_modes - 1; mode >= 0; --mode) {
      q[mode] = axis[static_cast<std::size_t>(x & mask)];
      x >>= g.k;
    }
  }

  double operator()(std::int64_t x, const double* q) const {
    if (!tabulated) return poly(q);
    double dot = 0.0;
    for (int mode = 0; mode < g.n_modes; ++mode) dot += s[mode] * q[mode];
    return table[x] - dot;
  }
};

// (delta_q / 2 pi)^n; exact powers of two survive exactly.
double riemann_scale(const GridSpec& g) {
  double scale = 1.0;
  const double per_mode = g.delta_q() / kTwoPi;
  for (int mode = 0; mode < g.n_modes; ++mode) scale *= per_mode;
  return scale;
}

// Truncation heuristic for the envelope-free integral: the un-cancelled
// remainder of an oscillatory tail scales like one boundary layer of cells.
double boundary_layer_heuristic(const GridSpec& g) {
  const double per_mode = static_cast<double>(g.points_per_mode());
  double all_cells = 1.0, interior = 1.0;
  for (int mode = 0; mode < g.n_modes; ++mode) {
    all_cells *= per_mode;
    interior *= std::max(0.0, per_mode - 2.0);
  }
  return riemann_scale(g) * (all_cells - interior);
}

std::complex<double> grid_phase_sum(const PhaseOnGrid& phase) {
  return pairwise_sum<std::complex<double>>(phase.g.total_points(), [&](std::int64_t x) {
    double q[8];
    phase.point(x, q);
    const double value = phase(x, q);
    return std::complex<double>(std::cos(value), std::sin(value));
  });
}

AmplitudeEstimate riemann_amplitude_impl(const PhaseFunction& f, const Eigen::VectorXd& s,
                                         const GridSpec& g) {
  check_dimensions(f, s, g);
  check_grid_budget(g.total_points(), "riemann_amplitude");
  if (g.n_modes > 8) throw ValidationError("more than 8 modes is not supported");
  AmplitudeEstimate est;
  est.method = "riemann";
  PhaseOnGrid phase(f, s, g);
  est.value = riemann_scale(g) * grid_phase_sum(phase);
  est.eps_a = boundary_layer_heuristic(g);
  est.eps_a_heuristic = true;
  return est;
}

double gauss_outside_mass(int n, double sigma, double L) {
  const double inside = std::erf(L / (std::sqrt(2.0) * sigma));
  double product = 1.0;
  for (int mode = 0; mode < n; ++mode) product *= inside;
  return 1.0 - product;
}

double envelope_prefactor(int n, double sigma, double delta_p) {
  return std::pow(delta_p / (kPi * std::sqrt(kPi) * sigma), 0.5 * static_cast<double>(n));
}

double envelope_norm(int n, double sigma) {
  return std::pow(std::sqrt(kTwoPi) * sigma, static_cast<double>(n));
}

AmplitudeEstimate squeezed_grid_impl(const CircuitSpec& c, const Eigen::VectorXd& s,
                                     const GridSpec& g) {
  if (!c.sigma_finite()) throw ValidationError("squeezed quadrature needs finite sigma");
  if (g.n_modes != c.n_modes) throw ValidationError("grid mode count does not match circuit");
  check_dimensions(c.phase, s, g);
  check_grid_budget(g.total_points(), "squeezed_amplitude_grid");
  if (g.n_modes > 8) throw ValidationError("more than 8 modes is not supported");

  PhaseOnGrid phase(c.phase, s, g);
  std::vector<double> gauss(static_cast<std::size_t>(g.points_per_mode()));
  const double inv_two_sigma_sq = 1.0 / (2.0 * c.sigma * c.sigma);
  for (std::int64_t i = 0; i < g.points_per_mode(); ++i) {
    const double x = g.axis_value(i);
    gauss[static_cast<std::size_t>(i)] = std::exp(-x * x * inv_two_sigma_sq);
  }

  const std::int64_t mask = g.points_per_mode() - 1;
  const auto sum = pairwise_sum<std::complex<double>>(g.total_points(), [&](std::int64_t x) {
    double q[8];
    phase.point(x, q);
    double weight = 1.0;
    std::int64_t rest = x;
    for (int mode = g.n_modes - 1; mode >= 0; --mode) {
      weight *= gauss[static_cast<std::size_t>(rest & mask)];
      rest >>= g.k;
    }
    const double value = phase(x, q);
    return std::complex<double>(weight * std::cos(value), weight * std::sin(value));
  });

  double cell = 1.0;
  for (int mode = 0; mode < g.n_modes; ++mode) cell *= g.delta_q();
  const double prefactor = envelope_prefactor(c.n_modes, c.sigma, c.delta_p);

  AmplitudeEstimate est;
  est.method = "squeezed_grid";
  est.value = prefactor * cell * sum;
  est.eps_a = prefactor * envelope_norm(c.n_modes, c.sigma) *
              gauss_outside_mass(c.n_modes, c.sigma, g.L);
  return est;
}

GridSpec refined(const GridSpec& g) {
  if ((g.k + 1) * g.n_modes > 62)
    throw ValidationError("refined grid would overflow 62 index bits");
  return make_grid(g.n_modes, g.L, g.k + 1);
}

}  // namespace

double PhaseBinReport::angle(std::int64_t b) const {
  return kTwoPi * static_cast<double>(b) / static_cast<double>(bins);
}

AmplitudeEstimate riemann_amplitude(const PhaseFunction& f, const Eigen::VectorXd& s,
                                    const GridSpec& g, const QuadratureOptions& opts) {
  AmplitudeEstimate est = riemann_amplitude_impl(f, s, g);
  if (opts.richardson) {
    const GridSpec fine = refined(g);
    check_grid_budget(fine.total_points(), "riemann_amplitude refinement");
    est.eps_b = std::abs(est.value - riemann_amplitude_impl(f, s, fine).value);
  }
  return est;
}

std::pair<AmplitudeEstimate, PhaseBinReport> binned_amplitude(
    const PhaseFunction& f, const Eigen::VectorXd& s, const GridSpec& g, int l,
    const QuadratureOptions& opts) {
  if (l < 1 || l > 30) throw ValidationError("bin exponent l must lie in 1..30");
  check_dimensions(f, s, g);
  check_grid_budget(g.total_points(), "binned_amplitude");
  if (g.n_modes > 8) throw ValidationError("more than 8 modes is not supported");
  const std::int64_t bins = std::int64_t{1} << l;

  PhaseOnGrid phase(f, s, g);
  const std::int64_t total = g.total_points();
  const std::int64_t block = detail::kReduceBlock;
  const std::int64_t blocks = (total + block - 1) / block;
  std::vector<std::vector<std::int64_t>> local(static_cast<std::size_t>(blocks));
  parallel_for(blocks, [&](std::int64_t b) {
    auto& counts = local[static_cast<std::size_t>(b)];
    counts.assign(static_cast<std::size_t>(bins), 0);
    const std::int64_t lo = b * block;
    const std::int64_t hi = std::min(total, lo + block);
    double q[8];
    for (std::int64_t x = lo; x < hi; ++x) {
      phase.point(x, q);
      double value = std::fmod(phase(x, q), kTwoPi);
      if (value < 0.0) value += kTwoPi;
      if (value >= kTwoPi) value = 0.0;  // guard the wrap rounding up
      auto bin = static_cast<std::int64_t>(std::floor(value / kTwoPi * static_cast<double>(bins)));
      if (bin >= bins) bin = bins - 1;
      ++counts[static_cast<std::size_t>(bin)];
    }
  });

  PhaseBinReport report;
  report.bins = bins;
  report.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& counts : local)
    for (std::int64_t b = 0; b < bins; ++b)
      report.counts[static_cast<std::size_t>(b)] += counts[static_cast<std::size_t>(b)];

  std::int64_t occupied = 0;
  for (std::int64_t count : report.counts) occupied += count;
  if (occupied != total) throw NumericalError("phase bin counts do not sum to the grid size");

  const auto sum = pairwise_sum_serial<std::complex<double>>(bins, [&](std::int64_t b) {
    const double angle = report.angle(b);
    const double weight = static_cast<double>(report.counts[static_cast<std::size_t>(b)]);
    return std::complex<double>(weight * std::cos(angle), weight * std::sin(angle));
  });

  AmplitudeEstimate est;
  est.method = "binned";
  est.value = riemann_scale(g) * sum;
  est.eps_a = boundary_layer_heuristic(g);
  est.eps_a_heuristic = true;
  est.eps_c = riemann_scale(g) * static_cast<double>(total) * (kTwoPi / static_cast<double>(bins));
  if (opts.richardson) {
    const GridSpec fine = refined(g);
    check_grid_budget(fine.total_points(), "binned_amplitude refinement");
    QuadratureOptions plain;
    est.eps_b = std::abs(est.value - binned_amplitude(f, s, fine, l, plain).first.value);
  }
  return {est, report};
}

AmplitudeEstimate squeezed_amplitude_grid(const CircuitSpec& c, const Eigen::VectorXd& s,
                                          const GridSpec& g, const QuadratureOptions& opts) {
  AmplitudeEstimate est = squeezed_grid_impl(c, s, g);
  if (opts.richardson) {
    const GridSpec fine = refined(g);
    check_grid_budget(fine.total_points(), "squeezed_amplitude_grid refinement");
    est.eps_b = std::abs(est.value - squeezed_grid_impl(c, s, fine).value);
  }
  return est;
}

AmplitudeEstimate squeezed_amplitude_mc(const CircuitSpec& c, const Eigen::VectorXd& s,
                                        std::int64_t samples, std::uint64_t seed) {
  if (!c.sigma_finite()) throw ValidationError("Monte Carlo needs finite sigma");
  if (!c.phase.is_polynomial())
    throw ValidationError("Monte Carlo needs a polynomial phase (off-lattice points)");
  if (s.size() != c.n_modes) throw ValidationError("outcome dimension does not match circuit");
  if (samples < 2) throw ValidationError("Monte Carlo needs at least 2 samples");
  check_grid_budget(samples, "squeezed_amplitude_mc");
  if (c.n_modes > 8) throw ValidationError("more than 8 modes is not supported");

  const int n = c.n_modes;
  const CompiledPoly poly = CompiledPoly::from(c.phase.folded(s));

  // Draw sequentially so the sample stream is a pure function of the seed,
  // then evaluate with the fixed-shape reduction.
  std::vector<double> points(static_cast<std::size_t>(samples * n));
  Rng rng(seed);
  for (std::int64_t t = 0; t < samples; ++t)
    for (int mode = 0; mode < n; ++mode)
      points[static_cast<std::size_t>(t * n + mode)] = c.sigma * rng.normal();

  struct Moments {
    double re = 0.0, im = 0.0, re2 = 0.0, im2 = 0.0;
    Moments operator+(const Moments& o) const {
      return Moments{re + o.re, im + o.im, re2 + o.re2, im2 + o.im2};
    }
  };
  const Moments total = pairwise_sum<Moments>(samples, [&](std::int64_t t) {
    const double value = poly(&points[static_cast<std::size_t>(t * n)]);
    const double re = std::cos(value), im = std::sin(value);
    return Moments{re, im, re * re, im * im};
  });

  const auto count = static_cast<double>(samples);
  const double mean_re = total.re / count, mean_im = total.im / count;
  const double var_re = std::max(0.0, (total.re2 - count * mean_re * mean_re) / (count - 1.0));
  const double var_im = std::max(0.0, (total.im2 - count * mean_im * mean_im) / (count - 1.0));
  const double norm = envelope_prefactor(n, c.sigma, c.delta_p) * envelope_norm(n, c.sigma);

  AmplitudeEstimate est;
  est.method = "squeezed_mc";
  est.value = norm * std::complex<double>(mean_re, mean_im);
  est.mc_stderr = norm * std::sqrt((var_re + var_im) / count);
  return est;
}

std::complex<double> gaussian_closed_form(const Polynomial& p, const Eigen::VectorXd& s,
                                          double sigma, double delta_p) {
  if (!(sigma > 0.0) || !std::isfinite(sigma))
    throw ValidationError("closed form needs finite positive sigma");
  if (!(delta_p > 0.0) || !std::isfinite(delta_p))
    throw ValidationError("delta_p must be positive and finite");
  if (s.size() != p.n_vars()) throw ValidationError("outcome dimension does not match phase");
  const int n = p.n_vars();

  double c0;
  Eigen::VectorXd lin;
  Eigen::MatrixXd M;
  quadratic_parts(p, c0, lin, M);  // throws for degree > 2

  // A = I/sigma^2 - 2 i M shares eigenvectors with M; every eigenvalue
  // 1/sigma^2 - 2 i mu stays in the right half-plane along the deformation
  // t M, t: 0 -> 1, so per-factor principal roots give the continuously
  // tracked branch of det(A)^(-1/2) even when the total phase winds.
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eigen(M);
  if (eigen.info() != Eigen::Success) throw NumericalError("eigendecomposition failed");
  const Eigen::VectorXd mu = eigen.eigenvalues();
  const Eigen::VectorXd w = eigen.eigenvectors().transpose() * (lin - s);

  const double inv_sigma_sq = 1.0 / (sigma * sigma);
  std::complex<double> det_root_inv(1.0, 0.0);
  std::complex<double> quad(0.0, 0.0);
  for (int j = 0; j < n; ++j) {
    const std::complex<double> lambda(inv_sigma_sq, -2.0 * mu[j]);
    if (std::abs(lambda) == 0.0) throw NumericalError("singular Gaussian form");
    det_root_inv /= std::sqrt(lambda);
    // b = i (lin - s): b^T A^-1 b / 2 = -(1/2) sum w_j^2 / lambda_j.
    quad -= 0.5 * w[j] * w[j] / lambda;
  }

  const double tau = 0.5 * static_cast<double>(n);
  const std::complex<double> phase0(std::cos(c0), std::sin(c0));
  return envelope_prefactor(n, sigma, delta_p) * std::pow(kTwoPi, tau) * det_root_inv *
         std::exp(quad) * phase0;
}

double exact_probability_sinc_1d(const CircuitSpec& c, double s, const GridSpec& g) {
  if (c.n_modes != 1) throw ValidationError("exact window probability is single-mode only");
  if (!c.sigma_finite()) throw ValidationError("exact window probability needs finite sigma");
  if (g.n_modes != 1) throw ValidationError("grid must be single-mode");
  Eigen::VectorXd sv(1);
  sv[0] = s;
  check_dimensions(c.phase, sv, g);
  const std::int64_t points = g.points_per_mode();
  check_grid_budget(points * points, "exact_probability_sinc_1d pair quadrature");

  PhaseOnGrid phase(c.phase, sv, g);
  const double inv_two_sigma_sq = 1.0 / (2.0 * c.sigma * c.sigma);
  std::vector<std::complex<double>> kernel(static_cast<std::size_t>(points));
  for (std::int64_t i = 0; i < points; ++i) {
    const double q = g.axis_value(i);
    const double value = phase(i, &q);
    const double weight = std::exp(-q * q * inv_two_sigma_sq);
    kernel[static_cast<std::size_t>(i)] =
        std::complex<double>(weight * std::cos(value), weight * std::sin(value));
  }
  std::vector<double> sinc(static_cast<std::size_t>(points));
  for (std::int64_t d = 0; d < points; ++d) {
    const double x = c.delta_p * (g.delta_q() * static_cast<double>(d));
    sinc[static_cast<std::size_t>(d)] = d == 0 ? 1.0 : std::sin(x) / x;
  }

  const auto sum = pairwise_sum<std::complex<double>>(points, [&](std::int64_t i) {
    const std::complex<double> ki = kernel[static_cast<std::size_t>(i)];
    return ki * pairwise_sum_serial<std::complex<double>>(points, [&](std::int64_t j) {
             return std::conj(kernel[static_cast<std::size_t>(j)]) *
                    sinc[static_cast<std::size_t>(std::abs(i - j))];
           });
  });

  const double scale =
      c.delta_p / (kPi * std::sqrt(kPi) * c.sigma) * g.delta_q() * g.delta_q();
  const std::complex<double> result = scale * sum;
  if (std::abs(result.imag()) >= 1e-10)
    throw NumericalError("window probability has a non-negligible imaginary part");
  return result.real();
}

double exact_probability_sinc_1d(const CircuitSpec& c, double s) {
  return exact_probability_sinc_1d(c, s, default_grid(c, 1e-8));
}

double oscillation_scale(const Polynomial& p) {
  if (p.degree() < 2) throw ValidationError("oscillation scale needs degree >= 2");
  struct Entry {
    double magnitude;
    int degree;
  };
  std::vector<Entry> entries;
  for (const auto& [exponents, coeff] : p.terms()) {
    int total = 0;
    for (int e : exponents) total += e;
    if (total >= 1) entries.push_back({std::abs(coeff), total});
  }
  auto gradient_bound = [&entries](double r) {
    double acc = 0.0;
    for (const Entry& entry : entries)
      acc += entry.magnitude * static_cast<double>(entry.degree) *
             std::pow(r, entry.degree - 1);
    return acc;
  };
  if (gradient_bound(0.0) >= kTwoPi) return 0.0;
  double hi = 1.0;
  while (gradient_bound(hi) < kTwoPi) {
    hi *= 2.0;
    if (hi > 1e12) throw NumericalError("oscillation scale bracket failed");
  }
  double lo = 0.0;
  for (int iter = 0; iter < 200; ++iter) {
    const double mid = 0.5 * (lo + hi);
    if (gradient_bound(mid) < kTwoPi) lo = mid;
    else hi = mid;
  }
  return 0.5 * (lo + hi);
}

}  // namespace cviqp
