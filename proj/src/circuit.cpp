#include "cviqp/circuit.hpp"

#include <cmath>
#include <limits>

#include "cviqp/errors.hpp"
#include "cviqp/integrator.hpp"

namespace cviqp {

namespace {
constexpr double kTwoPi = 6.283185307179586476925286766559;
}

PhaseFunction PhaseFunction::from_polynomial(Polynomial p) {
  if (p.n_vars() <= 0) throw ValidationError("phase polynomial needs variables");
  PhaseFunction f;
  f.shift_ = Eigen::VectorXd::Zero(p.n_vars());
  f.poly_ = std::move(p);
  return f;
}

PhaseFunction PhaseFunction::from_table(TabulatedPhase t) {
  if (t.m_bits <= 0 || t.m_bits > 62) throw ValidationError("tabulated phase needs 1..62 bits");
  if (t.phases.size() != (std::int64_t{1} << t.m_bits))
    throw ValidationError("tabulated phase table size must be 2^m");
  for (std::int64_t i = 0; i < t.phases.size(); ++i) {
    const double v = t.phases[i];
    if (!(v >= 0.0) || !(v < kTwoPi))
      throw ValidationError("tabulated phases must lie in [0, 2*pi)");
  }
  PhaseFunction f;
  f.table_ = std::move(t);
  return f;
}

const Polynomial& PhaseFunction::base_polynomial() const {
  if (!is_polynomial()) throw ValidationError("phase is tabulated, not polynomial");
  return poly_;
}

const Eigen::VectorXd& PhaseFunction::shift() const {
  if (!is_polynomial()) throw ValidationError("phase is tabulated, not polynomial");
  return shift_;
}

const TabulatedPhase& PhaseFunction::table() const {
  if (is_polynomial()) throw ValidationError("phase is polynomial, not tabulated");
  return *table_;
}

Polynomial PhaseFunction::folded(const Eigen::VectorXd& extra) const {
  if (!is_polynomial()) throw ValidationError("cannot fold a tabulated phase");
  if (extra.size() != shift_.size()) throw ValidationError("shift dimension mismatch");
  return subtract_linear(poly_, shift_ + extra);
}

Polynomial PhaseFunction::materialized() const {
  if (!is_polynomial()) throw ValidationError("cannot materialize a tabulated phase");
  return subtract_linear(poly_, shift_);
}

PhaseFunction PhaseFunction::displaced(const Eigen::VectorXd& r) const {
  if (!is_polynomial())
    throw ValidationError("displacement of a tabulated phase is not supported");
  if (r.size() != shift_.size()) throw ValidationError("displacement dimension mismatch");
  for (std::int64_t i = 0; i < r.size(); ++i)
    if (!std::isfinite(r[i])) throw ValidationError("displacement must be finite");
  PhaseFunction f = *this;
  f.shift_ += r;
  return f;
}

bool CircuitSpec::sigma_finite() const { return std::isfinite(sigma); }

bool CircuitSpec::sinc_regime_flagged() const {
  return sigma_finite() && sigma * delta_p > 0.01;
}

CircuitSpec make_circuit(int n_modes, PhaseFunction phase, double sigma, double delta_p) {
  if (n_modes <= 0) throw ValidationError("circuit needs at least one mode");
  if (phase.is_polynomial() && phase.base_polynomial().n_vars() != n_modes)
    throw ValidationError("phase polynomial variable count must equal mode count");
  if (std::isnan(sigma) || sigma <= 0.0) throw ValidationError("sigma must be positive");
  if (!(delta_p > 0.0) || !std::isfinite(delta_p))
    throw ValidationError("delta_p must be positive and finite");
  if (std::isfinite(sigma) && sigma * delta_p >= 1.0)
    throw ValidationError("sigma * delta_p must stay below 1");
  CircuitSpec c;
  c.n_modes = n_modes;
  c.phase = std::move(phase);
  c.sigma = sigma;
  c.delta_p = delta_p;
  return c;
}

CircuitSpec displace(const CircuitSpec& c, const Eigen::VectorXd& r) {
  if (r.size() != c.n_modes) throw ValidationError("displacement dimension mismatch");
  CircuitSpec out = c;
  out.phase = c.phase.displaced(r);
  return out;
}

double GridSpec::delta_q() const { return std::ldexp(2.0 * L, -k); }

std::int64_t GridSpec::axis_index(std::int64_t x, int mode) const {
  const int shiftc = k * (n_modes - 1 - mode);
  return (x >> shiftc) & (points_per_mode() - 1);
}

void GridSpec::decode(std::int64_t x, double* q) const {
  const double dq = delta_q();
  for (int mode = 0; mode < n_modes; ++mode)
    q[mode] = -L + dq * static_cast<double>(axis_index(x, mode));
}

std::int64_t GridSpec::encode(const std::int64_t* axis_indices) const {
  std::int64_t x = 0;
  for (int mode = 0; mode < n_modes; ++mode) {
    const std::int64_t i = axis_indices[mode];
    if (i < 0 || i >= points_per_mode()) throw ValidationError("axis index out of range");
    x = (x << k) | i;
  }
  return x;
}

GridSpec make_grid(int n_modes, double L, int k) {
  if (n_modes <= 0) throw ValidationError("grid needs at least one mode");
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("grid half-width must be positive");
  if (k < 1) throw ValidationError("grid needs at least 2 nodes per mode");
  if (k * n_modes > 62) throw ValidationError("grid index would overflow 62 bits");
  return GridSpec{n_modes, L, k};
}

GridSpec default_grid(const CircuitSpec& c, double target_truncation) {
  if (!(target_truncation > 0.0) || !(target_truncation < 1.0))
    throw ValidationError("target truncation must lie in (0, 1)");
  double scale = std::numeric_limits<double>::infinity();
  if (c.phase.is_polynomial() && c.phase.materialized().degree() >= 2)
    scale = oscillation_scale(c.phase.materialized());

  double raw_L;
  if (c.sigma_finite()) {
    raw_L = c.sigma * std::sqrt(2.0 * std::log(1.0 / target_truncation));
  } else if (std::isfinite(scale)) {
    // No Gaussian envelope: beyond the oscillation scale the integrand only
    // cancels against itself, so keep a factor-two margin around that radius.
    raw_L = 2.0 * scale;
  } else {
    throw ValidationError(
        "cannot choose a grid for an ideal circuit with degree <= 1 phase; "
        "supply L and k explicitly");
  }
  const double ell = std::ceil(raw_L / c.delta_p);
  const double L = ell * c.delta_p;

  const double resolution = std::min(c.sigma_finite() ? c.sigma : scale, scale) / 8.0;
  int k = 1;
  while (std::ldexp(2.0 * L, -k) > resolution && k * c.n_modes <= 62) ++k;
  if (k * c.n_modes > 62) throw ValidationError("default grid would overflow 62 index bits");
  return make_grid(c.n_modes, L, k);
}

std::int64_t OutcomeGrid::total() const {
  std::int64_t t = 1;
  for (int mode = 0; mode < n_modes; ++mode) t *= ell;
  return t;
}

void OutcomeGrid::decode(std::int64_t index, double* s) const {
  for (int mode = n_modes - 1; mode >= 0; --mode) {
    s[mode] = outcome_value(index % ell);
    index /= ell;
  }
}

std::int64_t OutcomeGrid::encode(const std::int64_t* axis_indices) const {
  std::int64_t index = 0;
  for (int mode = 0; mode < n_modes; ++mode) {
    const std::int64_t a = axis_indices[mode];
    if (a < 0 || a >= ell) throw ValidationError("outcome index out of range");
    index = index * ell + a;
  }
  return index;
}

std::int64_t OutcomeGrid::index_of(const Eigen::VectorXd& s) const {
  if (s.size() != n_modes) throw ValidationError("outcome dimension mismatch");
  std::int64_t index = 0;
  for (int mode = 0; mode < n_modes; ++mode) {
    const double pos = (s[mode] + L) / (2.0 * delta_p);
    const double nearest = std::round(pos);
    if (std::abs(pos - nearest) > 1e-9)
      throw ValidationError("point is not on the outcome lattice");
    const auto a = static_cast<std::int64_t>(nearest);
    if (a < 0 || a >= ell) throw ValidationError("outcome lies outside the lattice");
    index = index * ell + a;
  }
  return index;
}

OutcomeGrid make_outcome_grid(int n_modes, double L, double delta_p) {
  if (n_modes <= 0) throw ValidationError("outcome grid needs at least one mode");
  if (!(L > 0.0) || !std::isfinite(L)) throw ValidationError("outcome half-width must be positive");
  if (!(delta_p > 0.0) || !std::isfinite(delta_p))
    throw ValidationError("delta_p must be positive and finite");
  const double ratio = L / delta_p;
  const double nearest = std::round(ratio);
  if (std::abs(ratio - nearest) > 1e-9 * std::max(1.0, std::abs(ratio)))
    throw ValidationError("L must be an integer multiple of delta_p");
  const auto ell = static_cast<std::int64_t>(nearest);
  if (ell < 1) throw ValidationError("outcome lattice needs at least one value per mode");
  double total = 1.0;
  for (int mode = 0; mode < n_modes; ++mode) total *= static_cast<double>(ell);
  if (total > 9e18) throw ValidationError("outcome lattice would overflow 63-bit indices");
  return OutcomeGrid{n_modes, L, delta_p, ell};
}

}  // namespace cviqp
