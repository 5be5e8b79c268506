#pragma once

// Sparse real polynomials over a fixed set of variables, stored as a map
// from dense exponent vectors to coefficients. The term map is canonical:
// coefficients with magnitude below kCoeffEpsilon are dropped, so equality
// of term maps is meaningful. Variable counts stay small (n <= 8 or so),
// which keeps dense exponent keys cheap.

#include <Eigen/Dense>
#include <cstdint>
#include <map>
#include <vector>

namespace cviqp {

inline constexpr double kCoeffEpsilon = 1e-15;

class Polynomial {
 public:
  using ExponentKey = std::vector<int>;
  using TermMap = std::map<ExponentKey, double>;

  Polynomial() = default;
  explicit Polynomial(int n_vars);

  int n_vars() const { return n_vars_; }
  const TermMap& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }

  // Accumulates coeff onto the monomial with the given exponents; entries
  // that land below kCoeffEpsilon are erased.
  void add_term(const ExponentKey& exponents, double coeff);

  // Overwrites the monomial's coefficient (dropped if below kCoeffEpsilon).
  void set_term(const ExponentKey& exponents, double coeff);

  double coefficient(const ExponentKey& exponents) const;

  // Max total degree over stored terms; 0 for the zero polynomial.
  int degree() const;

  bool operator==(const Polynomial& other) const = default;

 private:
  int n_vars_ = 0;
  TermMap terms_;
};

// Position-diagonal gate: Z(strength) applies strength * q_a, CZ(strength)
// applies strength * q_a * q_b, CubicPhase(strength) applies strength * q_a^3.
struct Gate {
  enum class Kind { Z, CZ, CubicPhase };
  Kind kind = Kind::Z;
  int mode_a = 0;
  int mode_b = 0;  // used by CZ only
  double strength = 0.0;
};

double eval(const Polynomial& p, const Eigen::VectorXd& q);
double eval(const Polynomial& p, const double* q, int n);

// p(q) - s . q as a new polynomial.
Polynomial subtract_linear(const Polynomial& p, const Eigen::VectorXd& s);

// Coordinate rescaling q -> T q: each coefficient is multiplied by
// T^(term degree), so eval(rescale(p, T), q) == eval(p, T * q).
Polynomial rescale(const Polynomial& p, double T);

// Accumulates the phase polynomial of a gate sequence on n modes.
Polynomial from_gates(int n, const std::vector<Gate>& gates);

// Random member of the gate-realizable degree-3 family: one coefficient
// uniform in [-coeff_range, coeff_range] for every monomial q_k, q_j q_k
// (j < k), q_k^3, drawn in that fixed order from the seed.
Polynomial random_degree3(int n, double coeff_range, std::uint64_t seed);

// Splits a degree <= 2 polynomial into constant, linear and symmetric
// quadratic parts: p(q) = c0 + lin . q + q^T M q. Throws on higher degree.
void quadratic_parts(const Polynomial& p, double& c0, Eigen::VectorXd& lin,
                     Eigen::MatrixXd& M);

}  // namespace cviqp
