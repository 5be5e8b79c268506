#include "cviqp/polynomial.hpp"

#include <cmath>
#include <cstdlib>

#include "cviqp/errors.hpp"
#include "cviqp/rng.hpp"

namespace cviqp {

Polynomial::Polynomial(int n_vars) : n_vars_(n_vars) {
  if (n_vars <= 0) throw ValidationError("polynomial needs at least one variable");
}

namespace {

void check_key(const Polynomial::ExponentKey& exponents, int n_vars) {
  if (static_cast<int>(exponents.size()) != n_vars)
    throw ValidationError("exponent vector length does not match variable count");
  for (int e : exponents)
    if (e < 0) throw ValidationError("negative exponent");
}

}  // namespace

void Polynomial::add_term(const ExponentKey& exponents, double coeff) {
  check_key(exponents, n_vars_);
  auto it = terms_.find(exponents);
  const double updated = (it == terms_.end() ? 0.0 : it->second) + coeff;
  if (std::abs(updated) < kCoeffEpsilon) {
    if (it != terms_.end()) terms_.erase(it);
  } else if (it == terms_.end()) {
    terms_.emplace(exponents, updated);
  } else {
    it->second = updated;
  }
}

void Polynomial::set_term(const ExponentKey& exponents, double coeff) {
  check_key(exponents, n_vars_);
  if (std::abs(coeff) < kCoeffEpsilon) {
    terms_.erase(exponents);
  } else {
    terms_[exponents] = coeff;
  }
}

double Polynomial::coefficient(const ExponentKey& exponents) const {
  auto it = terms_.find(exponents);
  return it == terms_.end() ? 0.0 : it->second;
}

int Polynomial::degree() const {
  int deg = 0;
  for (const auto& [exponents, coeff] : terms_) {
    int total = 0;
    for (int e : exponents) total += e;
    deg = std::max(deg, total);
  }
  return deg;
}

double eval(const Polynomial& p, const double* q, int n) {
  if (n != p.n_vars()) throw ValidationError("point dimension does not match polynomial");
  double acc = 0.0;
  for (const auto& [exponents, coeff] : p.terms()) {
    double term = coeff;
    for (int v = 0; v < n; ++v) {
      const int e = exponents[static_cast<std::size_t>(v)];
      const double x = q[v];
      // Gate-realizable phases stop at cubic terms; fall back for larger e.
      switch (e) {
        case 0: break;
        case 1: term *= x; break;
        case 2: term *= x * x; break;
        case 3: term *= x * x * x; break;
        default: term *= std::pow(x, e); break;
      }
    }
    acc += term;
  }
  return acc;
}

double eval(const Polynomial& p, const Eigen::VectorXd& q) {
  return eval(p, q.data(), static_cast<int>(q.size()));
}

Polynomial subtract_linear(const Polynomial& p, const Eigen::VectorXd& s) {
  if (s.size() != p.n_vars()) throw ValidationError("shift dimension does not match polynomial");
  Polynomial out = p;
  Polynomial::ExponentKey key(static_cast<std::size_t>(p.n_vars()), 0);
  for (int v = 0; v < p.n_vars(); ++v) {
    key[static_cast<std::size_t>(v)] = 1;
    out.add_term(key, -s[v]);
    key[static_cast<std::size_t>(v)] = 0;
  }
  return out;
}

Polynomial rescale(const Polynomial& p, double T) {
  if (!std::isfinite(T)) throw ValidationError("rescale factor must be finite");
  Polynomial out(p.n_vars());
  for (const auto& [exponents, coeff] : p.terms()) {
    int total = 0;
    for (int e : exponents) total += e;
    out.set_term(exponents, coeff * std::pow(T, total));
  }
  return out;
}

Polynomial from_gates(int n, const std::vector<Gate>& gates) {
  if (n <= 0) throw ValidationError("mode count must be positive");
  Polynomial out(n);
  Polynomial::ExponentKey key(static_cast<std::size_t>(n), 0);
  auto check_mode = [n](int mode) {
    if (mode < 0 || mode >= n) throw ValidationError("gate mode out of range");
  };
  for (const Gate& gate : gates) {
    std::fill(key.begin(), key.end(), 0);
    switch (gate.kind) {
      case Gate::Kind::Z:
        check_mode(gate.mode_a);
        key[static_cast<std::size_t>(gate.mode_a)] = 1;
        break;
      case Gate::Kind::CZ:
        check_mode(gate.mode_a);
        check_mode(gate.mode_b);
        if (gate.mode_a == gate.mode_b)
          throw ValidationError("CZ gate needs two distinct modes");
        key[static_cast<std::size_t>(gate.mode_a)] = 1;
        key[static_cast<std::size_t>(gate.mode_b)] = 1;
        break;
      case Gate::Kind::CubicPhase:
        check_mode(gate.mode_a);
        key[static_cast<std::size_t>(gate.mode_a)] = 3;
        break;
    }
    out.add_term(key, gate.strength);
  }
  return out;
}

Polynomial random_degree3(int n, double coeff_range, std::uint64_t seed) {
  if (n <= 0) throw ValidationError("mode count must be positive");
  if (!(coeff_range > 0.0) || !std::isfinite(coeff_range))
    throw ValidationError("coefficient range must be positive and finite");
  Rng rng(seed);
  Polynomial out(n);
  Polynomial::ExponentKey key(static_cast<std::size_t>(n), 0);
  auto draw = [&]() { return rng.uniform(-coeff_range, coeff_range); };
  for (int k = 0; k < n; ++k) {
    std::fill(key.begin(), key.end(), 0);
    key[static_cast<std::size_t>(k)] = 1;
    out.add_term(key, draw());
  }
  for (int j = 0; j < n; ++j) {
    for (int k = j + 1; k < n; ++k) {
      std::fill(key.begin(), key.end(), 0);
      key[static_cast<std::size_t>(j)] = 1;
      key[static_cast<std::size_t>(k)] = 1;
      out.add_term(key, draw());
    }
  }
  for (int k = 0; k < n; ++k) {
    std::fill(key.begin(), key.end(), 0);
    key[static_cast<std::size_t>(k)] = 3;
    out.add_term(key, draw());
  }
  return out;
}

void quadratic_parts(const Polynomial& p, double& c0, Eigen::VectorXd& lin,
                     Eigen::MatrixXd& M) {
  const int n = p.n_vars();
  c0 = 0.0;
  lin = Eigen::VectorXd::Zero(n);
  M = Eigen::MatrixXd::Zero(n, n);
  for (const auto& [exponents, coeff] : p.terms()) {
    int total = 0;
    int first = -1, second = -1;
    for (int v = 0; v < n; ++v) {
      const int e = exponents[static_cast<std::size_t>(v)];
      total += e;
      for (int rep = 0; rep < e; ++rep) {
        if (first < 0) first = v;
        else if (second < 0) second = v;
      }
    }
    if (total > 2) throw ValidationError("polynomial degree exceeds 2");
    if (total == 0) {
      c0 += coeff;
    } else if (total == 1) {
      lin[first] += coeff;
    } else if (first == second) {
      M(first, first) += coeff;
    } else {
      // Cross term split symmetrically: q^T M q reproduces coeff * q_a q_b.
      M(first, second) += 0.5 * coeff;
      M(second, first) += 0.5 * coeff;
    }
  }
}

}  // namespace cviqp
