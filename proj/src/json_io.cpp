#include "cviqp/json_io.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <utility>

#include "cviqp/errors.hpp"

namespace cviqp {

namespace {

const Json& require_field(const Json& j, const char* key) {
  if (!j.is_object()) throw ValidationError("expected a JSON object");
  const auto it = j.find(key);
  if (it == j.end())
    throw ValidationError(std::string("missing field \"") + key + "\"");
  return *it;
}

double as_number(const Json& j, const char* what) {
  if (!j.is_number())
    throw ValidationError(std::string(what) + " must be a number");
  return j.get<double>();
}

int as_int(const Json& j, const char* what) {
  if (!j.is_number_integer())
    throw ValidationError(std::string(what) + " must be an integer");
  return j.get<int>();
}

double sigma_from_json(const Json& j) {
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf" || s == "infinity")
      return std::numeric_limits<double>::infinity();
    throw ValidationError("sigma must be a number or \"inf\"");
  }
  return as_number(j, "sigma");
}

Json sigma_json(double sigma) {
  if (std::isinf(sigma)) return Json("inf");
  return Json(sigma);
}

Json complex_json(const std::complex<double>& z) {
  return Json{{"re", z.real()}, {"im", z.imag()}};
}

}  // namespace

Json polynomial_json(const Polynomial& p) {
  Json terms = Json::array();
  for (const auto& [exponents, coeff] : p.terms())
    terms.push_back(Json{{"exp", exponents}, {"coeff", coeff}});
  return Json{{"n", p.n_vars()}, {"terms", std::move(terms)}};
}

Polynomial polynomial_from_json(const Json& j) {
  const int n = as_int(require_field(j, "n"), "polynomial field \"n\"");
  if (n < 1) throw ValidationError("polynomial needs at least one variable");
  const Json& terms = require_field(j, "terms");
  if (!terms.is_array()) throw ValidationError("polynomial \"terms\" must be an array");
  Polynomial p(n);
  for (const Json& term : terms) {
    const Json& exp = require_field(term, "exp");
    if (!exp.is_array() || static_cast<int>(exp.size()) != n)
      throw ValidationError("term \"exp\" must list one exponent per variable");
    Polynomial::ExponentKey key(static_cast<std::size_t>(n));
    for (int v = 0; v < n; ++v) {
      key[static_cast<std::size_t>(v)] = as_int(exp[static_cast<std::size_t>(v)], "exponent");
      if (key[static_cast<std::size_t>(v)] < 0)
        throw ValidationError("exponents must be nonnegative");
    }
    p.add_term(key, as_number(require_field(term, "coeff"), "term \"coeff\""));
  }
  return p;
}

std::vector<Gate> gates_from_json(const Json& j) {
  if (!j.is_array()) throw ValidationError("\"gates\" must be an array");
  std::vector<Gate> gates;
  gates.reserve(j.size());
  for (const Json& gj : j) {
    const Json& kind = require_field(gj, "kind");
    if (!kind.is_string()) throw ValidationError("gate \"kind\" must be a string");
    const auto name = kind.get<std::string>();
    const Json& modes = require_field(gj, "modes");
    if (!modes.is_array()) throw ValidationError("gate \"modes\" must be an array");
    Gate gate;
    gate.strength = as_number(require_field(gj, "strength"), "gate \"strength\"");
    if (name == "Z") {
      gate.kind = Gate::Kind::Z;
      if (modes.size() != 1) throw ValidationError("Z gate takes one mode");
      gate.mode_a = as_int(modes[0], "gate mode");
    } else if (name == "CZ") {
      gate.kind = Gate::Kind::CZ;
      if (modes.size() != 2) throw ValidationError("CZ gate takes two modes");
      gate.mode_a = as_int(modes[0], "gate mode");
      gate.mode_b = as_int(modes[1], "gate mode");
    } else if (name == "V") {
      gate.kind = Gate::Kind::CubicPhase;
      if (modes.size() != 1) throw ValidationError("V gate takes one mode");
      gate.mode_a = as_int(modes[0], "gate mode");
    } else {
      throw ValidationError("gate \"kind\" must be \"Z\", \"CZ\" or \"V\"");
    }
    gates.push_back(gate);
  }
  return gates;
}

Json circuit_json(const CircuitSpec& c) {
  Json phase;
  if (c.phase.is_polynomial()) {
    phase = polynomial_json(c.phase.materialized());
  } else {
    const TabulatedPhase& t = c.phase.table();
    Json table = Json::array();
    for (Eigen::Index i = 0; i < t.phases.size(); ++i) table.push_back(t.phases[i]);
    phase = Json{{"table", std::move(table)}};
  }
  return Json{{"n", c.n_modes},
              {"sigma", sigma_json(c.sigma)},
              {"delta_p", c.delta_p},
              {"phase", std::move(phase)}};
}

CircuitSpec circuit_from_json(const Json& j) {
  const int n = as_int(require_field(j, "n"), "circuit field \"n\"");
  const double sigma = sigma_from_json(require_field(j, "sigma"));
  const double delta_p = as_number(require_field(j, "delta_p"), "circuit field \"delta_p\"");
  const bool has_phase = j.is_object() && j.contains("phase");
  const bool has_gates = j.is_object() && j.contains("gates");
  if (has_phase == has_gates)
    throw ValidationError("circuit needs exactly one of \"phase\" and \"gates\"");

  PhaseFunction phase = [&] {
    if (has_gates) return PhaseFunction::from_polynomial(from_gates(n, gates_from_json(j.at("gates"))));
    const Json& pj = j.at("phase");
    if (pj.is_object() && pj.contains("table")) {
      const Json& table = pj.at("table");
      if (!table.is_array() || table.empty())
        throw ValidationError("phase \"table\" must be a nonempty array");
      const auto size = static_cast<std::int64_t>(table.size());
      if ((size & (size - 1)) != 0)
        throw ValidationError("phase \"table\" length must be a power of two");
      int m = 0;
      while ((std::int64_t{1} << m) < size) ++m;
      TabulatedPhase t;
      t.m_bits = m;
      t.phases.resize(size);
      for (std::int64_t i = 0; i < size; ++i)
        t.phases[i] = as_number(table[static_cast<std::size_t>(i)], "phase table entry");
      return PhaseFunction::from_table(std::move(t));
    }
    return PhaseFunction::from_polynomial(polynomial_from_json(pj));
  }();

  return make_circuit(n, std::move(phase), sigma, delta_p);
}

Json estimate_json(const AmplitudeEstimate& est) {
  return Json{{"re", est.value.real()},
              {"im", est.value.imag()},
              {"method", est.method},
              {"eps_a", est.eps_a},
              {"eps_b", est.eps_b},
              {"eps_c", est.eps_c},
              {"mc_stderr", est.mc_stderr},
              {"eps_a_heuristic", est.eps_a_heuristic}};
}

Json oracles_json(const std::vector<BooleanOracle>& oracles) {
  validate_oracles(oracles);
  Json tables = Json::array();
  for (const BooleanOracle& oracle : oracles) {
    std::string bits(oracle.table.size(), '0');
    for (std::size_t y = 0; y < oracle.table.size(); ++y)
      if (oracle.table[y]) bits[y] = '1';
    tables.push_back(std::move(bits));
  }
  return Json{{"arity", oracles.front().arity}, {"tables", std::move(tables)}};
}

std::vector<BooleanOracle> oracles_from_json(const Json& j) {
  const int arity = as_int(require_field(j, "arity"), "oracle field \"arity\"");
  if (arity < 0 || arity > 30) throw ValidationError("oracle arity must be in 0..30");
  const Json& tables = require_field(j, "tables");
  if (!tables.is_array()) throw ValidationError("oracle \"tables\" must be an array");
  const std::size_t width = std::size_t{1} << arity;
  std::vector<BooleanOracle> oracles;
  oracles.reserve(tables.size());
  for (const Json& tj : tables) {
    if (!tj.is_string()) throw ValidationError("oracle tables must be strings of 0/1");
    const auto bits = tj.get<std::string>();
    if (bits.size() != width)
      throw ValidationError("oracle table string length must be 2^arity");
    BooleanOracle oracle;
    oracle.arity = arity;
    oracle.table.resize(width);
    for (std::size_t y = 0; y < width; ++y) {
      if (bits[y] != '0' && bits[y] != '1')
        throw ValidationError("oracle tables must be strings of 0/1");
      oracle.table[y] = bits[y] == '1' ? 1 : 0;
    }
    oracles.push_back(std::move(oracle));
  }
  validate_oracles(oracles);
  return oracles;
}

Json sharp_p_json(const SharpPSumCheck& check) {
  return Json{{"reconstructed", complex_json(check.reconstructed)},
              {"direct", complex_json(check.direct)},
              {"abs_gap", check.abs_gap}};
}

Json fooling_json(const FoolingDemoReport& report) {
  return Json{{"rule_plus", report.rule_plus},
              {"rule_minus", report.rule_minus},
              {"rule_outputs_identical", report.rule_outputs_identical},
              {"integral_phi_g", report.integral_phi_g},
              {"error_lower_bound", report.error_lower_bound},
              {"nodes", report.nodes},
              {"delta", report.delta},
              {"sigma", report.sigma}};
}

Json anticoncentration_json(const AntiConcentrationReport& report) {
  return Json{{"trials", report.trials},
              {"exhaustive", report.exhaustive},
              {"mean_mass_scaled", report.mean_mass_scaled},
              {"second_moment", report.second_moment},
              {"ratio", report.ratio},
              {"pz_floor", report.pz_floor},
              {"frac_above_mean", report.frac_above_mean},
              {"frac_above_uniform", report.frac_above_uniform},
              {"alpha", report.alpha},
              {"l_condition_value", report.l_condition_value},
              {"l_condition_ok", report.l_condition_ok}};
}

Json markov_json(const MarkovReport& report) {
  return Json{{"l1", report.l1},
              {"eps", report.eps},
              {"delta", report.delta},
              {"threshold", report.threshold},
              {"fraction", report.fraction},
              {"holds", report.holds}};
}

Json load_json_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open " + path);
  Json j = Json::parse(in, nullptr, false);
  if (j.is_discarded()) throw ValidationError("invalid JSON in " + path);
  return j;
}

void save_json_file(const std::string& path, const Json& j) {
  std::ofstream out(path);
  if (!out) throw ValidationError("cannot write " + path);
  out << j.dump(2) << '\n';
}

}  // namespace cviqp
