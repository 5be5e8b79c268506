#include <doctest.h>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <limits>
#include <string>

#include "cviqp/errors.hpp"
#include "cviqp/json_io.hpp"

using namespace cviqp;

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

// Runs fn, expecting a ValidationError whose message mentions `needle`.
void expect_validation(const std::function<void()>& fn, const std::string& needle) {
  try {
    fn();
    FAIL_CHECK("expected ValidationError mentioning \"" << needle << "\"");
  } catch (const ValidationError& e) {
    CAPTURE(e.what());
    CHECK(std::string(e.what()).find(needle) != std::string::npos);
  }
}

Polynomial awkward_poly() {
  Polynomial p(2);
  p.set_term({1, 0}, 0.1);
  p.set_term({1, 1}, 1.0 / 3.0);
  p.set_term({0, 3}, -0.7);
  p.set_term({2, 1}, 1e-14);
  return p;
}

}  // namespace

TEST_CASE("polynomial JSON round trip preserves coefficients bitwise") {
  const Polynomial p = awkward_poly();
  const Json j = polynomial_json(p);
  CHECK(j.at("n") == 2);
  CHECK(j.at("terms").is_array());
  const Polynomial back = polynomial_from_json(j);
  // Term-map equality compares doubles; shortest-round-trip serialization
  // makes this exact.
  CHECK(back == p);

  // And a second hop through actual text.
  const Polynomial again = polynomial_from_json(Json::parse(j.dump()));
  CHECK(again == p);
}

TEST_CASE("polynomial JSON validation names the offending field") {
  expect_validation([] { polynomial_from_json(Json{{"terms", Json::array()}}); },
                    "missing field \"n\"");
  expect_validation([] { polynomial_from_json(Json{{"n", 0}, {"terms", Json::array()}}); },
                    "at least one variable");
  expect_validation([] { polynomial_from_json(Json{{"n", 1}}); },
                    "missing field \"terms\"");
  expect_validation([] { polynomial_from_json(Json{{"n", 1}, {"terms", 3}}); },
                    "must be an array");
  expect_validation(
      [] {
        polynomial_from_json(Json{{"n", 2},
                                  {"terms", Json::array({Json{{"exp", {1}}, {"coeff", 1.0}}})}});
      },
      "one exponent per variable");
  expect_validation(
      [] {
        polynomial_from_json(Json{{"n", 1},
                                  {"terms", Json::array({Json{{"exp", {-1}}, {"coeff", 1.0}}})}});
      },
      "nonnegative");
  expect_validation(
      [] {
        polynomial_from_json(Json{{"n", 1},
                                  {"terms", Json::array({Json{{"exp", {1}}, {"coeff", "x"}}})}});
      },
      "must be a number");
}

TEST_CASE("circuit JSON round trip folds displacements into the phase") {
  CircuitSpec c = make_circuit(2, PhaseFunction::from_polynomial(awkward_poly()),
                               1.25, 0.05);
  Eigen::VectorXd r(2);
  r << 0.3, -0.9;
  c = displace(c, r);
  const Json j = circuit_json(c);
  CHECK(j.at("n") == 2);
  CHECK(j.at("sigma") == 1.25);
  CHECK(j.at("delta_p") == 0.05);

  const CircuitSpec back = circuit_from_json(j);
  CHECK(back.n_modes == 2);
  CHECK(back.sigma == 1.25);
  CHECK(back.delta_p == 0.05);
  // The shift was written into the materialized polynomial.
  CHECK(back.phase.shift().isZero(0.0));
  CHECK(back.phase.materialized() == c.phase.materialized());
}

TEST_CASE("infinite sigma is spelled inf and read back as infinity") {
  const CircuitSpec c = make_circuit(2, PhaseFunction::from_polynomial(awkward_poly()),
                                     kInf, 0.05);
  const Json j = circuit_json(c);
  CHECK(j.at("sigma") == "inf");
  const CircuitSpec back = circuit_from_json(Json::parse(j.dump()));
  CHECK(std::isinf(back.sigma));
  const Json spelled = {{"n", 2}, {"sigma", "infinity"}, {"delta_p", 0.05},
                        {"phase", polynomial_json(awkward_poly())}};
  CHECK(std::isinf(circuit_from_json(spelled).sigma));
  expect_validation(
      [] {
        circuit_from_json(Json{{"n", 1}, {"sigma", "wide"}, {"delta_p", 0.05},
                               {"phase", Json{{"n", 1}, {"terms", Json::array()}}}});
      },
      "\"inf\"");
}

TEST_CASE("tabulated circuit phases survive the JSON round trip") {
  TabulatedPhase t;
  t.m_bits = 2;
  t.phases.resize(4);
  t.phases << 0.0, 1.5, 3.0, 4.5;
  const CircuitSpec c = make_circuit(1, PhaseFunction::from_table(t), 1.0, 0.05);
  const Json j = circuit_json(c);
  CHECK(j.at("phase").at("table").size() == 4);
  const CircuitSpec back = circuit_from_json(Json::parse(j.dump()));
  CHECK_FALSE(back.phase.is_polynomial());
  CHECK(back.phase.table().m_bits == 2);
  CHECK(back.phase.table().phases == t.phases);

  expect_validation(
      [] {
        circuit_from_json(Json{{"n", 1}, {"sigma", 1.0}, {"delta_p", 0.05},
                               {"phase", Json{{"table", Json::array({0.0, 1.0, 2.0})}}}});
      },
      "power of two");
}

TEST_CASE("a gate list builds the same phase polynomial") {
  const Json j = {{"n", 2},
                  {"sigma", 1.0},
                  {"delta_p", 0.05},
                  {"gates", Json::array({Json{{"kind", "Z"}, {"modes", {0}}, {"strength", 0.5}},
                                         Json{{"kind", "CZ"}, {"modes", {0, 1}}, {"strength", -0.25}},
                                         Json{{"kind", "V"}, {"modes", {1}}, {"strength", 0.125}}})}};
  const CircuitSpec c = circuit_from_json(j);
  CHECK(c.phase.base_polynomial().coefficient({1, 0}) == 0.5);
  CHECK(c.phase.base_polynomial().coefficient({1, 1}) == -0.25);
  CHECK(c.phase.base_polynomial().coefficient({0, 3}) == 0.125);
  // Writing always emits the materialized phase, and re-reading it gives
  // the same polynomial.
  const CircuitSpec back = circuit_from_json(circuit_json(c));
  CHECK(back.phase.materialized() == c.phase.materialized());
}

TEST_CASE("gate JSON validation") {
  expect_validation([] { gates_from_json(Json{{"kind", "Z"}}); }, "must be an array");
  expect_validation(
      [] { gates_from_json(Json::array({Json{{"modes", {0}}, {"strength", 1.0}}})); },
      "missing field \"kind\"");
  expect_validation(
      [] {
        gates_from_json(Json::array({Json{{"kind", "H"}, {"modes", {0}}, {"strength", 1.0}}}));
      },
      "\"Z\", \"CZ\" or \"V\"");
  expect_validation(
      [] {
        gates_from_json(Json::array({Json{{"kind", "Z"}, {"modes", {0, 1}}, {"strength", 1.0}}}));
      },
      "one mode");
  expect_validation(
      [] {
        gates_from_json(Json::array({Json{{"kind", "CZ"}, {"modes", {0}}, {"strength", 1.0}}}));
      },
      "two modes");
}

TEST_CASE("a circuit must have exactly one phase source") {
  const Json base = {{"n", 1}, {"sigma", 1.0}, {"delta_p", 0.05}};
  expect_validation([&] { circuit_from_json(base); }, "exactly one");
  Json both = base;
  both["phase"] = Json{{"n", 1}, {"terms", Json::array()}};
  both["gates"] = Json::array();
  expect_validation([&] { circuit_from_json(both); }, "exactly one");
}

TEST_CASE("oracle JSON round trip") {
  const Json j = {{"arity", 3}, {"tables", {"01101001", "11100100"}}};
  const auto oracles = oracles_from_json(j);
  REQUIRE(oracles.size() == 2);
  CHECK(oracles[0].arity == 3);
  CHECK(oracles[0].table[0] == 0);
  CHECK(oracles[0].table[1] == 1);
  CHECK(oracles[0].table[7] == 1);
  CHECK(oracles[0].popcount() == 4);
  CHECK(oracles[1].popcount() == 4);
  const Json back = oracles_json(oracles);
  CHECK(back.at("arity") == 3);
  CHECK(back.at("tables")[0] == "01101001");
  CHECK(back.at("tables")[1] == "11100100");
}

TEST_CASE("oracle JSON validation") {
  expect_validation([] { oracles_from_json(Json{{"tables", {"01"}}}); },
                    "missing field \"arity\"");
  expect_validation([] { oracles_from_json(Json{{"arity", 1}, {"tables", {"01"}}}); },
                    "at least two");
  expect_validation(
      [] { oracles_from_json(Json{{"arity", 1}, {"tables", {"01", "10", "11"}}}); },
      "power of two");
  expect_validation(
      [] { oracles_from_json(Json{{"arity", 1}, {"tables", {"01", "102"}}}); },
      "length");
  expect_validation(
      [] { oracles_from_json(Json{{"arity", 1}, {"tables", {"01", "1x"}}}); },
      "0/1");
  expect_validation([] { oracles_from_json(Json{{"arity", 31}, {"tables", Json::array()}}); },
                    "0..30");
}

TEST_CASE("estimate JSON carries every error channel") {
  AmplitudeEstimate est;
  est.value = {0.25, -0.75};
  est.method = "riemann";
  est.eps_a = 1e-3;
  est.eps_b = 2e-4;
  est.eps_c = 0.0;
  est.mc_stderr = 0.0;
  est.eps_a_heuristic = true;
  const Json j = estimate_json(est);
  CHECK(j.at("re") == 0.25);
  CHECK(j.at("im") == -0.75);
  CHECK(j.at("method") == "riemann");
  CHECK(j.at("eps_a") == 1e-3);
  CHECK(j.at("eps_b") == 2e-4);
  CHECK(j.at("eps_c") == 0.0);
  CHECK(j.at("mc_stderr") == 0.0);
  CHECK(j.at("eps_a_heuristic") == true);
}

TEST_CASE("report serializers expose their headline numbers") {
  SharpPSumCheck check;
  check.reconstructed = {0.5, 0.5};
  check.direct = {0.5, 0.5};
  check.abs_gap = 0.0;
  const Json sj = sharp_p_json(check);
  CHECK(sj.at("reconstructed").at("re") == 0.5);
  CHECK(sj.at("direct").at("im") == 0.5);
  CHECK(sj.at("abs_gap") == 0.0);

  FoolingDemoReport fr;
  fr.rule_plus = 0.0;
  fr.rule_minus = 0.0;
  fr.rule_outputs_identical = true;
  fr.integral_phi_g = 5.5;
  fr.error_lower_bound = 5.5;
  fr.nodes = 16;
  fr.delta = 0.2;
  fr.sigma = 1.0;
  const Json fj = fooling_json(fr);
  CHECK(fj.at("rule_outputs_identical") == true);
  CHECK(fj.at("error_lower_bound") == 5.5);
  CHECK(fj.at("nodes") == 16);

  AntiConcentrationReport ar;
  ar.trials = 25;
  ar.exhaustive = true;
  ar.mean_mass_scaled = 0.98;
  ar.pz_floor = 0.2;
  ar.frac_above_mean = 0.4;
  ar.alpha = 0.5;
  const Json aj = anticoncentration_json(ar);
  CHECK(aj.at("exhaustive") == true);
  CHECK(aj.at("pz_floor") == 0.2);
  CHECK(aj.at("frac_above_mean") == 0.4);

  MarkovReport mr;
  mr.l1 = 0.01;
  mr.eps = 0.015625;
  mr.delta = 0.125;
  mr.threshold = 0.001;
  mr.fraction = 0.0625;
  mr.holds = true;
  const Json mj = markov_json(mr);
  CHECK(mj.at("holds") == true);
  CHECK(mj.at("threshold") == 0.001);
}

TEST_CASE("JSON files round trip through disk") {
  const std::string path = "/tmp/cviqp_test_json_roundtrip.json";
  const Json j = circuit_json(make_circuit(
      2, PhaseFunction::from_polynomial(awkward_poly()), 1.25, 0.05));
  save_json_file(path, j);
  const Json back = load_json_file(path);
  CHECK(back == j);
  std::remove(path.c_str());
}

TEST_CASE("file loader reports unreadable and unparsable input") {
  expect_validation([] { load_json_file("/tmp/cviqp_no_such_file.json"); },
                    "cannot open");
  const std::string path = "/tmp/cviqp_test_bad.json";
  std::ofstream(path) << "{ this is not json";
  expect_validation([&] { load_json_file(path); }, "invalid JSON");
  std::remove(path.c_str());
}
