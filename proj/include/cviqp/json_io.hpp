#pragma once

// JSON encodings for circuit inputs and report outputs. Readers validate
// shape and field types and throw ValidationError with the offending field
// named; writers emit only finite numbers (sigma = infinity is spelled
// "inf") so round-trips are lossless.

#include <string>
#include <vector>

#include <json.hpp>

#include "cviqp/circuit.hpp"
#include "cviqp/hardness.hpp"
#include "cviqp/integrator.hpp"

namespace cviqp {

using Json = nlohmann::json;

Json polynomial_json(const Polynomial& p);
Polynomial polynomial_from_json(const Json& j);

std::vector<Gate> gates_from_json(const Json& j);

// {"n", "sigma" (number or "inf"), "delta_p", and exactly one of "phase"
// (polynomial object or {"table": [...]}) or "gates"}. Writing always emits
// "phase" with the displacement shift folded in.
Json circuit_json(const CircuitSpec& c);
CircuitSpec circuit_from_json(const Json& j);

Json estimate_json(const AmplitudeEstimate& est);

// Oracle collections: {"arity", "tables": ["0110...", ...]}, one character
// per input string, index 0 leftmost.
Json oracles_json(const std::vector<BooleanOracle>& oracles);
std::vector<BooleanOracle> oracles_from_json(const Json& j);

Json sharp_p_json(const SharpPSumCheck& check);
Json fooling_json(const FoolingDemoReport& report);
Json anticoncentration_json(const AntiConcentrationReport& report);
Json markov_json(const MarkovReport& report);

// File helpers; parse failures surface as ValidationError.
Json load_json_file(const std::string& path);
void save_json_file(const std::string& path, const Json& j);

}  // namespace cviqp
