#pragma once

#include <string>

#include "json.hpp"
#include "qplab/kicked_rotor.hpp"
#include "qplab/model.hpp"

// JSON schema for operator specifications (documented in the README):
//
// {
//   "geometry": "line" | "strip" | "box2d",        // default "line"
//   "lambda": 4.0,
//   "diagonal": false,                              // optional: drop the Laplacian
//   "potential": {"cos": [1.0], "sin": [0.0], "constant": 0.0}
//                | {"harmonics": [{"k": [1,0], "re": 0.5, "im": 0.0}, ...]},
//   "strip_potentials": [ <potential>, ... ],       // strips: one per row
//   "frequency": [0.6180339887498949],
//   "phase": [0.0],                                 // skew shift: [x1, x2]
//   "orbit": {"kind": "shift"}
//          | {"kind": "skew_shift"}
//          | {"kind": "monomial", "sigma": 1.5, "alpha": 0.3}
// }
//
// Kicked rotor: {"kappa": 0.5, "a": 0.309016994, "b": 0.3}

namespace qplab {

nlohmann::json to_json(const FourierPotential& f);
FourierPotential potential_from_json(const nlohmann::json& j);

nlohmann::json to_json(const OperatorSpec& spec);
OperatorSpec operator_spec_from_json(const nlohmann::json& j);
OperatorSpec load_operator_spec(const std::string& path);

nlohmann::json to_json(const KickedRotorSpec& spec);
KickedRotorSpec rotor_spec_from_json(const nlohmann::json& j);
KickedRotorSpec load_rotor_spec(const std::string& path);

/// Shortest round-trip-exact decimal form (17 significant digits).
std::string format_g17(double x);

}  // namespace qplab
