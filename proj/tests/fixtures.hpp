#pragma once

// Shared in-test controller fixtures.

#include "credo/spec_model.hpp"

#include <string>

namespace fixtures {

// The canonical running example: two raw inputs whose difference drives the
// controller, observers as declared on the model.
inline std::string running_example_json(const std::string& a11 = "0.4990") {
    return std::string(R"({
  "name": "discrete_timeg_no_plant_08b",
  "A": [[")") + a11 + R"(", "-0.05"], ["0.01", "1"]],
  "B": [["0.01", "-0.01"], ["0", "0"]],
  "C": [["564.48", "0"]],
  "D": [["1280", "-1280"]],
  "states": ["Integrator_1", "Integrator_2"],
  "inputs": ["y", "yd"],
  "outputs": ["u"],
  "x0": ["0", "0"],
  "observers": [
    {
      "label": "Stability",
      "kind": "inductive",
      "form": "P",
      "matrix": [["6.742e-4", "4.28e-5"], ["4.28e-5", "2.4651e-3"]],
      "mu": "0.9991",
      "variables": ["Integrator_1", "Integrator_2"]
    },
    {
      "label": "BoundedInput",
      "kind": "assertive",
      "form": "Q",
      "matrix": [["0.5"]],
      "mu": "0.0009",
      "variables": ["Sum4"]
    }
  ]
})";
}

// The bare state-space sextuple with a single direct input; used for
// ingestion and semantics tests.
inline std::string literal_sextuple_json() {
    return R"({
  "name": "running_example",
  "A": [["0.4990", "-0.05"], ["0.01", "1"]],
  "B": [["0"], ["0.01"]],
  "C": [["564.48", "0"]],
  "D": [["1280"]],
  "states": ["Integrator_1", "Integrator_2"],
  "inputs": ["y"],
  "outputs": ["u"],
  "x0": ["0", "0"],
  "observers": []
})";
}

inline credo::ControllerSpec running_example(const std::string& a11 = "0.4990") {
    return credo::parse_spec_json(running_example_json(a11), "running_example");
}

inline credo::ControllerSpec literal_sextuple() {
    return credo::parse_spec_json(literal_sextuple_json(), "literal_sextuple");
}

}  // namespace fixtures
