#pragma once

#include "credo/check.hpp"
#include "credo/emit.hpp"
#include "credo/propagate.hpp"
#include "credo/spec_model.hpp"

#include <string>

namespace credo {

// One full generator run: lowering, annotation, propagation, emission, and
// the generator-side containment verdict.
struct AutocodeResult {
    StraightLineProgram program;
    PropagationResult propagation;
    EmitResult emission;
    RationalMatrix declared;   // contract ellipsoid (Q-form over states)
    RationalMatrix generated;  // propagated final ellipsoid
    PsdVerdict containment;    // declared - generated
};

AutocodeResult autocode(const ControllerSpec& spec);

// Structured generation report: transform records, the generated final
// ellipsoid, the containment verdict, and rendering notes.
std::string generation_report_json(const AutocodeResult& result);

}  // namespace credo
