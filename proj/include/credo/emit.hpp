#pragma once

#include "credo/annotate.hpp"
#include "credo/propagate.hpp"

#include <string>
#include <vector>

namespace credo {

inline constexpr const char* kToolVersion = "0.1.0";

struct EmitResult {
    std::string text;
    // Matrix ids whose entries needed exact fraction literals because no
    // short terminating decimal exists.
    std::vector<std::string> fraction_rendered;
};

// Renders the annotated program as C source with ACSL-subset annotation
// comments: io/state structs, an init function, and the compute function
// whose contract and per-statement behaviors carry the ellipsoid chain.
// Byte-deterministic for identical inputs.
EmitResult emit_c(const AnnotatedProgram& annotated, std::span<const Rational> x0);

}  // namespace credo
