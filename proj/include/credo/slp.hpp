#pragma once

#include "credo/rational.hpp"
#include "credo/spec_model.hpp"

#include <string>
#include <utility>
#include <vector>

namespace credo {

// One affine scalar assignment: lhs := sum(coeff_i * var_i) + constant.
// Coefficients are kept in deterministic emission order.
struct AffineAssignment {
    std::string lhs;
    std::vector<std::pair<std::string, Rational>> coeffs;
    Rational constant;

    const Rational* coeff_of(const std::string& var) const {
        for (const auto& [v, c] : coeffs)
            if (v == var) return &c;
        return nullptr;
    }
};

// The loop-body IR: an ordered list of affine assignments over named inputs,
// outputs, persistent states and temporaries.
struct StraightLineProgram {
    std::string name;
    std::vector<std::string> input_vars;
    std::vector<std::string> output_vars;
    std::vector<std::string> state_vars;
    std::vector<std::string> temps;
    std::vector<AffineAssignment> stmts;

    bool is_state(const std::string& v) const;
    bool is_input(const std::string& v) const;
    bool is_output(const std::string& v) const;
    bool is_temp(const std::string& v) const;
};

class ProgramError : public std::runtime_error {
public:
    explicit ProgramError(const std::string& message) : std::runtime_error(message) {}
};

// Static checks: every RHS variable is an input, a state, or previously
// assigned; temps and outputs are assigned before use; names are known.
void validate_program(const StraightLineProgram& p);

// Deterministic lowering of the state-space update into the IR. Computes
// u = Cx + Dy then x+ = Ax + By through scalar gain and sum temporaries;
// state write-backs come last. Input-matrix rows whose nonzero coefficients
// share one magnitude across several inputs are factored through a shared
// +/-1 combination temp (Sum_k), which is what observers over computed input
// combinations attach to.
StraightLineProgram lower(const ControllerSpec& spec);

struct InterpretResult {
    std::vector<Rational> outputs;
    std::vector<Rational> new_state;
};

// Exact rational evaluation of the program in statement order.
InterpretResult interpret(const StraightLineProgram& p, std::span<const Rational> inputs,
                          std::span<const Rational> state);

}  // namespace credo
