#pragma once

#include "credo/ellipsoid.hpp"
#include "credo/psd.hpp"
#include "credo/slp.hpp"
#include "credo/spec_model.hpp"

#include <cstdint>
#include <optional>
#include <vector>

namespace credo {

class StabilityError : public std::runtime_error {
public:
    explicit StabilityError(const std::string& message) : std::runtime_error(message) {}
};

// One bounded input channel: a declared variable together with its exact
// expansion over the raw inputs (a unit vector for a raw input, the +/-1
// pattern for a combination temp).
struct InputChannel {
    std::string variable;
    std::vector<Rational> pattern;
};

// Certificate for Problem-1-style invariance of {x | x^T P x <= 1}.
struct StabilityCertificate {
    RationalMatrix P;          // n x n, positive definite
    Rational alpha;            // in (0, 1)
    Ellipsoid input_bound;     // Q-form over the channel variables
    std::vector<InputChannel> channels;
};

// Assembles the certificate from the spec's observers: P and alpha = 1 - mu
// from the inductive observer, the input bound from the assertive observers
// (joint Q scaled per-channel so a single alpha covers all multipliers),
// channel patterns from each assertive variable's defining assignment in the
// lowered program.
StabilityCertificate certificate_from_observers(const ControllerSpec& spec,
                                                const StraightLineProgram& program);

struct LmiResult {
    PsdVerdict verdict;        // PSD test of the negated LMI block
    RationalMatrix lmi_block;  // [[A'PA-(1-a)P, A'PB],[B'PA, B'PB-aY]]
};

// Checks the invariance LMI non-strictly: the block matrix must be <= 0,
// i.e. ldlt_psd(-block) proves PSD. B is first factored through the declared
// channels; a state update reading inputs outside them is an error.
LmiResult check_lmi(const ControllerSpec& spec, const StabilityCertificate& cert);

// Exact pointwise decrease check: (Ax + By)^T P (Ax + By) <= x^T P x.
bool one_step_decrease(const ControllerSpec& spec, const RationalMatrix& P,
                       std::span<const Rational> x, std::span<const Rational> y);

enum class InputMode { Zero, Constant, UniformInBound };

struct SimChannel {
    std::vector<double> realization;  // raw-input vector realizing channel value 1
    double radius;                    // channel values drawn from [-radius, radius]
};

struct SimOptions {
    InputMode mode = InputMode::Zero;
    std::vector<double> constant;      // raw-input values for Constant mode
    std::vector<SimChannel> channels;  // for UniformInBound
    std::optional<std::vector<std::vector<double>>> level_p;  // P for the level column
};

struct SimTrace {
    struct Row {
        std::vector<double> state;
        std::vector<double> input;
        std::vector<double> output;
        double level;
    };
    std::vector<Row> rows;  // steps + 1 rows
    double max_level = 0.0;
    std::uint64_t seed = 0;
};

// Double-precision simulation of x+ = Ax + By, u = Cx + Dy from x0.
// Deterministic for a fixed seed.
SimTrace simulate(const ControllerSpec& spec, long steps, std::uint64_t seed,
                  const SimOptions& options);

// Simulation options matching the declared observers (uniform-in-bound
// channels and the level ellipsoid).
SimOptions sim_options_from_observers(const ControllerSpec& spec,
                                      const StraightLineProgram& program);

}  // namespace credo
