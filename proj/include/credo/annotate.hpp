#pragma once

#include "credo/ellipsoid.hpp"
#include "credo/slp.hpp"
#include "credo/spec_model.hpp"

#include <optional>
#include <string>
#include <vector>

namespace credo {

enum class Tactic { AffineEllipsoid, SProcedure };

const char* to_string(Tactic t);

// A precondition of a Hoare triple. `assumed` marks assertive bounds at their
// first use; they render as `assumes` instead of `requires`.
struct TriplePre {
    Ellipsoid ellipsoid;
    int matrix_id = -1;
    bool assumed = false;
};

// {pre...} stmt {post} with the proof tactic that discharges it. stmt_index
// -1 is the Skip statement of an S-procedure combination step.
struct HoareTriple {
    std::vector<TriplePre> pres;
    int stmt_index = -1;
    Ellipsoid post;
    int post_matrix_id = -1;
    Tactic tactic = Tactic::AffineEllipsoid;
    std::string label;
};

// An assertive observer bound attached as an assumption at the first
// statement assigning one of its variables.
struct AssertiveAttachment {
    int stmt_index = -1;
    Ellipsoid bound;  // Q-form over the observer variables
    Rational mu;
    std::string label;
};

// The IR plus its contract and (after propagation) the per-statement triples.
struct AnnotatedProgram {
    StraightLineProgram program;
    Ellipsoid contract_pre;   // Q-form over state_vars
    Ellipsoid contract_post;  // equal matrix, separate instance
    Rational contract_mu;     // inductive observer multiplier
    std::string contract_label;
    std::vector<AssertiveAttachment> attachments;
    std::vector<HoareTriple> triples;  // filled by propagation
};

class AnnotationError : public std::runtime_error {
public:
    explicit AnnotationError(const std::string& message) : std::runtime_error(message) {}
};

// Observer typing: Inductive iff every variable is a state (memory), Assertive
// iff none is. Mixed support is rejected. Explicit kinds are checked against
// the connectivity rule; Auto defers to it.
ObserverKind classify(const ObserverSpec& observer, const StraightLineProgram& program);

// First statement assigning any observer variable (insertion point).
int insert_assertive(const StraightLineProgram& program, const ObserverSpec& observer);

// Builds the contract and the assertive attachments from the spec's
// observers; exactly one inductive observer is required.
AnnotatedProgram annotate(const ControllerSpec& spec, const StraightLineProgram& program);

}  // namespace credo
