#pragma once

#include "credo/annotate.hpp"

#include <span>
#include <string>
#include <vector>

namespace credo {

enum class TransformRule { AffineEllipsoid, ReduceEllipsoid, SProcedure };

const char* to_string(TransformRule r);

// Bookkeeping for one rule application; the matrices reproduce the step
// exactly (out = transform * in * transform^T, or the block combination).
struct TransformRecord {
    TransformRule rule = TransformRule::AffineEllipsoid;
    int stmt_index = -1;
    RationalMatrix transform;            // T for affine/reduce; empty for S-procedure
    std::vector<Rational> multipliers;   // S-procedure lambdas
    std::vector<std::vector<std::string>> in_supports;
    std::vector<std::string> out_support;
    std::vector<RationalMatrix> in_matrices;
    RationalMatrix out_matrix;
};

class PropagationError : public std::runtime_error {
public:
    explicit PropagationError(const std::string& message) : std::runtime_error(message) {}
};

class NotApplicableError : public PropagationError {
public:
    explicit NotApplicableError(const std::string& message) : PropagationError(message) {}
};

class MultiplierError : public PropagationError {
public:
    explicit MultiplierError(const std::string& message) : PropagationError(message) {}
};

// Image of a Q-form ellipsoid under one affine assignment: Q' = T Q T^T with
// the lhs row appended (new variable) or replaced in place (reassignment).
// Every RHS variable must lie in the support, else NotApplicableError.
// Nonzero constants go through a homogeneous coordinate fixed at 1.
Ellipsoid affine_update(const Ellipsoid& q, const AffineAssignment& a);

// Projection: delete the dropped variable's row and column.
Ellipsoid reduce(const Ellipsoid& q, const std::string& drop);

// Block-diagonal combination sum(H(Q_i)/lambda_i) over concatenated supports;
// multipliers must be positive and sum to exactly 1, supports disjoint.
Ellipsoid sproc_combine(std::span<const std::pair<Ellipsoid, Rational>> parts);

struct PropagationResult {
    AnnotatedProgram annotated;   // triples filled in
    Ellipsoid final_ellipsoid;    // generated post over the state variables
    int final_matrix_id = -1;
    std::vector<TransformRecord> records;
};

// Walks the statements in order, maintaining disjoint active ellipsoids:
// assertive assumptions activate at their attachment points, S-procedure
// merges fire when a statement's RHS spans several actives, dead variables
// are reduced away as soon as liveness allows, and the final ellipsoid is the
// state-variable projection after the last statement.
PropagationResult propagate(const AnnotatedProgram& input);

}  // namespace credo
