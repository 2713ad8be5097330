#pragma once

#include "credo/parse_acsl.hpp"
#include "credo/psd.hpp"

#include <optional>
#include <string>
#include <vector>

namespace credo {

enum class TripleVerdict { Proven, Refuted, Unknown };

const char* to_string(TripleVerdict v);

struct TripleResult {
    std::string label;
    Tactic rule = Tactic::AffineEllipsoid;
    TripleVerdict verdict = TripleVerdict::Unknown;
    bool by_containment = false;  // proven semantically rather than by exact equality
    std::string detail;
    std::optional<RationalMatrix> discrepancy;  // post - reconstruction, when refuted
};

struct VerificationReport {
    TripleVerdict overall = TripleVerdict::Unknown;
    std::vector<TripleResult> triples;
    PsdVerdict final_containment;
    bool final_containment_checked = false;
    std::string final_detail;
    std::optional<PsdVerdict> lmi_check;
    double epsilon = 0.0;
    std::string tool_version;
};

struct CheckOptions {
    double epsilon = 9.313225746154785e-10;  // 2^-30
};

// Independent re-verification of one AffineEllipsoid triple: reconstructs the
// transformation from the parsed statement and the pre/post supports alone,
// demands exact equality with the annotated post, and falls back to a PSD
// containment test before refuting.
TripleResult check_affine_triple(const ParsedArtifact& artifact, const ParsedTriple& triple);

// S-procedure triple: recovers the multipliers from the block ratios and
// demands a consistent positive assignment summing to one, zero off-diagonal
// blocks, and block placement matching the support concatenation.
TripleResult check_sproc_triple(const ParsedArtifact& artifact, const ParsedTriple& triple);

// Containment of the generated set in the declared one:
// ProvenPSD(Q_declared - Q_generated) <=> G_gen is a subset of G_decl.
PsdVerdict check_final_containment(const RationalMatrix& q_generated,
                                   const RationalMatrix& q_declared);

// Float-data variant backed by the interval Cholesky.
PsdVerdict check_final_containment_float(const std::vector<std::vector<double>>& q_generated,
                                         const std::vector<std::vector<double>>& q_declared,
                                         double shift);

// Full verification: chains the triples in textual order (assumptions enter
// as axioms, preconditions must match an available fact up to exact
// submatrix projection, assignments invalidate facts over their target),
// checks every triple by its tactic, then decides the final containment
// against the function contract.
VerificationReport check_artifact(const ParsedArtifact& artifact, const CheckOptions& options = {});

std::string report_to_json(const VerificationReport& report);

}  // namespace credo
