#pragma once

#include "credo/annotate.hpp"
#include "credo/matrix.hpp"
#include "credo/slp.hpp"

#include <map>
#include <string>
#include <vector>

namespace credo {

class AnnotationParseError : public std::runtime_error {
public:
    AnnotationParseError(const std::string& message, int line, int column)
        : std::runtime_error("line " + std::to_string(line) + ", column " +
                             std::to_string(column) + ": " + message),
          line_(line),
          column_(column) {}
    int line() const { return line_; }
    int column() const { return column_; }

private:
    int line_;
    int column_;
};

struct ParsedPredicate {
    std::string matrix;              // QMat_k identifier
    std::vector<std::string> vars;   // plain variable names
    bool assumed = false;
};

struct ParsedTriple {
    std::string label;
    std::vector<ParsedPredicate> pres;
    ParsedPredicate post;
    Tactic tactic = Tactic::AffineEllipsoid;
    int stmt_index = -1;  // -1: Skip (empty block)
};

// Lossless recovery of the emitted artifact: matrix literals as exact
// rationals, the recovered straight-line statements, the contract, and the
// triple chain in textual order.
struct ParsedArtifact {
    std::string name;
    std::map<std::string, RationalMatrix> matrices;
    StraightLineProgram program;
    ParsedPredicate contract_pre, contract_post;
    std::vector<ParsedTriple> triples;

    // Textual order of body elements: triple_index into `triples` (or -1 for
    // a bare statement), stmt_index into program.stmts (or -1 for a Skip).
    struct Event {
        int triple_index = -1;
        int stmt_index = -1;
    };
    std::vector<Event> events;

    const RationalMatrix& matrix(const std::string& id) const;
};

ParsedArtifact parse_annotated_c(const std::string& text);

}  // namespace credo
