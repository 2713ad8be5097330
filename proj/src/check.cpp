#include "credo/check.hpp"

#include "credo/emit.hpp"

#include <json.hpp>

#include <algorithm>
#include <set>

namespace credo {

using nlohmann::ordered_json;

const char* to_string(TripleVerdict v) {
    switch (v) {
        case TripleVerdict::Proven: return "Proven";
        case TripleVerdict::Refuted: return "Refuted";
        case TripleVerdict::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

int index_of(const std::vector<std::string>& vars, const std::string& v) {
    auto it = std::find(vars.begin(), vars.end(), v);
    return it == vars.end() ? -1 : static_cast<int>(it - vars.begin());
}

}  // namespace

TripleResult check_affine_triple(const ParsedArtifact& artifact, const ParsedTriple& triple) {
    TripleResult result;
    result.label = triple.label;
    result.rule = Tactic::AffineEllipsoid;
    if (triple.tactic != Tactic::AffineEllipsoid) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "tactic mismatch";
        return result;
    }
    if (triple.pres.size() != 1) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "AffineEllipsoid requires exactly one precondition, found " +
                        std::to_string(triple.pres.size());
        return result;
    }
    if (triple.stmt_index < 0) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "AffineEllipsoid on a Skip statement";
        return result;
    }
    const ParsedPredicate& pre = triple.pres.front();
    const ParsedPredicate& post = triple.post;
    const AffineAssignment& stmt =
        artifact.program.stmts[static_cast<std::size_t>(triple.stmt_index)];
    const RationalMatrix& q_pre = artifact.matrix(pre.matrix);
    const RationalMatrix& q_post = artifact.matrix(post.matrix);
    if (!q_pre.is_symmetric() || !q_post.is_symmetric()) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "ellipsoid matrix is not symmetric";
        return result;
    }

    // Reconstruct M from the statement and the two supports alone. Constants
    // go through the homogeneous lift blockdiag(2Q, 2) with the constant in
    // the extra column.
    const int pre_n = static_cast<int>(pre.vars.size());
    const bool has_constant = stmt.constant != 0;
    const int cols = pre_n + (has_constant ? 1 : 0);
    RationalMatrix m(static_cast<int>(post.vars.size()), cols);
    for (int r = 0; r < m.rows(); ++r) {
        const std::string& v = post.vars[static_cast<std::size_t>(r)];
        if (v == stmt.lhs) {
            for (const auto& [src, coeff] : stmt.coeffs) {
                int at = index_of(pre.vars, src);
                if (at < 0) {
                    result.verdict = TripleVerdict::Refuted;
                    result.detail = "statement reads \"" + src +
                                    "\" which the precondition vector does not cover";
                    return result;
                }
                m.at(r, at) = coeff;
            }
            if (has_constant) m.at(r, pre_n) = stmt.constant;
        } else {
            int at = index_of(pre.vars, v);
            if (at < 0) {
                result.verdict = TripleVerdict::Refuted;
                result.detail = "postcondition variable \"" + v +
                                "\" is neither the assigned variable nor in the precondition";
                return result;
            }
            m.at(r, at) = 1;
        }
    }

    RationalMatrix lifted = q_pre;
    if (has_constant) {
        std::vector<RationalMatrix> blocks{scalar_mult(Rational(2), q_pre),
                                           RationalMatrix{{Rational(2)}}};
        lifted = block_diag(blocks);
    }
    RationalMatrix reconstruction = multiply(multiply(m, lifted), transpose(m));
    if (reconstruction == q_post) {
        result.verdict = TripleVerdict::Proven;
        result.detail = "exact reconstruction";
        return result;
    }
    RationalMatrix gap = sub(q_post, reconstruction);
    if (ldlt_psd(gap).proven_psd()) {
        result.verdict = TripleVerdict::Proven;
        result.by_containment = true;
        result.detail = "proven by containment";
        return result;
    }
    result.verdict = TripleVerdict::Refuted;
    result.detail = "post differs from the image of the pre";
    result.discrepancy = gap;
    return result;
}

TripleResult check_sproc_triple(const ParsedArtifact& artifact, const ParsedTriple& triple) {
    TripleResult result;
    result.label = triple.label;
    result.rule = Tactic::SProcedure;
    if (triple.tactic != Tactic::SProcedure) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "tactic mismatch";
        return result;
    }
    if (triple.stmt_index >= 0) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "SProcedure must annotate a Skip statement";
        return result;
    }
    if (triple.pres.size() < 2) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "SProcedure requires at least two preconditions";
        return result;
    }
    const RationalMatrix& q_post = artifact.matrix(triple.post.matrix);
    if (!q_post.is_symmetric()) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "ellipsoid matrix is not symmetric";
        return result;
    }

    // Block placement must match the support concatenation.
    std::vector<std::string> concat;
    for (const auto& pre : triple.pres)
        concat.insert(concat.end(), pre.vars.begin(), pre.vars.end());
    if (concat != triple.post.vars) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "post support is not the concatenation of the precondition supports";
        return result;
    }

    // Recover each lambda from post_block = pre_block / lambda.
    Rational assigned_total(0);
    int free_blocks = 0;
    std::vector<std::optional<Rational>> lambdas(triple.pres.size());
    int offset = 0;
    for (std::size_t b = 0; b < triple.pres.size(); ++b) {
        const RationalMatrix& q_pre = artifact.matrix(triple.pres[b].matrix);
        int dim = q_pre.rows();
        std::optional<Rational> lambda;
        for (int i = 0; i < dim; ++i)
            for (int j = 0; j < dim; ++j) {
                const Rational& pre_v = q_pre.at(i, j);
                const Rational& post_v = q_post.at(offset + i, offset + j);
                if (pre_v == 0 && post_v == 0) continue;
                if (pre_v == 0 || post_v == 0) {
                    result.verdict = TripleVerdict::Refuted;
                    result.detail = "zero/nonzero mismatch inside block " + std::to_string(b);
                    return result;
                }
                Rational ratio = pre_v / post_v;
                if (lambda && *lambda != ratio) {
                    result.verdict = TripleVerdict::Refuted;
                    result.detail = "inconsistent multiplier inside block " + std::to_string(b);
                    return result;
                }
                lambda = ratio;
            }
        if (lambda) {
            if (!(*lambda > 0)) {
                result.verdict = TripleVerdict::Refuted;
                result.detail = "nonpositive multiplier for block " + std::to_string(b);
                return result;
            }
            assigned_total += *lambda;
            lambdas[b] = lambda;
        } else {
            ++free_blocks;  // all-zero block constrains nothing
        }
        offset += dim;
    }
    // Off-diagonal blocks must vanish.
    offset = 0;
    std::vector<int> offsets;
    for (const auto& pre : triple.pres) {
        offsets.push_back(offset);
        offset += artifact.matrix(pre.matrix).rows();
    }
    for (std::size_t a = 0; a < triple.pres.size(); ++a)
        for (std::size_t b = a + 1; b < triple.pres.size(); ++b) {
            int ra = artifact.matrix(triple.pres[a].matrix).rows();
            int rb = artifact.matrix(triple.pres[b].matrix).rows();
            for (int i = 0; i < ra; ++i)
                for (int j = 0; j < rb; ++j)
                    if (q_post.at(offsets[a] + i, offsets[b] + j) != 0) {
                        result.verdict = TripleVerdict::Refuted;
                        result.detail = "nonzero off-diagonal block between preconditions " +
                                        std::to_string(a) + " and " + std::to_string(b);
                        return result;
                    }
        }

    bool sum_ok = free_blocks > 0 ? assigned_total < 1 : assigned_total == 1;
    if (!sum_ok) {
        result.verdict = TripleVerdict::Refuted;
        result.detail = "multipliers sum to " + to_display_decimal(assigned_total) +
                        ", expected 1";
        return result;
    }
    result.verdict = TripleVerdict::Proven;
    std::string detail = "lambda =";
    for (const auto& l : lambdas) detail += " " + (l ? to_display_decimal(*l) : std::string("free"));
    result.detail = detail;
    return result;
}

PsdVerdict check_final_containment(const RationalMatrix& q_generated,
                                   const RationalMatrix& q_declared) {
    if (q_generated.rows() != q_declared.rows() || q_generated.cols() != q_declared.cols())
        throw DimensionError("check_final_containment: shape mismatch " +
                             q_generated.shape_string() + " vs " + q_declared.shape_string());
    return ldlt_psd(sub(q_declared, q_generated));
}

PsdVerdict check_final_containment_float(const std::vector<std::vector<double>>& q_generated,
                                         const std::vector<std::vector<double>>& q_declared,
                                         double shift) {
    std::size_t n = q_generated.size();
    if (q_declared.size() != n)
        throw DimensionError("check_final_containment_float: shape mismatch");
    std::vector<std::vector<double>> diff(n, std::vector<double>(n));
    for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j)
            diff[i][j] = q_declared[i][j] - q_generated[i][j];
    // The subtraction itself is rounded; fold one ulp of slack into the shift.
    return interval_cholesky_psd(diff, shift);
}

namespace {

struct Fact {
    RationalMatrix matrix;
    std::vector<std::string> vars;
};

// A precondition is supported if its matrix equals the exact projection
// (submatrix) of an available fact onto its variables.
bool supported_by(const Fact& fact, const RationalMatrix& m,
                  const std::vector<std::string>& vars) {
    std::vector<int> idx;
    for (const auto& v : vars) {
        int at = index_of(fact.vars, v);
        if (at < 0) return false;
        idx.push_back(at);
    }
    return extract_submatrix(fact.matrix, idx, idx) == m;
}

}  // namespace

VerificationReport check_artifact(const ParsedArtifact& artifact, const CheckOptions& options) {
    VerificationReport report;
    report.epsilon = options.epsilon;
    report.tool_version = kToolVersion;

    const auto& program = artifact.program;
    bool any_refuted = false, any_unknown = false;

    // Contract sanity: both predicates range over the state vector and agree
    // (an inductive contract asserts one invariant set).
    std::string contract_issue;
    for (const ParsedPredicate* pred : {&artifact.contract_pre, &artifact.contract_post}) {
        std::set<std::string> vars(pred->vars.begin(), pred->vars.end());
        std::set<std::string> states(program.state_vars.begin(), program.state_vars.end());
        if (vars != states) contract_issue = "contract predicates must range over the state vector";
    }
    if (contract_issue.empty() &&
        !supported_by(Fact{artifact.matrix(artifact.contract_pre.matrix),
                           artifact.contract_pre.vars},
                      artifact.matrix(artifact.contract_post.matrix),
                      artifact.contract_post.vars))
        contract_issue = "contract requires and ensures declare different invariants";

    // Established facts; a fact produced by an unproven triple is tainted and
    // cannot support later preconditions, which keeps refutations local and
    // reports honest Unknowns downstream of a break.
    std::vector<Fact> facts;
    facts.push_back(Fact{artifact.matrix(artifact.contract_pre.matrix), artifact.contract_pre.vars});

    const ParsedTriple* last_triple = nullptr;
    for (const auto& event : artifact.events) {
        const ParsedTriple* triple =
            event.triple_index >= 0 ? &artifact.triples[static_cast<std::size_t>(event.triple_index)]
                                    : nullptr;
        if (triple) {
            std::string break_at;
            for (const auto& pre : triple->pres) {
                if (pre.assumed) continue;
                const RationalMatrix& m = artifact.matrix(pre.matrix);
                bool ok = false;
                for (const auto& fact : facts)
                    if (supported_by(fact, m, pre.vars)) {
                        ok = true;
                        break;
                    }
                if (!ok) {
                    break_at = pre.matrix;
                    break;
                }
            }
            TripleResult result;
            if (break_at.empty()) {
                result = triple->tactic == Tactic::AffineEllipsoid
                             ? check_affine_triple(artifact, *triple)
                             : check_sproc_triple(artifact, *triple);
            } else {
                result.label = triple->label;
                result.rule = triple->tactic;
                result.verdict = TripleVerdict::Unknown;
                result.detail = "chain break: no established fact supports " + break_at;
            }
            if (result.verdict == TripleVerdict::Refuted) any_refuted = true;
            if (result.verdict == TripleVerdict::Unknown) any_unknown = true;
            report.triples.push_back(result);
            last_triple = triple;
            if (event.stmt_index >= 0) {
                const AffineAssignment& stmt =
                    program.stmts[static_cast<std::size_t>(event.stmt_index)];
                std::erase_if(facts, [&](const Fact& fact) {
                    return index_of(fact.vars, stmt.lhs) >= 0;
                });
            }
            if (result.verdict == TripleVerdict::Proven)
                facts.push_back(Fact{artifact.matrix(triple->post.matrix), triple->post.vars});
        } else if (event.stmt_index >= 0) {
            const AffineAssignment& stmt =
                program.stmts[static_cast<std::size_t>(event.stmt_index)];
            std::erase_if(facts, [&](const Fact& fact) {
                return index_of(fact.vars, stmt.lhs) >= 0;
            });
        }
    }

    // Final containment: last post must range over the states, then the
    // declared contract ellipsoid must contain it.
    if (!contract_issue.empty()) {
        report.final_detail = contract_issue;
        any_unknown = true;
    } else if (!last_triple) {
        report.final_detail = "no triples present";
        any_unknown = true;
    } else {
        std::set<std::string> post_vars(last_triple->post.vars.begin(),
                                        last_triple->post.vars.end());
        std::set<std::string> states(program.state_vars.begin(), program.state_vars.end());
        if (post_vars != states) {
            report.final_detail = "final post does not range over the state vector";
            any_unknown = true;
        } else {
            // Align by name with the contract's ordering.
            const RationalMatrix& gen = artifact.matrix(last_triple->post.matrix);
            std::vector<int> idx;
            for (const auto& v : artifact.contract_post.vars)
                idx.push_back(index_of(last_triple->post.vars, v));
            RationalMatrix aligned = extract_submatrix(gen, idx, idx);
            report.final_containment =
                check_final_containment(aligned, artifact.matrix(artifact.contract_post.matrix));
            report.final_containment_checked = true;
            report.final_detail =
                report.final_containment.proven_psd()
                    ? "generated ellipsoid is contained in the declared invariant"
                    : "generated ellipsoid escapes the declared invariant";
        }
    }

    bool final_ok =
        report.final_containment_checked && report.final_containment.proven_psd();
    if (any_refuted ||
        (report.final_containment_checked && report.final_containment.proven_not_psd()))
        report.overall = TripleVerdict::Refuted;
    else if (any_unknown || !final_ok)
        report.overall = TripleVerdict::Unknown;
    else
        report.overall = TripleVerdict::Proven;
    return report;
}

std::string report_to_json(const VerificationReport& report) {
    ordered_json j;
    j["overall"] = to_string(report.overall);
    j["triples"] = ordered_json::array();
    for (const auto& t : report.triples) {
        ordered_json jt;
        jt["label"] = t.label;
        jt["rule"] = to_string(t.rule);
        jt["verdict"] = to_string(t.verdict);
        if (t.by_containment) jt["by_containment"] = true;
        jt["detail"] = t.detail;
        j["triples"].push_back(jt);
    }
    ordered_json fc;
    if (report.final_containment_checked) {
        fc["verdict"] = to_string(report.final_containment.status);
        if (report.final_containment.margin)
            fc["margin"] = to_display_decimal(*report.final_containment.margin);
    } else {
        fc["verdict"] = "Unknown";
    }
    fc["detail"] = report.final_detail;
    j["final_containment"] = fc;
    if (report.lmi_check) j["lmi_check"] = to_string(report.lmi_check->status);
    j["epsilon"] = report.epsilon;
    j["tool_version"] = report.tool_version;
    return j.dump(2) + "\n";
}

}  // namespace credo
