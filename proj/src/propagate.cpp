#include "credo/propagate.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace credo {

const char* to_string(TransformRule r) {
    switch (r) {
        case TransformRule::AffineEllipsoid: return "AffineEllipsoid";
        case TransformRule::ReduceEllipsoid: return "ReduceEllipsoid";
        case TransformRule::SProcedure: return "SProcedure";
    }
    return "?";
}

namespace {

int support_index(const std::vector<std::string>& support, const std::string& var) {
    auto it = std::find(support.begin(), support.end(), var);
    return it == support.end() ? -1 : static_cast<int>(it - support.begin());
}

struct AffineStep {
    Ellipsoid post;
    RationalMatrix transform;
    RationalMatrix lifted_pre;  // pre matrix actually transformed (homogeneous lift if needed)
};

AffineStep affine_update_impl(const Ellipsoid& q, const AffineAssignment& a) {
    if (q.form != EllipsoidForm::QForm)
        throw PropagationError("affine_update requires a Q-form ellipsoid");
    const int n = q.matrix.rows();
    for (const auto& [v, c] : a.coeffs) {
        (void)c;
        if (support_index(q.support, v) < 0)
            throw NotApplicableError("affine_update: RHS variable \"" + v +
                                     "\" is outside the ellipsoid support");
    }

    const bool has_constant = a.constant != 0;
    // With a nonzero constant the set {(x, 1)} is covered by the S-procedure
    // combination of the ellipsoid with the singleton {1}: blockdiag(2Q, 2).
    RationalMatrix pre = q.matrix;
    int cols = n;
    if (has_constant) {
        std::vector<RationalMatrix> blocks{scalar_mult(Rational(2), q.matrix),
                                           RationalMatrix{{Rational(2)}}};
        pre = block_diag(blocks);
        cols = n + 1;
    }

    int lhs_at = support_index(q.support, a.lhs);
    std::vector<std::string> out_support = q.support;
    int rows;
    int psi_row;
    if (lhs_at < 0) {
        out_support.push_back(a.lhs);
        rows = n + 1;
        psi_row = n;
    } else {
        rows = n;
        psi_row = lhs_at;
    }

    RationalMatrix t(rows, cols);
    for (int i = 0; i < rows; ++i) {
        if (i == psi_row) continue;
        t.at(i, i) = 1;  // kept variables keep their (old) values
    }
    for (const auto& [v, c] : a.coeffs) t.at(psi_row, support_index(q.support, v)) = c;
    if (has_constant) t.at(psi_row, n) = a.constant;

    AffineStep step;
    step.transform = t;
    step.lifted_pre = pre;
    step.post = Ellipsoid{EllipsoidForm::QForm, multiply(multiply(t, pre), transpose(t)),
                          std::move(out_support), q.degenerate_ok};
    return step;
}

}  // namespace

Ellipsoid affine_update(const Ellipsoid& q, const AffineAssignment& a) {
    return affine_update_impl(q, a).post;
}

Ellipsoid reduce(const Ellipsoid& q, const std::string& drop) {
    int at = support_index(q.support, drop);
    if (at < 0)
        throw PropagationError("reduce: variable \"" + drop + "\" is not in the support");
    std::vector<int> keep;
    for (int i = 0; i < q.matrix.rows(); ++i)
        if (i != at) keep.push_back(i);
    Ellipsoid out;
    out.form = EllipsoidForm::QForm;
    out.matrix = extract_submatrix(q.matrix, keep, keep);
    out.support = q.support;
    out.support.erase(out.support.begin() + at);
    out.degenerate_ok = q.degenerate_ok;
    return out;
}

Ellipsoid sproc_combine(std::span<const std::pair<Ellipsoid, Rational>> parts) {
    if (parts.empty()) throw PropagationError("sproc_combine: no ellipsoids");
    Rational total(0);
    std::set<std::string> seen;
    std::vector<RationalMatrix> blocks;
    std::vector<std::string> support;
    for (const auto& [e, lambda] : parts) {
        if (e.form != EllipsoidForm::QForm)
            throw PropagationError("sproc_combine requires Q-form ellipsoids");
        if (!(lambda > 0)) throw MultiplierError("sproc_combine: multiplier must be positive");
        total += lambda;
        for (const auto& v : e.support)
            if (!seen.insert(v).second)
                throw PropagationError("sproc_combine: supports overlap on \"" + v + "\"");
        blocks.push_back(scalar_mult(Rational(1) / lambda, e.matrix));
        support.insert(support.end(), e.support.begin(), e.support.end());
    }
    if (total != 1) {
        std::string sum = to_display_decimal(total);
        throw MultiplierError("sproc_combine: multipliers sum to " + sum + ", expected 1");
    }
    return Ellipsoid{EllipsoidForm::QForm, block_diag(blocks), std::move(support)};
}

namespace {

struct Active {
    Ellipsoid e;
    Rational weight;
    int matrix_id = -1;     // -1: needs a fresh id at next use
    bool pending_assume = false;
    std::string label;
};

}  // namespace

PropagationResult propagate(const AnnotatedProgram& input) {
    const StraightLineProgram& program = input.program;
    const auto& stmts = program.stmts;

    // Backward liveness: last statement index reading each variable.
    std::map<std::string, int> last_read;
    for (int i = 0; i < static_cast<int>(stmts.size()); ++i)
        for (const auto& [v, c] : stmts[static_cast<std::size_t>(i)].coeffs) {
            (void)c;
            last_read[v] = i;
        }
    auto live_after = [&](int idx, const std::string& var) {
        if (program.is_state(var)) return true;
        auto it = last_read.find(var);
        return it != last_read.end() && it->second > idx;
    };

    PropagationResult result;
    result.annotated = input;
    result.annotated.triples.clear();

    std::vector<Active> actives;
    actives.push_back(Active{input.contract_pre, input.contract_mu, /*matrix_id=*/2, false,
                             input.contract_label});
    int next_id = 3;
    int next_label = 0;

    std::map<int, std::vector<const AssertiveAttachment*>> attachments;
    for (const auto& att : input.attachments) attachments[att.stmt_index].push_back(&att);

    std::set<std::string> defined(program.input_vars.begin(), program.input_vars.end());
    defined.insert(program.state_vars.begin(), program.state_vars.end());

    auto mint_pre_id = [&](Active& active) {
        if (active.matrix_id < 0) active.matrix_id = next_id++;
    };

    auto record_reduce = [&](const Ellipsoid& pre, const std::string& var, int idx) {
        TransformRecord rec;
        rec.rule = TransformRule::ReduceEllipsoid;
        rec.stmt_index = idx;
        int at = support_index(pre.support, var);
        RationalMatrix t(pre.matrix.rows() - 1, pre.matrix.rows());
        for (int i = 0, r = 0; i < pre.matrix.rows(); ++i) {
            if (i == at) continue;
            t.at(r++, i) = 1;
        }
        rec.transform = t;
        rec.in_supports = {pre.support};
        rec.in_matrices = {pre.matrix};
        Ellipsoid post = reduce(pre, var);
        rec.out_support = post.support;
        rec.out_matrix = post.matrix;
        result.records.push_back(std::move(rec));
        return post;
    };

    // Drops every dead variable from every active; actives whose support
    // empties out disappear. Shrunk actives need a fresh matrix id.
    auto sweep = [&](int idx) {
        for (auto it = actives.begin(); it != actives.end();) {
            bool shrunk = false;
            for (const auto& var : std::vector<std::string>(it->e.support)) {
                if (live_after(idx, var)) continue;
                it->e = record_reduce(it->e, var, idx);
                shrunk = true;
            }
            if (shrunk && !it->pending_assume) it->matrix_id = -1;
            if (it->e.support.empty())
                it = actives.erase(it);
            else
                ++it;
        }
    };

    for (int idx = 0; idx < static_cast<int>(stmts.size()); ++idx) {
        const AffineAssignment& stmt = stmts[static_cast<std::size_t>(idx)];

        if (auto att_it = attachments.find(idx); att_it != attachments.end()) {
            defined.insert(stmt.lhs);
            for (const AssertiveAttachment* att : att_it->second) {
                for (const auto& v : att->bound.support) {
                    if (!defined.count(v))
                        throw PropagationError("assertive bound \"" + att->label +
                                               "\" references \"" + v +
                                               "\" before it is defined");
                    for (const auto& active : actives)
                        if (support_index(active.e.support, v) >= 0)
                            throw PropagationError("assertive bound \"" + att->label +
                                                   "\" overlaps an active ellipsoid on \"" + v +
                                                   "\"");
                }
                actives.push_back(Active{att->bound, att->mu, -1, true, att->label});
            }
            sweep(idx);
            continue;
        }

        defined.insert(stmt.lhs);

        if (program.is_output(stmt.lhs)) {
            // Output writes leave the state proof untouched; the value flows
            // to the io structure and its sources die in the sweep.
            sweep(idx);
            continue;
        }

        // Owners of the RHS variables, in active order (inductive lineage first).
        std::vector<std::size_t> owners;
        for (std::size_t ai = 0; ai < actives.size(); ++ai)
            for (const auto& [v, c] : stmt.coeffs) {
                (void)c;
                if (support_index(actives[ai].e.support, v) >= 0) {
                    owners.push_back(ai);
                    break;
                }
            }
        for (const auto& [v, c] : stmt.coeffs) {
            (void)c;
            bool covered = false;
            for (const auto& active : actives)
                if (support_index(active.e.support, v) >= 0) covered = true;
            if (!covered)
                throw PropagationError("statement " + std::to_string(idx) + " (" + stmt.lhs +
                                       ") reads \"" + v +
                                       "\" which no active ellipsoid covers");
        }
        if (owners.empty()) {
            // Constant-only assignment: fold into the inductive lineage.
            owners.push_back(0);
        }

        if (owners.size() > 1) {
            Rational total(0);
            for (std::size_t ai : owners) total += actives[ai].weight;
            if (total != 1)
                throw MultiplierError("observer multipliers at statement " + std::to_string(idx) +
                                      " sum to " + to_display_decimal(total) + ", expected 1");
            HoareTriple skip;
            skip.stmt_index = -1;
            skip.tactic = Tactic::SProcedure;
            skip.label = "ellipsoid" + std::to_string(next_label++) + "_0";
            std::vector<std::pair<Ellipsoid, Rational>> parts;
            TransformRecord rec;
            rec.rule = TransformRule::SProcedure;
            rec.stmt_index = idx;
            for (std::size_t ai : owners) {
                mint_pre_id(actives[ai]);
                skip.pres.push_back(TriplePre{actives[ai].e, actives[ai].matrix_id,
                                              actives[ai].pending_assume});
                parts.emplace_back(actives[ai].e, actives[ai].weight);
                rec.multipliers.push_back(actives[ai].weight);
                rec.in_supports.push_back(actives[ai].e.support);
                rec.in_matrices.push_back(actives[ai].e.matrix);
            }
            Ellipsoid merged = sproc_combine(parts);
            rec.out_support = merged.support;
            rec.out_matrix = merged.matrix;
            result.records.push_back(rec);
            skip.post = merged;
            skip.post_matrix_id = next_id++;
            result.annotated.triples.push_back(skip);

            Active combined{std::move(merged), Rational(1),
                            result.annotated.triples.back().post_matrix_id, false,
                            "merged"};
            // Replace the first owner, drop the rest (reverse order keeps indices valid).
            actives[owners.front()] = std::move(combined);
            for (std::size_t r = owners.size(); r-- > 1;)
                actives.erase(actives.begin() + static_cast<std::ptrdiff_t>(owners[r]));
        }

        // The unique owner of every RHS variable now.
        std::size_t owner = 0;
        bool found = false;
        for (std::size_t ai = 0; ai < actives.size() && !found; ++ai)
            if (stmt.coeffs.empty() ||
                support_index(actives[ai].e.support, stmt.coeffs.front().first) >= 0) {
                owner = ai;
                found = true;
            }
        if (!found) throw PropagationError("internal: owner lost after merge");
        Active& active = actives[owner];
        mint_pre_id(active);

        HoareTriple triple;
        triple.stmt_index = idx;
        triple.tactic = Tactic::AffineEllipsoid;
        triple.label = "ellipsoid" + std::to_string(next_label++) + "_0";
        triple.pres.push_back(TriplePre{active.e, active.matrix_id, active.pending_assume});
        active.pending_assume = false;

        AffineStep step = affine_update_impl(active.e, stmt);
        {
            TransformRecord rec;
            rec.rule = TransformRule::AffineEllipsoid;
            rec.stmt_index = idx;
            rec.transform = step.transform;
            rec.in_supports = {active.e.support};
            rec.in_matrices = {step.lifted_pre};
            rec.out_support = step.post.support;
            rec.out_matrix = step.post.matrix;
            result.records.push_back(std::move(rec));
        }
        Ellipsoid post = step.post;
        for (const auto& var : std::vector<std::string>(post.support))
            if (var != stmt.lhs ? !live_after(idx, var)
                                : !(live_after(idx, var) || program.is_state(var)))
                post = record_reduce(post, var, idx);
        // The assigned variable survives unless it is itself already dead.
        triple.post = post;
        triple.post_matrix_id = next_id++;
        result.annotated.triples.push_back(triple);

        active.e = std::move(post);
        active.matrix_id = triple.post_matrix_id;

        sweep(idx);
    }

    // The inductive lineage must now cover exactly the state vector.
    const Active* state_active = nullptr;
    for (const auto& active : actives)
        if (support_index(active.e.support, program.state_vars.front()) >= 0)
            state_active = &active;
    if (!state_active)
        throw PropagationError("propagation lost the state ellipsoid");
    Ellipsoid final_e = state_active->e;
    for (const auto& var : std::vector<std::string>(final_e.support))
        if (!program.is_state(var)) final_e = record_reduce(final_e, var, static_cast<int>(stmts.size()));
    if (final_e.support != program.state_vars)
        throw PropagationError("final ellipsoid support is not the state vector in order");
    result.final_ellipsoid = final_e;
    result.final_matrix_id =
        state_active->matrix_id >= 0 ? state_active->matrix_id : next_id++;
    return result;
}

}  // namespace credo
