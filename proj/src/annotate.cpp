#include "credo/annotate.hpp"

#include <algorithm>

namespace credo {

const char* to_string(Tactic t) {
    return t == Tactic::AffineEllipsoid ? "AffineEllipsoid" : "SProcedure";
}

ObserverKind classify(const ObserverSpec& observer, const StraightLineProgram& program) {
    int memory = 0, memoryless = 0;
    std::vector<std::string> offending;
    for (const auto& v : observer.variables) {
        bool known = program.is_state(v) || program.is_input(v) || program.is_output(v) ||
                     program.is_temp(v);
        if (!known)
            throw AnnotationError("observer \"" + observer.label + "\" references unknown variable \"" +
                                  v + "\"");
        if (program.is_state(v))
            ++memory;
        else {
            ++memoryless;
            offending.push_back(v);
        }
    }
    ObserverKind derived;
    if (memory > 0 && memoryless == 0)
        derived = ObserverKind::Inductive;
    else if (memory == 0 && memoryless > 0)
        derived = ObserverKind::Assertive;
    else {
        std::string vars;
        for (const auto& v : offending) vars += (vars.empty() ? "" : ", ") + v;
        throw AnnotationError("observer \"" + observer.label +
                              "\" mixes memory and memoryless variables (non-memory: " + vars + ")");
    }
    if (observer.kind != ObserverKind::Auto && observer.kind != derived)
        throw AnnotationError("observer \"" + observer.label + "\" is declared " +
                              to_string(observer.kind) + " but its variables type as " +
                              to_string(derived));
    return derived;
}

int insert_assertive(const StraightLineProgram& program, const ObserverSpec& observer) {
    for (std::size_t i = 0; i < program.stmts.size(); ++i) {
        const std::string& lhs = program.stmts[i].lhs;
        if (std::find(observer.variables.begin(), observer.variables.end(), lhs) !=
            observer.variables.end())
            return static_cast<int>(i);
    }
    throw AnnotationError("no statement assigns a variable of assertive observer \"" +
                          observer.label + "\"");
}

AnnotatedProgram annotate(const ControllerSpec& spec, const StraightLineProgram& program) {
    AnnotatedProgram ap;
    ap.program = program;

    const ObserverSpec* inductive = nullptr;
    for (const auto& obs : spec.observers) {
        ObserverKind kind = classify(obs, program);
        if (kind == ObserverKind::Inductive) {
            if (inductive)
                throw AnnotationError("more than one inductive observer (\"" + inductive->label +
                                      "\" and \"" + obs.label + "\")");
            inductive = &obs;
        }
    }
    if (!inductive) throw AnnotationError("no inductive observer");

    // The inductive ellipsoid must cover the full state vector; propagation
    // keeps supports in state order.
    std::vector<std::string> support = program.state_vars;
    if (inductive->variables.size() != support.size())
        throw AnnotationError("inductive observer \"" + inductive->label +
                              "\" must cover every state variable");
    RationalMatrix q;
    {
        Ellipsoid declared{inductive->form, inductive->matrix, inductive->variables};
        Ellipsoid qform = to_qform(declared);
        // Reorder to canonical state order if the observer listed states
        // differently.
        std::vector<int> idx;
        for (const auto& s : support) {
            auto it = std::find(inductive->variables.begin(), inductive->variables.end(), s);
            if (it == inductive->variables.end())
                throw AnnotationError("inductive observer \"" + inductive->label +
                                      "\" does not cover state \"" + s + "\"");
            idx.push_back(static_cast<int>(it - inductive->variables.begin()));
        }
        q = extract_submatrix(qform.matrix, idx, idx);
    }
    ap.contract_pre = Ellipsoid{EllipsoidForm::QForm, q, support};
    ap.contract_post = ap.contract_pre;
    ap.contract_mu = inductive->mu;
    ap.contract_label = inductive->label;

    for (const auto& obs : spec.observers) {
        if (&obs == inductive) continue;
        int at = insert_assertive(program, obs);
        Ellipsoid bound = to_qform(Ellipsoid{obs.form, obs.matrix, obs.variables});
        ap.attachments.push_back(AssertiveAttachment{at, bound, obs.mu, obs.label});
    }
    std::stable_sort(ap.attachments.begin(), ap.attachments.end(),
                     [](const AssertiveAttachment& a, const AssertiveAttachment& b) {
                         return a.stmt_index < b.stmt_index;
                     });
    return ap;
}

}  // namespace credo
