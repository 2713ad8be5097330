#include "credo/slp.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace credo {

namespace {

bool contains(const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
}

}  // namespace

bool StraightLineProgram::is_state(const std::string& v) const { return contains(state_vars, v); }
bool StraightLineProgram::is_input(const std::string& v) const { return contains(input_vars, v); }
bool StraightLineProgram::is_output(const std::string& v) const { return contains(output_vars, v); }
bool StraightLineProgram::is_temp(const std::string& v) const { return contains(temps, v); }

void validate_program(const StraightLineProgram& p) {
    std::set<std::string> known(p.input_vars.begin(), p.input_vars.end());
    known.insert(p.output_vars.begin(), p.output_vars.end());
    known.insert(p.state_vars.begin(), p.state_vars.end());
    known.insert(p.temps.begin(), p.temps.end());
    if (known.size() != p.input_vars.size() + p.output_vars.size() + p.state_vars.size() +
                            p.temps.size())
        throw ProgramError("variable name declared in more than one class");

    std::set<std::string> defined(p.input_vars.begin(), p.input_vars.end());
    defined.insert(p.state_vars.begin(), p.state_vars.end());
    for (std::size_t i = 0; i < p.stmts.size(); ++i) {
        const AffineAssignment& a = p.stmts[i];
        if (!known.count(a.lhs))
            throw ProgramError("statement " + std::to_string(i) + " assigns undeclared variable \"" +
                               a.lhs + "\"");
        if (p.is_input(a.lhs))
            throw ProgramError("statement " + std::to_string(i) + " assigns input \"" + a.lhs + "\"");
        std::set<std::string> seen;
        for (const auto& [v, c] : a.coeffs) {
            (void)c;
            if (!seen.insert(v).second)
                throw ProgramError("statement " + std::to_string(i) + " repeats variable \"" + v +
                                   "\"");
            if (!defined.count(v))
                throw ProgramError("statement " + std::to_string(i) + " reads \"" + v +
                                   "\" before definition");
        }
        defined.insert(a.lhs);
    }
    for (const auto& out : p.output_vars)
        if (!defined.count(out)) throw ProgramError("output \"" + out + "\" is never assigned");
    for (const auto& st : p.state_vars)
        if (!defined.count(st)) throw ProgramError("state \"" + st + "\" is never assigned");
}

namespace {

// Deterministic fresh-name table: generated names that collide with user
// names get a numeric suffix.
class NameTable {
public:
    explicit NameTable(const ControllerSpec& spec) {
        taken_.insert(spec.state_names.begin(), spec.state_names.end());
        taken_.insert(spec.input_names.begin(), spec.input_names.end());
        taken_.insert(spec.output_names.begin(), spec.output_names.end());
    }

    std::string fresh(const std::string& base) {
        std::string name = base;
        int suffix = 1;
        while (taken_.count(name)) name = base + "_" + std::to_string(suffix++);
        taken_.insert(name);
        return name;
    }

private:
    std::set<std::string> taken_;
};

struct RowTerm {
    std::string temp;                 // gain temp name
    std::string source;               // variable the gain reads
    Rational gain;
};

struct RowPlan {
    std::vector<RowTerm> terms;
    std::string sum_temp;  // empty when the row has <= 1 term
    std::string target;    // output var or state var written from this row
};

}  // namespace

StraightLineProgram lower(const ControllerSpec& spec) {
    validate_spec(spec);
    if (spec.n() == 0)
        throw ProgramError("lowering requires at least one state for inductive semantics");

    StraightLineProgram p;
    p.name = spec.name;
    p.input_vars = spec.input_names;
    p.output_vars = spec.output_names;
    p.state_vars = spec.state_names;
    NameTable names(spec);

    const int n = spec.n(), m = spec.m(), k = spec.k();

    // State copies x1..xn; gains read the copies so write-backs stay safe.
    std::vector<std::string> state_copy(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) state_copy[static_cast<std::size_t>(i)] = names.fresh("x" + std::to_string(i + 1));

    // Input-combination discovery: a D- or B-row whose nonzero coefficients
    // share one magnitude over >= 2 inputs is factored as gain * pattern, and
    // identical sign patterns share one combination temp.
    struct Combo {
        std::vector<int> signs;  // per raw input: -1, 0, +1
        std::string temp;        // assigned later, after row sums are numbered
    };
    std::vector<Combo> combos;
    // Per row of D then B: index into combos, or -1.
    auto analyze_row = [&](const RationalMatrix& mat, int row) -> std::pair<int, Rational> {
        std::vector<int> nz;
        for (int j = 0; j < m; ++j)
            if (mat.at(row, j) != 0) nz.push_back(j);
        if (nz.size() < 2) return {-1, Rational(0)};
        Rational magnitude = abs(mat.at(row, nz[0]));
        for (int j : nz)
            if (abs(mat.at(row, j)) != magnitude) return {-1, Rational(0)};
        // Canonical pattern: first nonzero is +1; the row gain carries its sign.
        Rational gain = mat.at(row, nz[0]);
        std::vector<int> signs(static_cast<std::size_t>(m), 0);
        for (int j : nz) signs[static_cast<std::size_t>(j)] = mat.at(row, j) == gain ? 1 : -1;
        for (std::size_t c = 0; c < combos.size(); ++c)
            if (combos[c].signs == signs) return {static_cast<int>(c), gain};
        combos.push_back(Combo{signs, {}});
        return {static_cast<int>(combos.size()) - 1, gain};
    };

    std::vector<std::pair<int, Rational>> d_row_combo, b_row_combo;
    for (int r = 0; r < k; ++r) d_row_combo.push_back(analyze_row(spec.D, r));
    for (int r = 0; r < n; ++r) b_row_combo.push_back(analyze_row(spec.B, r));

    // Plan output rows then state rows.
    std::vector<RowPlan> output_rows, state_rows;
    auto plan_row = [&](const RationalMatrix& state_mat, const RationalMatrix& input_mat,
                        const char* state_prefix, const char* input_prefix, int row,
                        const std::pair<int, Rational>& combo) {
        RowPlan plan;
        for (int j = 0; j < state_mat.cols(); ++j)
            if (state_mat.at(row, j) != 0)
                plan.terms.push_back(RowTerm{
                    names.fresh(state_prefix + std::to_string(row + 1) + std::to_string(j + 1)),
                    state_copy[static_cast<std::size_t>(j)], state_mat.at(row, j)});
        if (combo.first >= 0) {
            plan.terms.push_back(RowTerm{
                names.fresh(input_prefix + std::to_string(row + 1) + std::to_string(1)),
                /*source=*/"<combo:" + std::to_string(combo.first) + ">", combo.second});
        } else {
            for (int j = 0; j < input_mat.cols(); ++j)
                if (input_mat.at(row, j) != 0)
                    plan.terms.push_back(RowTerm{
                        names.fresh(input_prefix + std::to_string(row + 1) + std::to_string(j + 1)),
                        spec.input_names[static_cast<std::size_t>(j)], input_mat.at(row, j)});
        }
        return plan;
    };
    for (int r = 0; r < k; ++r) {
        RowPlan plan = plan_row(spec.C, spec.D, "C", "D", r, d_row_combo[static_cast<std::size_t>(r)]);
        plan.target = spec.output_names[static_cast<std::size_t>(r)];
        output_rows.push_back(std::move(plan));
    }
    for (int r = 0; r < n; ++r) {
        RowPlan plan = plan_row(spec.A, spec.B, "A", "B", r, b_row_combo[static_cast<std::size_t>(r)]);
        plan.target = spec.state_names[static_cast<std::size_t>(r)];
        state_rows.push_back(std::move(plan));
    }

    // Sum numbering: row-accumulation sums first (output rows, then state
    // rows), then input combinations in discovery order.
    int sum_counter = 1;
    for (auto* rows : {&output_rows, &state_rows})
        for (auto& plan : *rows)
            if (plan.terms.size() >= 2)
                plan.sum_temp = names.fresh("Sum" + std::to_string(sum_counter++));
    for (auto& combo : combos) combo.temp = names.fresh("Sum" + std::to_string(sum_counter++));

    auto resolve_source = [&](const std::string& source) -> std::string {
        if (source.rfind("<combo:", 0) == 0) {
            int idx = std::stoi(source.substr(7));
            return combos[static_cast<std::size_t>(idx)].temp;
        }
        return source;
    };

    auto push_stmt = [&](std::string lhs, std::vector<std::pair<std::string, Rational>> coeffs) {
        AffineAssignment a;
        a.lhs = std::move(lhs);
        a.coeffs = std::move(coeffs);
        p.stmts.push_back(std::move(a));
    };

    // 1. State copies.
    for (int i = 0; i < n; ++i) {
        p.temps.push_back(state_copy[static_cast<std::size_t>(i)]);
        push_stmt(state_copy[static_cast<std::size_t>(i)],
                  {{spec.state_names[static_cast<std::size_t>(i)], Rational(1)}});
    }
    // 2. Input combinations.
    for (const auto& combo : combos) {
        p.temps.push_back(combo.temp);
        std::vector<std::pair<std::string, Rational>> coeffs;
        for (int j = 0; j < m; ++j)
            if (combo.signs[static_cast<std::size_t>(j)] != 0)
                coeffs.emplace_back(spec.input_names[static_cast<std::size_t>(j)],
                                    Rational(combo.signs[static_cast<std::size_t>(j)]));
        push_stmt(combo.temp, std::move(coeffs));
    }
    // 3/4. Output rows, then state rows: gains, then the row sum.
    auto emit_row = [&](RowPlan& plan, bool write_target_now) {
        for (const auto& term : plan.terms) {
            p.temps.push_back(term.temp);
            push_stmt(term.temp, {{resolve_source(term.source), term.gain}});
        }
        std::string row_result;
        if (plan.terms.empty()) {
            row_result.clear();  // zero row
        } else if (plan.terms.size() == 1) {
            row_result = plan.terms[0].temp;
        } else {
            p.temps.push_back(plan.sum_temp);
            std::vector<std::pair<std::string, Rational>> coeffs;
            for (const auto& term : plan.terms) coeffs.emplace_back(term.temp, Rational(1));
            push_stmt(plan.sum_temp, std::move(coeffs));
            row_result = plan.sum_temp;
        }
        if (write_target_now) {
            if (row_result.empty())
                push_stmt(plan.target, {});
            else
                push_stmt(plan.target, {{row_result, Rational(1)}});
        }
        return row_result;
    };
    for (auto& plan : output_rows) emit_row(plan, /*write_target_now=*/true);
    std::vector<std::string> state_results;
    for (auto& plan : state_rows) state_results.push_back(emit_row(plan, /*write_target_now=*/false));
    // 5. State write-backs, last.
    for (int i = 0; i < n; ++i) {
        const std::string& result = state_results[static_cast<std::size_t>(i)];
        if (result.empty())
            push_stmt(spec.state_names[static_cast<std::size_t>(i)], {});
        else
            push_stmt(spec.state_names[static_cast<std::size_t>(i)], {{result, Rational(1)}});
    }

    validate_program(p);
    return p;
}

InterpretResult interpret(const StraightLineProgram& p, std::span<const Rational> inputs,
                          std::span<const Rational> state) {
    if (inputs.size() != p.input_vars.size())
        throw ProgramError("interpret: expected " + std::to_string(p.input_vars.size()) +
                           " inputs, got " + std::to_string(inputs.size()));
    if (state.size() != p.state_vars.size())
        throw ProgramError("interpret: expected " + std::to_string(p.state_vars.size()) +
                           " state values, got " + std::to_string(state.size()));
    std::map<std::string, Rational> env;
    for (std::size_t i = 0; i < inputs.size(); ++i) env[p.input_vars[i]] = inputs[i];
    for (std::size_t i = 0; i < state.size(); ++i) env[p.state_vars[i]] = state[i];

    for (std::size_t i = 0; i < p.stmts.size(); ++i) {
        const AffineAssignment& a = p.stmts[i];
        Rational value = a.constant;
        for (const auto& [v, c] : a.coeffs) {
            auto it = env.find(v);
            if (it == env.end())
                throw ProgramError("interpret: statement " + std::to_string(i) + " reads \"" + v +
                                   "\" before definition");
            value += c * it->second;
        }
        env[a.lhs] = value;
    }

    InterpretResult result;
    for (const auto& out : p.output_vars) {
        auto it = env.find(out);
        if (it == env.end()) throw ProgramError("interpret: output \"" + out + "\" never assigned");
        result.outputs.push_back(it->second);
    }
    for (const auto& st : p.state_vars) result.new_state.push_back(env.at(st));
    return result;
}

}  // namespace credo
