#include "credo/emit.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>

namespace credo {

namespace {

struct Renderer {
    const StraightLineProgram& program;
    std::ostringstream out;
    std::set<int> defined_matrices;
    std::set<std::string> fraction_rendered;

    explicit Renderer(const StraightLineProgram& p) : program(p) {}

    std::string var_ref(const std::string& v) const {
        if (program.is_state(v)) return "_state_->" + v;
        if (program.is_input(v) || program.is_output(v)) return "_io_->" + v;
        return v;
    }

    std::string matrix_name(int id) const { return "QMat_" + std::to_string(id); }

    std::string scalar(const Rational& r, const std::string& matrix) {
        if (auto dec = to_exact_decimal(r)) return *dec;
        fraction_rendered.insert(matrix);
        return to_fraction_literal(r);
    }

    // C-expression coefficient: exact decimal, or an explicit real division.
    std::string c_coeff(const Rational& r) {
        if (auto dec = to_exact_decimal(r)) return *dec;
        Int num = boost::multiprecision::numerator(r);
        Int den = boost::multiprecision::denominator(r);
        return "(" + num.str() + ".0 / " + den.str() + ".0)";
    }

    void matrix_def(int id, const RationalMatrix& m, const std::string& indent) {
        if (defined_matrices.count(id)) return;
        defined_matrices.insert(id);
        std::string name = matrix_name(id);
        out << indent << "/*@ logic matrix " << name << " = mat_of_" << m.rows() << "x"
            << m.cols() << "_scalar(";
        bool first = true;
        for (int i = 0; i < m.rows(); ++i)
            for (int j = 0; j < m.cols(); ++j) {
                if (!first) out << ",";
                first = false;
                out << scalar(m.at(i, j), name);
            }
        out << "); */\n";
    }

    std::string predicate(int id, const std::vector<std::string>& support) {
        std::string s = "in_ellipsoidQ(" + matrix_name(id) + ",vect_of_" +
                        std::to_string(support.size()) + "_scalar(";
        for (std::size_t i = 0; i < support.size(); ++i) {
            if (i) s += ",";
            s += var_ref(support[i]);
        }
        s += "))";
        return s;
    }

    std::string statement(const AffineAssignment& a) {
        std::string s = var_ref(a.lhs) + " = ";
        if (a.coeffs.empty() && a.constant == 0) return s + "0.0;";
        bool first = true;
        for (const auto& [v, c] : a.coeffs) {
            Rational coeff = c;
            if (first) {
                if (coeff < 0) {
                    s += "-";
                    coeff = -coeff;
                }
            } else {
                if (coeff < 0) {
                    s += " - ";
                    coeff = -coeff;
                } else {
                    s += " + ";
                }
            }
            first = false;
            if (coeff != 1) s += c_coeff(coeff) + " * ";
            s += var_ref(v);
        }
        if (a.constant != 0) {
            Rational c = a.constant;
            if (first) {
                s += c_coeff(c);
            } else if (c < 0) {
                s += " - " + c_coeff(-c);
            } else {
                s += " + " + c_coeff(c);
            }
        }
        return s + ";";
    }
};

}  // namespace

EmitResult emit_c(const AnnotatedProgram& annotated, std::span<const Rational> x0) {
    const StraightLineProgram& program = annotated.program;
    if (x0.size() != program.state_vars.size())
        throw ProgramError("emit_c: x0 arity does not match the state vector");

    Renderer r(program);
    const std::string& name = program.name;

    r.out << "/* " << name << ": discrete-time controller step function. */\n\n";

    r.out << "typedef struct {\n";
    for (const auto& v : program.input_vars) r.out << "    double " << v << ";\n";
    for (const auto& v : program.output_vars) r.out << "    double " << v << ";\n";
    r.out << "} t_" << name << "_io;\n\n";

    r.out << "typedef struct {\n";
    for (const auto& v : program.state_vars) r.out << "    double " << v << ";\n";
    r.out << "} t_" << name << "_state;\n\n";

    r.out << "void " << name << "_init(t_" << name << "_state *_state_) {\n";
    for (std::size_t i = 0; i < program.state_vars.size(); ++i)
        r.out << "    _state_->" << program.state_vars[i] << " = " << to_display_decimal(x0[i])
              << ";\n";
    r.out << "}\n\n";

    // Function contract: declared invariant as pre- and postcondition. An
    // un-annotated program emits plain C.
    const bool annotated_output = !annotated.contract_pre.support.empty();
    if (annotated_output) {
        r.matrix_def(0, annotated.contract_pre.matrix, "");
        r.matrix_def(1, annotated.contract_post.matrix, "");
        r.out << "/*@ requires " << r.predicate(0, annotated.contract_pre.support) << ";\n";
        r.out << "  @ requires \\valid(_io_) && \\valid(_state_);\n";
        r.out << "  @ ensures " << r.predicate(1, annotated.contract_post.support) << ";\n";
        r.out << "*/\n";
    }
    r.out << "void " << name << "_compute(t_" << name << "_io *_io_, t_" << name
          << "_state *_state_) {\n";

    // Temp declarations in first-assignment order.
    std::set<std::string> declared;
    for (const auto& stmt : program.stmts)
        if (program.is_temp(stmt.lhs) && declared.insert(stmt.lhs).second)
            r.out << "    double " << stmt.lhs << ";\n";
    r.out << "\n";

    // Triples indexed by statement; Skip triples keyed to the statement that
    // follows them.
    std::map<int, const HoareTriple*> by_stmt;
    std::map<int, std::vector<const HoareTriple*>> skips_before;
    {
        int next_stmt = static_cast<int>(program.stmts.size());
        for (auto it = annotated.triples.rbegin(); it != annotated.triples.rend(); ++it) {
            if (it->stmt_index >= 0) {
                by_stmt[it->stmt_index] = &*it;
                next_stmt = it->stmt_index;
            } else {
                skips_before[next_stmt].insert(skips_before[next_stmt].begin(), &*it);
            }
        }
    }

    auto emit_behavior = [&](const HoareTriple& t) {
        for (const auto& pre : t.pres) r.matrix_def(pre.matrix_id, pre.ellipsoid.matrix, "    ");
        r.matrix_def(t.post_matrix_id, t.post.matrix, "    ");
        r.out << "    /*@ behavior " << t.label << ":\n";
        for (const auto& pre : t.pres)
            r.out << "      @ " << (pre.assumed ? "assumes " : "requires ")
                  << r.predicate(pre.matrix_id, pre.ellipsoid.support) << ";\n";
        r.out << "      @ ensures " << r.predicate(t.post_matrix_id, t.post.support) << ";\n";
        r.out << "      @ PROOF_TACTIC (use_strategy (" << to_string(t.tactic) << "));\n";
        r.out << "    */\n";
    };

    for (int idx = 0; idx < static_cast<int>(program.stmts.size()); ++idx) {
        if (auto s = skips_before.find(idx); s != skips_before.end())
            for (const HoareTriple* t : s->second) {
                emit_behavior(*t);
                r.out << "    {\n    }\n";
            }
        if (auto t = by_stmt.find(idx); t != by_stmt.end()) emit_behavior(*t->second);
        r.out << "    {\n        " << r.statement(program.stmts[static_cast<std::size_t>(idx)])
              << "\n    }\n";
    }
    if (auto s = skips_before.find(static_cast<int>(program.stmts.size())); s != skips_before.end())
        for (const HoareTriple* t : s->second) {
            emit_behavior(*t);
            r.out << "    {\n    }\n";
        }
    r.out << "}\n";

    EmitResult result;
    result.text = r.out.str();
    result.fraction_rendered.assign(r.fraction_rendered.begin(), r.fraction_rendered.end());
    return result;
}

}  // namespace credo
