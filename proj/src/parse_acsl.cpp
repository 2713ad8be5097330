#include "credo/parse_acsl.hpp"

#include <algorithm>
#include <cstring>
#include <cctype>
#include <optional>
#include <set>

namespace credo {

const RationalMatrix& ParsedArtifact::matrix(const std::string& id) const {
    auto it = matrices.find(id);
    if (it == matrices.end())
        throw AnnotationParseError("undefined matrix \"" + id + "\"", 0, 0);
    return it->second;
}

namespace {

enum class TokKind { Ident, Number, Punct, AnnotStart, AnnotEnd, End };

struct Token {
    TokKind kind = TokKind::End;
    std::string text;
    int line = 0, column = 0;
};

// Tokenizes C-with-ACSL-comments. Annotation comments /*@ ... */ surface as
// AnnotStart/AnnotEnd with their contents tokenized in between ('@'
// continuation markers are skipped); plain comments disappear.
class Lexer {
public:
    explicit Lexer(const std::string& text) : text_(text) { tokenize(); }
    const std::vector<Token>& tokens() const { return tokens_; }

private:
    void tokenize() {
        bool in_annotation = false;
        while (pos_ < text_.size()) {
            char c = text_[pos_];
            if (c == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
                continue;
            }
            if (std::isspace(static_cast<unsigned char>(c))) {
                advance();
                continue;
            }
            if (!in_annotation && starts_with("/*@")) {
                push(TokKind::AnnotStart, "/*@");
                advance(3);
                in_annotation = true;
                continue;
            }
            if (in_annotation && starts_with("*/")) {
                push(TokKind::AnnotEnd, "*/");
                advance(2);
                in_annotation = false;
                continue;
            }
            if (!in_annotation && starts_with("/*")) {
                skip_block_comment();
                continue;
            }
            if (starts_with("//")) {
                while (pos_ < text_.size() && text_[pos_] != '\n') advance();
                continue;
            }
            if (in_annotation && c == '@') {
                advance();
                continue;
            }
            if (std::isalpha(static_cast<unsigned char>(c)) || c == '_' || c == '\\') {
                int l = line_, co = col_;
                std::string ident;
                if (c == '\\') {
                    ident += '\\';
                    advance();
                }
                while (pos_ < text_.size() &&
                       (std::isalnum(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '_')) {
                    ident += text_[pos_];
                    advance();
                }
                tokens_.push_back(Token{TokKind::Ident, ident, l, co});
                continue;
            }
            if (std::isdigit(static_cast<unsigned char>(c)) ||
                (c == '.' && pos_ + 1 < text_.size() &&
                 std::isdigit(static_cast<unsigned char>(text_[pos_ + 1])))) {
                int l = line_, co = col_;
                std::string num;
                while (pos_ < text_.size() &&
                       (std::isdigit(static_cast<unsigned char>(text_[pos_])) ||
                        text_[pos_] == '.' || text_[pos_] == 'e' || text_[pos_] == 'E' ||
                        ((text_[pos_] == '+' || text_[pos_] == '-') && !num.empty() &&
                         (num.back() == 'e' || num.back() == 'E')))) {
                    num += text_[pos_];
                    advance();
                }
                tokens_.push_back(Token{TokKind::Number, num, l, co});
                continue;
            }
            if (starts_with("->")) {
                push(TokKind::Punct, "->");
                advance(2);
                continue;
            }
            if (starts_with("&&")) {
                push(TokKind::Punct, "&&");
                advance(2);
                continue;
            }
            push(TokKind::Punct, std::string(1, c));
            advance();
        }
        tokens_.push_back(Token{TokKind::End, "", line_, col_});
    }

    bool starts_with(const char* s) const { return text_.compare(pos_, strlen(s), s) == 0; }

    void skip_block_comment() {
        advance(2);
        while (pos_ < text_.size() && !starts_with("*/")) {
            if (text_[pos_] == '\n') {
                ++line_;
                col_ = 1;
                ++pos_;
            } else {
                advance();
            }
        }
        if (pos_ < text_.size()) advance(2);
    }

    void push(TokKind kind, std::string text) {
        tokens_.push_back(Token{kind, std::move(text), line_, col_});
    }

    void advance(std::size_t n = 1) {
        pos_ += n;
        col_ += static_cast<int>(n);
    }

    const std::string& text_;
    std::size_t pos_ = 0;
    int line_ = 1, col_ = 1;
    std::vector<Token> tokens_;
};

class Parser {
public:
    explicit Parser(const std::string& text) : lexer_(text), toks_(lexer_.tokens()) {}

    ParsedArtifact parse() {
        parse_io_struct();
        parse_state_struct();
        parse_init();
        parse_contract_and_compute();
        finalize_program();
        return std::move(artifact_);
    }

private:
    [[noreturn]] void fail(const std::string& message) {
        const Token& t = peek();
        throw AnnotationParseError(message + " (near \"" + t.text + "\")", t.line, t.column);
    }

    const Token& peek(int ahead = 0) const {
        std::size_t i = std::min(pos_ + static_cast<std::size_t>(ahead), toks_.size() - 1);
        return toks_[i];
    }
    const Token& next() {
        const Token& t = toks_[std::min(pos_, toks_.size() - 1)];
        if (pos_ < toks_.size() - 1) ++pos_;
        return t;
    }
    bool at_punct(const std::string& p) const {
        return peek().kind == TokKind::Punct && peek().text == p;
    }
    bool at_ident(const std::string& s) const {
        return peek().kind == TokKind::Ident && peek().text == s;
    }
    void expect_punct(const std::string& p) {
        if (!at_punct(p)) fail("expected \"" + p + "\"");
        next();
    }
    std::string expect_ident() {
        if (peek().kind != TokKind::Ident) fail("expected identifier");
        return next().text;
    }
    void expect_keyword(const std::string& kw) {
        if (!at_ident(kw)) fail("expected \"" + kw + "\"");
        next();
    }

    Rational parse_number_literal() {
        bool negative = false;
        if (at_punct("-")) {
            next();
            negative = true;
        }
        if (at_punct("(")) {
            // Fraction literal (num/den), either side possibly negative.
            next();
            bool num_neg = false;
            if (at_punct("-")) {
                next();
                num_neg = true;
            }
            if (peek().kind != TokKind::Number) fail("expected numerator");
            Rational num = parse_decimal(next().text);
            if (num_neg) num = -num;
            expect_punct("/");
            bool den_neg = false;
            if (at_punct("-")) {
                next();
                den_neg = true;
            }
            if (peek().kind != TokKind::Number) fail("expected denominator");
            Rational den = parse_decimal(next().text);
            if (den_neg) den = -den;
            expect_punct(")");
            if (den == 0) fail("zero denominator in fraction literal");
            Rational value = num / den;
            return negative ? -value : value;
        }
        if (peek().kind != TokKind::Number) fail("expected numeric literal");
        const Token& t = next();
        Rational value;
        try {
            value = parse_decimal(t.text);
        } catch (const ParseError& e) {
            throw AnnotationParseError(e.what(), t.line, t.column);
        }
        return negative ? -value : value;
    }

    void parse_io_struct() {
        expect_keyword("typedef");
        expect_keyword("struct");
        expect_punct("{");
        while (!at_punct("}")) {
            expect_keyword("double");
            io_fields_.push_back(expect_ident());
            expect_punct(";");
        }
        expect_punct("}");
        std::string tag = expect_ident();
        expect_punct(";");
        if (tag.size() > 5 && tag.rfind("t_", 0) == 0 && tag.substr(tag.size() - 3) == "_io")
            artifact_.name = tag.substr(2, tag.size() - 5);
        else
            fail("io struct tag must look like t_<name>_io");
    }

    void parse_state_struct() {
        expect_keyword("typedef");
        expect_keyword("struct");
        expect_punct("{");
        while (!at_punct("}")) {
            expect_keyword("double");
            artifact_.program.state_vars.push_back(expect_ident());
            expect_punct(";");
        }
        expect_punct("}");
        expect_ident();
        expect_punct(";");
    }

    void parse_init() {
        expect_keyword("void");
        expect_ident();
        expect_punct("(");
        while (!at_punct(")")) next();
        expect_punct(")");
        skip_braced_block();
    }

    void skip_braced_block() {
        expect_punct("{");
        int depth = 1;
        while (depth > 0) {
            if (peek().kind == TokKind::End) fail("unterminated block");
            if (at_punct("{")) ++depth;
            if (at_punct("}")) --depth;
            next();
        }
    }

    ParsedPredicate parse_predicate() {
        expect_keyword("in_ellipsoidQ");
        expect_punct("(");
        ParsedPredicate pred;
        pred.matrix = expect_ident();
        expect_punct(",");
        std::string vect = expect_ident();
        if (vect.rfind("vect_of_", 0) != 0 ||
            vect.substr(vect.size() - std::min<std::size_t>(7, vect.size())) != "_scalar")
            fail("expected vect_of_<n>_scalar");
        int arity = 0;
        try {
            arity = std::stoi(vect.substr(8, vect.size() - 8 - 7));
        } catch (...) {
            fail("malformed vector arity in \"" + vect + "\"");
        }
        expect_punct("(");
        while (true) {
            pred.vars.push_back(parse_lvalue());
            if (at_punct(",")) {
                next();
                continue;
            }
            break;
        }
        expect_punct(")");
        expect_punct(")");
        if (static_cast<int>(pred.vars.size()) != arity)
            fail("vector arity " + std::to_string(arity) + " does not match " +
                 std::to_string(pred.vars.size()) + " variables");
        auto m = artifact_.matrices.find(pred.matrix);
        if (m == artifact_.matrices.end()) fail("reference to undefined matrix " + pred.matrix);
        if (m->second.rows() != static_cast<int>(pred.vars.size()))
            fail("matrix " + pred.matrix + " is " + m->second.shape_string() + " but the vector has " +
                 std::to_string(pred.vars.size()) + " entries");
        return pred;
    }

    std::string parse_lvalue() {
        std::string base = expect_ident();
        if (base == "_io_" || base == "_state_") {
            expect_punct("->");
            std::string field = expect_ident();
            if (base == "_io_") io_refs_.insert(field);
            return field;
        }
        return base;
    }

    void parse_matrix_def() {
        expect_keyword("logic");
        expect_keyword("matrix");
        std::string name = expect_ident();
        expect_punct("=");
        std::string ctor = expect_ident();
        if (ctor.rfind("mat_of_", 0) != 0) fail("expected mat_of_<r>x<c>_scalar");
        std::string dims = ctor.substr(7, ctor.size() - 7 - 7);
        auto x = dims.find('x');
        if (x == std::string::npos) fail("malformed matrix constructor \"" + ctor + "\"");
        int rows = 0, cols = 0;
        try {
            rows = std::stoi(dims.substr(0, x));
            cols = std::stoi(dims.substr(x + 1));
        } catch (...) {
            fail("malformed matrix dimensions in \"" + ctor + "\"");
        }
        expect_punct("(");
        RationalMatrix m(rows, cols);
        for (int i = 0; i < rows; ++i)
            for (int j = 0; j < cols; ++j) {
                if (i + j > 0) expect_punct(",");
                m.at(i, j) = parse_number_literal();
            }
        expect_punct(")");
        expect_punct(";");
        if (artifact_.matrices.count(name)) fail("matrix " + name + " defined twice");
        artifact_.matrices.emplace(name, std::move(m));
    }

    // Contract annotation plus any preceding matrix definitions.
    void parse_contract_and_compute() {
        bool have_contract = false;
        while (peek().kind == TokKind::AnnotStart) {
            next();
            if (at_ident("logic")) {
                parse_matrix_def();
                if (peek().kind != TokKind::AnnotEnd) fail("expected */ after matrix definition");
                next();
                continue;
            }
            // Function contract.
            have_contract = true;
            expect_keyword("requires");
            artifact_.contract_pre = parse_predicate();
            expect_punct(";");
            expect_keyword("requires");
            if (next().text != "\\valid") fail("expected \\valid(_io_)");
            expect_punct("(");
            expect_ident();
            expect_punct(")");
            expect_punct("&&");
            if (next().text != "\\valid") fail("expected \\valid(_state_)");
            expect_punct("(");
            expect_ident();
            expect_punct(")");
            expect_punct(";");
            expect_keyword("ensures");
            artifact_.contract_post = parse_predicate();
            expect_punct(";");
            if (peek().kind != TokKind::AnnotEnd) fail("expected */ after contract");
            next();
            break;
        }
        if (!have_contract) fail("missing function contract");

        expect_keyword("void");
        std::string fn = expect_ident();
        if (fn != artifact_.name + "_compute") fail("expected " + artifact_.name + "_compute");
        expect_punct("(");
        while (!at_punct(")")) next();
        expect_punct(")");
        expect_punct("{");

        // Local declarations.
        while (at_ident("double")) {
            next();
            expect_ident();
            expect_punct(";");
        }

        std::optional<ParsedTriple> pending;
        while (!at_punct("}")) {
            if (peek().kind == TokKind::End) fail("unterminated compute body");
            if (peek().kind == TokKind::AnnotStart) {
                next();
                if (at_ident("logic")) {
                    parse_matrix_def();
                } else if (at_ident("behavior")) {
                    if (pending) fail("behavior without a following block");
                    pending = parse_behavior();
                } else {
                    fail("unexpected annotation");
                }
                if (peek().kind != TokKind::AnnotEnd) fail("expected */");
                next();
                continue;
            }
            if (at_punct("{")) {
                next();
                if (at_punct("}")) {
                    next();  // Skip statement
                    if (pending) {
                        pending->stmt_index = -1;
                        artifact_.triples.push_back(std::move(*pending));
                        pending.reset();
                        artifact_.events.push_back(
                            {static_cast<int>(artifact_.triples.size()) - 1, -1});
                    }
                    // a bare empty block carries no information
                    continue;
                }
                int stmt_index = parse_statement();
                expect_punct("}");
                int triple_index = -1;
                if (pending) {
                    pending->stmt_index = stmt_index;
                    artifact_.triples.push_back(std::move(*pending));
                    pending.reset();
                    triple_index = static_cast<int>(artifact_.triples.size()) - 1;
                }
                artifact_.events.push_back({triple_index, stmt_index});
                continue;
            }
            fail("expected a braced statement or an annotation");
        }
        next();  // closing brace of compute
        if (pending) fail("behavior at end of function without a statement");
    }

    ParsedTriple parse_behavior() {
        expect_keyword("behavior");
        ParsedTriple triple;
        triple.label = expect_ident();
        expect_punct(":");
        bool saw_ensures = false;
        while (!saw_ensures) {
            if (at_ident("assumes") || at_ident("requires")) {
                bool assumed = peek().text == "assumes";
                next();
                ParsedPredicate pre = parse_predicate();
                pre.assumed = assumed;
                triple.pres.push_back(std::move(pre));
                expect_punct(";");
            } else if (at_ident("ensures")) {
                next();
                triple.post = parse_predicate();
                expect_punct(";");
                saw_ensures = true;
            } else {
                fail("expected assumes/requires/ensures");
            }
        }
        expect_keyword("PROOF_TACTIC");
        expect_punct("(");
        expect_keyword("use_strategy");
        expect_punct("(");
        std::string tactic = expect_ident();
        if (tactic == "AffineEllipsoid")
            triple.tactic = Tactic::AffineEllipsoid;
        else if (tactic == "SProcedure")
            triple.tactic = Tactic::SProcedure;
        else
            fail("unknown proof tactic \"" + tactic + "\"");
        expect_punct(")");
        expect_punct(")");
        expect_punct(";");
        return triple;
    }

    int parse_statement() {
        std::string lhs = parse_lvalue();
        bool lhs_is_io = io_refs_.count(lhs) > 0;
        expect_punct("=");
        AffineAssignment a;
        a.lhs = lhs;
        bool first = true;
        while (!at_punct(";")) {
            Rational sign(1);
            if (at_punct("-")) {
                next();
                sign = -1;
            } else if (at_punct("+")) {
                if (first) fail("unexpected leading +");
                next();
            } else if (!first) {
                fail("expected + or - between terms");
            }
            first = false;
            // term := number ["*" lvalue] | "(" number "/" number ")" ["*" lvalue] | lvalue
            if (peek().kind == TokKind::Number || at_punct("(")) {
                Rational value = parse_number_literal();
                if (at_punct("*")) {
                    next();
                    std::string var = parse_lvalue();
                    a.coeffs.emplace_back(var, sign * value);
                } else {
                    a.constant += sign * value;
                }
            } else {
                std::string var = parse_lvalue();
                a.coeffs.emplace_back(var, sign);
            }
        }
        expect_punct(";");
        if (lhs_is_io) io_written_.insert(lhs);
        artifact_.program.stmts.push_back(std::move(a));
        return static_cast<int>(artifact_.program.stmts.size()) - 1;
    }

    void finalize_program() {
        artifact_.program.name = artifact_.name;
        // io fields: written ones are outputs, the rest inputs (struct order).
        for (const auto& f : io_fields_) {
            if (io_written_.count(f))
                artifact_.program.output_vars.push_back(f);
            else
                artifact_.program.input_vars.push_back(f);
        }
        std::set<std::string> known(artifact_.program.state_vars.begin(),
                                    artifact_.program.state_vars.end());
        known.insert(io_fields_.begin(), io_fields_.end());
        std::set<std::string> temps_seen;
        for (const auto& stmt : artifact_.program.stmts)
            if (!known.count(stmt.lhs) && temps_seen.insert(stmt.lhs).second)
                artifact_.program.temps.push_back(stmt.lhs);
        validate_program(artifact_.program);
    }

    Lexer lexer_;
    const std::vector<Token>& toks_;
    std::size_t pos_ = 0;
    ParsedArtifact artifact_;
    std::vector<std::string> io_fields_;
    std::set<std::string> io_refs_;
    std::set<std::string> io_written_;
};

}  // namespace

ParsedArtifact parse_annotated_c(const std::string& text) { return Parser(text).parse(); }

}  // namespace credo
