#include <doctest.h>

#include "credo/pipeline.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

#include <regex>

using namespace credo;

namespace {

AutocodeResult run_fixture(const std::string& a11 = "0.4990") {
    return autocode(fixtures::running_example(a11));
}

ControllerSpec random_autonomous_spec(oracle::Rng& rng, int trial) {
    int n = rng.integer(1, 4), k = rng.integer(0, 2);
    ControllerSpec spec;
    spec.name = "rnd" + std::to_string(trial);
    spec.A = rng.matrix(n, n, 4, 2);
    spec.B = RationalMatrix::zero(n, 0);
    spec.C = rng.matrix(k, n, 4, 2);
    spec.D = RationalMatrix::zero(k, 0);
    for (int i = 0; i < n; ++i) spec.state_names.push_back("s" + std::to_string(i));
    for (int i = 0; i < k; ++i) spec.output_names.push_back("o" + std::to_string(i));
    spec.x0.assign(static_cast<std::size_t>(n), Rational(0));
    ObserverSpec stab;
    stab.label = "inv";
    stab.kind = ObserverKind::Inductive;
    stab.form = EllipsoidForm::PForm;
    stab.matrix = rng.pd(n);
    stab.mu = Rational(1, 2);
    stab.variables = spec.state_names;
    spec.observers.push_back(stab);
    return spec;
}

}  // namespace

TEST_CASE("emitted text carries the expected annotation tokens") {
    AutocodeResult r = run_fixture();
    const std::string& text = r.emission.text;

    // The assertive bound shows up as an assumption over Sum4.
    std::regex assumes(R"(assumes in_ellipsoidQ\(QMat_\d+,vect_of_1_scalar\(Sum4\)\);)");
    CHECK(std::regex_search(text, assumes));
    CHECK(text.find("PROOF_TACTIC (use_strategy (AffineEllipsoid));") != std::string::npos);
    CHECK(text.find("PROOF_TACTIC (use_strategy (SProcedure));") != std::string::npos);
    CHECK(text.find("requires \\valid(_io_) && \\valid(_state_);") != std::string::npos);
    CHECK(text.find("mat_of_1x1_scalar(0.5)") != std::string::npos);
    CHECK(text.find("Sum4 = _io_->y - _io_->yd;") != std::string::npos);
    CHECK(text.find("C11 = 564.48 * x1;") != std::string::npos);
    CHECK(text.find("_state_->Integrator_1 = Sum2;") != std::string::npos);

    // The inductive contract appears twice: on the function and at body start.
    std::regex state_pred(
        R"(in_ellipsoidQ\(QMat_\d+,vect_of_2_scalar\(_state_->Integrator_1,_state_->Integrator_2\)\))");
    auto begin = std::sregex_iterator(text.begin(), text.end(), state_pred);
    int contract_mentions = 0;
    for (auto it = begin; it != std::sregex_iterator(); ++it) ++contract_mentions;
    // requires + ensures on the function, requires at body start, and the
    // final generated post all hit the same shape.
    CHECK(contract_mentions >= 3);
}

TEST_CASE("emission is byte-deterministic") {
    AutocodeResult a = run_fixture();
    AutocodeResult b = run_fixture();
    CHECK(a.emission.text == b.emission.text);
}

TEST_CASE("plain C is emitted when nothing is annotated") {
    ControllerSpec spec = fixtures::literal_sextuple();
    StraightLineProgram program = lower(spec);
    AnnotatedProgram bare;
    bare.program = program;
    EmitResult r1 = emit_c(bare, spec.x0);
    EmitResult r2 = emit_c(bare, spec.x0);
    CHECK(r1.text == r2.text);
    CHECK(r1.text.find("/*@") == std::string::npos);
    CHECK(r1.text.find("_compute") != std::string::npos);
}

TEST_CASE("round-trip on the running example is lossless") {
    AutocodeResult r = run_fixture();
    ParsedArtifact parsed = parse_annotated_c(r.emission.text);

    CHECK(parsed.name == "discrete_timeg_no_plant_08b");
    CHECK(parsed.program.state_vars == r.program.state_vars);
    CHECK(parsed.program.input_vars == r.program.input_vars);
    CHECK(parsed.program.output_vars == r.program.output_vars);
    REQUIRE(parsed.program.stmts.size() == r.program.stmts.size());
    for (std::size_t i = 0; i < r.program.stmts.size(); ++i) {
        CHECK(parsed.program.stmts[i].lhs == r.program.stmts[i].lhs);
        CHECK(parsed.program.stmts[i].coeffs == r.program.stmts[i].coeffs);
        CHECK(parsed.program.stmts[i].constant == r.program.stmts[i].constant);
    }

    const auto& triples = r.propagation.annotated.triples;
    REQUIRE(parsed.triples.size() == triples.size());
    for (std::size_t i = 0; i < triples.size(); ++i) {
        CHECK(parsed.triples[i].label == triples[i].label);
        CHECK(parsed.triples[i].tactic == triples[i].tactic);
        CHECK(parsed.triples[i].stmt_index == triples[i].stmt_index);
        REQUIRE(parsed.triples[i].pres.size() == triples[i].pres.size());
        for (std::size_t p = 0; p < triples[i].pres.size(); ++p) {
            CHECK(parsed.triples[i].pres[p].assumed == triples[i].pres[p].assumed);
            CHECK(parsed.triples[i].pres[p].vars == triples[i].pres[p].ellipsoid.support);
            CHECK(parsed.matrix(parsed.triples[i].pres[p].matrix) ==
                  triples[i].pres[p].ellipsoid.matrix);
        }
        CHECK(parsed.triples[i].post.vars == triples[i].post.support);
        CHECK(parsed.matrix(parsed.triples[i].post.matrix) == triples[i].post.matrix);
    }

    // Contract matrices recover exactly.
    CHECK(parsed.matrix(parsed.contract_pre.matrix) ==
          r.propagation.annotated.contract_pre.matrix);
    CHECK(parsed.matrix(parsed.contract_post.matrix) ==
          r.propagation.annotated.contract_post.matrix);
}

TEST_CASE("round-trip holds on random annotated specs") {
    oracle::Rng rng(101);
    for (int trial = 0; trial < 20; ++trial) {
        ControllerSpec spec = random_autonomous_spec(rng, trial);
        AutocodeResult r = autocode(spec);
        ParsedArtifact parsed = parse_annotated_c(r.emission.text);
        REQUIRE(parsed.triples.size() == r.propagation.annotated.triples.size());
        for (std::size_t i = 0; i < parsed.triples.size(); ++i) {
            const auto& expect = r.propagation.annotated.triples[i];
            CHECK(parsed.matrix(parsed.triples[i].post.matrix) == expect.post.matrix);
            CHECK(parsed.triples[i].post.vars == expect.post.support);
        }
        REQUIRE(parsed.program.stmts.size() == r.program.stmts.size());
        for (std::size_t i = 0; i < r.program.stmts.size(); ++i)
            CHECK(parsed.program.stmts[i].coeffs == r.program.stmts[i].coeffs);
    }
}

TEST_CASE("fraction literals round-trip losslessly") {
    // The merged and scaled matrices have no terminating decimals, so the
    // emitted text must carry fraction literals that reparse exactly.
    AutocodeResult r = run_fixture();
    CHECK(!r.emission.fraction_rendered.empty());
    CHECK(r.emission.text.find("/83006929)") != std::string::npos);
    ParsedArtifact parsed = parse_annotated_c(r.emission.text);
    CHECK(parsed.matrix(parsed.contract_pre.matrix).at(0, 0) ==
          Rational(123255000000) / Rational(83006929));
}

TEST_CASE("hand-written annotation snippets parse") {
    std::string text = R"(typedef struct {
    double y;
    double u;
} t_tiny_io;

typedef struct {
    double s;
} t_tiny_state;

void tiny_init(t_tiny_state *_state_) {
    _state_->s = 0.0;
}

/*@ logic matrix QMat_0 = mat_of_1x1_scalar(0.5); */
/*@ logic matrix QMat_1 = mat_of_1x1_scalar(0.5); */
/*@ requires in_ellipsoidQ(QMat_0,vect_of_1_scalar(_state_->s));
  @ requires \valid(_io_) && \valid(_state_);
  @ ensures in_ellipsoidQ(QMat_1,vect_of_1_scalar(_state_->s));
*/
void tiny_compute(t_tiny_io *_io_, t_tiny_state *_state_) {
    /*@ logic matrix QMat_2 = mat_of_1x1_scalar(0.5); */
    /*@ logic matrix QMat_3 = mat_of_1x1_scalar(0.5); */
    /*@ behavior ellipsoid0_0:
      @ requires in_ellipsoidQ(QMat_2,vect_of_1_scalar(_state_->s));
      @ ensures in_ellipsoidQ(QMat_3,vect_of_1_scalar(_state_->s));
      @ PROOF_TACTIC (use_strategy (AffineEllipsoid));
    */
    {
        _state_->s = _state_->s;
    }
}
)";
    ParsedArtifact parsed = parse_annotated_c(text);
    CHECK(parsed.matrix("QMat_0") == RationalMatrix{{Rational(1, 2)}});
    REQUIRE(parsed.triples.size() == 1);
    CHECK(parsed.triples[0].tactic == Tactic::AffineEllipsoid);
}

TEST_CASE("parse errors carry locations") {
    AutocodeResult r = run_fixture();

    // Arity mismatch between the vector and the matrix.
    std::string bad = r.emission.text;
    auto at = bad.find("vect_of_2_scalar(_state_->Integrator_1,_state_->Integrator_2)");
    REQUIRE(at != std::string::npos);
    bad.replace(at, 16, "vect_of_3_scalar");
    CHECK_THROWS_AS(parse_annotated_c(bad), AnnotationParseError);

    // Unknown tactic name.
    std::string bad2 = r.emission.text;
    at = bad2.find("use_strategy (AffineEllipsoid)");
    REQUIRE(at != std::string::npos);
    bad2.replace(at, 30, "use_strategy (Mystery)");
    CHECK_THROWS_AS(parse_annotated_c(bad2), AnnotationParseError);

    // Reference to an undefined matrix.
    std::string bad3 = r.emission.text;
    at = bad3.find("in_ellipsoidQ(QMat_2,");
    REQUIRE(at != std::string::npos);
    bad3.replace(at, 21, "in_ellipsoidQ(QMat_99,");
    CHECK_THROWS_AS(parse_annotated_c(bad3), AnnotationParseError);

    // Empty file.
    try {
        parse_annotated_c("");
        FAIL_CHECK("expected a parse error");
    } catch (const AnnotationParseError& e) {
        CHECK(e.line() >= 1);
    }
}
