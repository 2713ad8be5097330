#include <doctest.h>

#include "credo/propagate.hpp"

#include "fixtures.hpp"
#include "oracles.hpp"

using namespace credo;

namespace {

Ellipsoid qform(RationalMatrix m, std::vector<std::string> vars) {
    return Ellipsoid{EllipsoidForm::QForm, std::move(m), std::move(vars)};
}

AffineAssignment assign(std::string lhs, std::vector<std::pair<std::string, Rational>> coeffs,
                        Rational constant = Rational(0)) {
    return AffineAssignment{std::move(lhs), std::move(coeffs), std::move(constant)};
}

}  // namespace

TEST_CASE("affine_update appends a new variable") {
    Ellipsoid q = qform(RationalMatrix::identity(1), {"x"});
    Ellipsoid out = affine_update(q, assign("z", {{"x", Rational(2)}}));
    CHECK(out.support == std::vector<std::string>{"x", "z"});
    CHECK(out.matrix == RationalMatrix::from_strings({{"1", "2"}, {"2", "4"}}));
}

TEST_CASE("affine_update replaces a reassigned variable in place") {
    Ellipsoid q = qform(RationalMatrix::identity(1), {"x"});
    Ellipsoid out = affine_update(q, assign("x", {{"x", Rational(2)}}));
    CHECK(out.support == std::vector<std::string>{"x"});
    CHECK(out.matrix == RationalMatrix::from_strings({{"4"}}));
}

TEST_CASE("affine_update matches the gain-row construction") {
    // 3-variable ellipsoid, C11 := 564.48 * Integrator_1: T = [I3; (0,0,gain)].
    oracle::Rng rng(81);
    RationalMatrix q3 = rng.psd(3);
    Ellipsoid q = qform(q3, {"a", "b", "Integrator_1"});
    Ellipsoid out = affine_update(q, assign("C11", {{"Integrator_1", Rational(14112, 25)}}));
    RationalMatrix t(4, 3);
    t.at(0, 0) = 1;
    t.at(1, 1) = 1;
    t.at(2, 2) = 1;
    t.at(3, 2) = Rational(14112, 25);
    CHECK(out.matrix == multiply(multiply(t, q3), transpose(t)));
}

TEST_CASE("affine_update rejects RHS outside the support") {
    Ellipsoid q = qform(RationalMatrix::identity(1), {"x"});
    CHECK_THROWS_AS(affine_update(q, assign("z", {{"w", Rational(1)}})), NotApplicableError);
}

TEST_CASE("affine constants go through the homogeneous lift soundly") {
    Ellipsoid q = qform(RationalMatrix::identity(1), {"x"});
    Ellipsoid out = affine_update(q, assign("z", {{"x", Rational(1)}}, Rational(1)));
    CHECK(out.support == std::vector<std::string>{"x", "z"});
    // Sampled soundness: x in [-1,1] implies (x, x+1) in the lifted set.
    oracle::Rng rng(83);
    for (int i = 0; i < 300; ++i) {
        Rational x = Rational(rng.integer(-1000, 1000), 1000);
        std::vector<Rational> point{x, x + 1};
        CHECK(contains_point_qform(out.matrix, point));
    }
}

TEST_CASE("reduce deletes rows and columns") {
    Ellipsoid q = qform(RationalMatrix::from_strings({{"1", "0"}, {"0", "2"}}), {"a", "b"});
    Ellipsoid out = reduce(q, "b");
    CHECK(out.support == std::vector<std::string>{"a"});
    CHECK(out.matrix == RationalMatrix::from_strings({{"1"}}));

    Ellipsoid q3 = qform(RationalMatrix::from_strings({{"1", "0", "0"}, {"0", "2", "0"}, {"0", "0", "3"}}),
                         {"a", "b", "c"});
    Ellipsoid mid = reduce(q3, "b");
    CHECK(mid.matrix == RationalMatrix::from_strings({{"1", "0"}, {"0", "3"}}));
    CHECK_THROWS_AS(reduce(q3, "zz"), PropagationError);
}

TEST_CASE("reduce is a sound projection") {
    oracle::Rng rng(87);
    for (int trial = 0; trial < 100; ++trial) {
        int n = rng.integer(2, 4);
        RationalMatrix qm = rng.psd(n);
        std::vector<std::string> vars;
        for (int i = 0; i < n; ++i) vars.push_back("v" + std::to_string(i));
        Ellipsoid q = qform(qm, vars);
        auto x = oracle::sample_in_qform(rng, qm);
        int drop = rng.integer(0, n - 1);
        Ellipsoid projected = reduce(q, vars[static_cast<std::size_t>(drop)]);
        std::vector<Rational> px;
        for (int i = 0; i < n; ++i)
            if (i != drop) px.push_back(x[static_cast<std::size_t>(i)]);
        CHECK(contains_point_qform(projected.matrix, px));
    }
}

TEST_CASE("sproc_combine scales blocks by reciprocal multipliers") {
    std::vector<std::pair<Ellipsoid, Rational>> parts;
    parts.emplace_back(qform(RationalMatrix::identity(1), {"a"}), Rational(1, 2));
    parts.emplace_back(qform(RationalMatrix::identity(1), {"b"}), Rational(1, 2));
    Ellipsoid out = sproc_combine(parts);
    CHECK(out.support == std::vector<std::string>{"a", "b"});
    CHECK(out.matrix == RationalMatrix::from_strings({{"2", "0"}, {"0", "2"}}));
}

TEST_CASE("sproc_combine validates multipliers and supports") {
    std::vector<std::pair<Ellipsoid, Rational>> bad;
    bad.emplace_back(qform(RationalMatrix::identity(1), {"a"}), Rational(9, 10));
    bad.emplace_back(qform(RationalMatrix::identity(1), {"b"}), Rational(2, 10));
    CHECK_THROWS_AS(sproc_combine(bad), MultiplierError);

    std::vector<std::pair<Ellipsoid, Rational>> overlap;
    overlap.emplace_back(qform(RationalMatrix::identity(1), {"a"}), Rational(1, 2));
    overlap.emplace_back(qform(RationalMatrix::identity(1), {"a"}), Rational(1, 2));
    CHECK_THROWS_AS(sproc_combine(overlap), PropagationError);

    std::vector<std::pair<Ellipsoid, Rational>> nonpos;
    nonpos.emplace_back(qform(RationalMatrix::identity(1), {"a"}), Rational(0));
    nonpos.emplace_back(qform(RationalMatrix::identity(1), {"b"}), Rational(1));
    CHECK_THROWS_AS(sproc_combine(nonpos), MultiplierError);
}

TEST_CASE("sproc_combine membership mirrors the combination lemma") {
    oracle::Rng rng(91);
    for (int trial = 0; trial < 100; ++trial) {
        RationalMatrix q1 = rng.psd(rng.integer(1, 3));
        RationalMatrix q2 = rng.psd(rng.integer(1, 3));
        std::vector<std::string> v1, v2;
        for (int i = 0; i < q1.rows(); ++i) v1.push_back("x" + std::to_string(i));
        for (int i = 0; i < q2.rows(); ++i) v2.push_back("y" + std::to_string(i));
        Rational lambda(rng.integer(1, 9), 10);
        std::vector<std::pair<Ellipsoid, Rational>> parts;
        parts.emplace_back(qform(q1, v1), lambda);
        parts.emplace_back(qform(q2, v2), Rational(1) - lambda);
        Ellipsoid combined = sproc_combine(parts);
        auto p1 = oracle::sample_in_qform(rng, q1);
        auto p2 = oracle::sample_in_qform(rng, q2);
        std::vector<Rational> z = p1;
        z.insert(z.end(), p2.begin(), p2.end());
        CHECK(contains_point_qform(combined.matrix, z));
    }
}

namespace {

PropagationResult propagate_running(const std::string& a11 = "0.4990") {
    ControllerSpec spec = fixtures::running_example(a11);
    StraightLineProgram p = lower(spec);
    return propagate(annotate(spec, p));
}

}  // namespace

TEST_CASE("propagation of the running example has the expected structure") {
    PropagationResult r = propagate_running();
    const auto& triples = r.annotated.triples;
    REQUIRE(!triples.empty());

    // First triple: the state copy, from the body-start contract copy (id 2).
    CHECK(triples[0].stmt_index >= 0);
    CHECK(triples[0].pres.size() == 1);
    CHECK(triples[0].pres[0].matrix_id == 2);
    CHECK(triples[0].pres[0].ellipsoid.matrix == r.annotated.contract_pre.matrix);

    // Exactly one S-procedure skip triple merging the 5-var and 2-var sets.
    int sproc_count = 0;
    for (const auto& t : triples)
        if (t.tactic == Tactic::SProcedure) {
            ++sproc_count;
            CHECK(t.stmt_index == -1);
            REQUIRE(t.pres.size() == 2);
            CHECK(t.pres[0].ellipsoid.support.size() == 5);
            CHECK(t.pres[1].ellipsoid.support.size() == 2);
            CHECK(t.post.support.size() == 7);
            CHECK(t.pres[1].ellipsoid.support ==
                  std::vector<std::string>{"Sum4", "D11"});
        }
    CHECK(sproc_count == 1);

    // The assertive bound enters as an assumed precondition exactly once, on
    // the first triple that consumes it (the D11 gain).
    int assumed_count = 0;
    for (const auto& t : triples)
        for (const auto& pre : t.pres)
            if (pre.assumed) {
                ++assumed_count;
                CHECK(pre.ellipsoid.matrix.at(0, 0) == Rational(1, 2));
                CHECK(pre.ellipsoid.support == std::vector<std::string>{"Sum4"});
                REQUIRE(t.stmt_index >= 0);
                CHECK(r.annotated.program.stmts[static_cast<std::size_t>(t.stmt_index)].lhs ==
                      "D11");
            }
    CHECK(assumed_count == 1);

    // The S-procedure record carries the declared multipliers.
    bool found_record = false;
    for (const auto& rec : r.records)
        if (rec.rule == TransformRule::SProcedure) {
            found_record = true;
            REQUIRE(rec.multipliers.size() == 2);
            CHECK(rec.multipliers[0] == Rational(9991, 10000));
            CHECK(rec.multipliers[1] == Rational(9, 10000));
            CHECK(Rational(1) / rec.multipliers[0] == Rational(10000, 9991));
            CHECK(Rational(1) / rec.multipliers[1] == Rational(10000, 9));
        }
    CHECK(found_record);

    // Final generated ellipsoid: 2x2 over the states, in order.
    CHECK(r.final_ellipsoid.support == std::vector<std::string>{"Integrator_1", "Integrator_2"});
    CHECK(r.final_ellipsoid.matrix.rows() == 2);
}

TEST_CASE("generated ellipsoid matches the closed-form image") {
    // Q_gen = [A Beff] blockdiag(Q0/l1, Qin/l2) [A Beff]^T for the effective
    // single-channel system; the statement chain must reproduce it exactly.
    PropagationResult r = propagate_running();
    ControllerSpec spec = fixtures::running_example();
    RationalMatrix q0 = invert(spec.observers[0].matrix);
    RationalMatrix m(2, 3);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) m.at(i, j) = spec.A.at(i, j);
    m.at(0, 2) = Rational(1, 100);
    m.at(1, 2) = Rational(0);
    std::vector<RationalMatrix> blocks{scalar_mult(Rational(10000, 9991), q0),
                                       scalar_mult(Rational(10000, 9),
                                                   RationalMatrix{{Rational(1, 2)}})};
    RationalMatrix w = block_diag(blocks);
    RationalMatrix expected = multiply(multiply(m, w), transpose(m));
    CHECK(r.final_ellipsoid.matrix == expected);
}

TEST_CASE("correct gains pass containment, flipped gains fail") {
    ControllerSpec spec = fixtures::running_example();
    RationalMatrix q_decl = invert(spec.observers[0].matrix);

    PropagationResult good = propagate_running();
    CHECK(ldlt_psd(sub(q_decl, good.final_ellipsoid.matrix)).proven_psd());

    PropagationResult bad = propagate_running("-0.4990");
    CHECK(ldlt_psd(sub(q_decl, bad.final_ellipsoid.matrix)).proven_not_psd());
}

TEST_CASE("identity statement keeps the contract ellipsoid") {
    StraightLineProgram p;
    p.name = "idstep";
    p.state_vars = {"s"};
    p.stmts = {assign("s", {{"s", Rational(1)}})};
    AnnotatedProgram ap;
    ap.program = p;
    ap.contract_pre = qform(RationalMatrix::identity(1), {"s"});
    ap.contract_post = ap.contract_pre;
    ap.contract_mu = Rational(1, 2);
    ap.contract_label = "inv";
    PropagationResult r = propagate(ap);
    CHECK(r.final_ellipsoid.matrix == RationalMatrix::identity(1));
    REQUIRE(r.annotated.triples.size() == 1);
    CHECK(r.annotated.triples[0].post.matrix == RationalMatrix::identity(1));
}

TEST_CASE("unconstrained inputs fail propagation with a named variable") {
    ControllerSpec spec = fixtures::literal_sextuple();
    ObserverSpec stability;
    stability.label = "Stability";
    stability.kind = ObserverKind::Inductive;
    stability.form = EllipsoidForm::PForm;
    stability.matrix = RationalMatrix::from_strings(
        {{"6.742e-4", "4.28e-5"}, {"4.28e-5", "2.4651e-3"}});
    stability.mu = parse_decimal("0.9991");
    stability.variables = {"Integrator_1", "Integrator_2"};
    spec.observers = {stability};
    StraightLineProgram p = lower(spec);
    CHECK_THROWS_WITH_AS(propagate(annotate(spec, p)), doctest::Contains("\"y\""),
                         PropagationError);
}

TEST_CASE("multipliers that do not sum to one are rejected") {
    std::string json = fixtures::running_example_json();
    auto at = json.find("0.0009");
    REQUIRE(at != std::string::npos);
    json.replace(at, 6, "0.0008");
    ControllerSpec spec = parse_spec_json(json, "tweaked");
    CHECK_THROWS_AS(propagate(annotate(spec, lower(spec))), MultiplierError);
}

TEST_CASE("transform records replay exactly") {
    PropagationResult r = propagate_running();
    for (const auto& rec : r.records) {
        switch (rec.rule) {
            case TransformRule::AffineEllipsoid:
            case TransformRule::ReduceEllipsoid: {
                REQUIRE(rec.in_matrices.size() == 1);
                CHECK(multiply(multiply(rec.transform, rec.in_matrices[0]),
                               transpose(rec.transform)) == rec.out_matrix);
                break;
            }
            case TransformRule::SProcedure: {
                REQUIRE(rec.in_matrices.size() == rec.multipliers.size());
                std::vector<RationalMatrix> blocks;
                for (std::size_t i = 0; i < rec.in_matrices.size(); ++i)
                    blocks.push_back(scalar_mult(Rational(1) / rec.multipliers[i],
                                                 rec.in_matrices[i]));
                CHECK(block_diag(blocks) == rec.out_matrix);
                break;
            }
        }
    }
}

TEST_CASE("support bookkeeping holds for every triple") {
    PropagationResult r = propagate_running();
    for (const auto& t : r.annotated.triples) {
        if (t.tactic == Tactic::SProcedure) {
            std::vector<std::string> concat;
            for (const auto& pre : t.pres)
                concat.insert(concat.end(), pre.ellipsoid.support.begin(),
                              pre.ellipsoid.support.end());
            CHECK(t.post.support == concat);
        } else {
            REQUIRE(t.pres.size() == 1);
            REQUIRE(t.stmt_index >= 0);
            const auto& stmt = r.annotated.program.stmts[static_cast<std::size_t>(t.stmt_index)];
            // Post support is pre support plus possibly the lhs, minus dropped
            // dead variables, order preserved.
            std::vector<std::string> pre_plus = t.pres[0].ellipsoid.support;
            if (std::find(pre_plus.begin(), pre_plus.end(), stmt.lhs) == pre_plus.end())
                pre_plus.push_back(stmt.lhs);
            std::size_t cursor = 0;
            bool subsequence = true;
            for (const auto& v : t.post.support) {
                auto it = std::find(pre_plus.begin() + static_cast<std::ptrdiff_t>(cursor),
                                    pre_plus.end(), v);
                if (it == pre_plus.end()) {
                    subsequence = false;
                    break;
                }
                cursor = static_cast<std::size_t>(it - pre_plus.begin()) + 1;
            }
            CHECK(subsequence);
        }
    }
}

TEST_CASE("affine triples are sound on sampled pre points") {
    oracle::Rng rng(93);
    PropagationResult r = propagate_running();
    for (const auto& t : r.annotated.triples) {
        if (t.tactic != Tactic::AffineEllipsoid) continue;
        const auto& stmt = r.annotated.program.stmts[static_cast<std::size_t>(t.stmt_index)];
        const Ellipsoid& pre = t.pres[0].ellipsoid;
        for (int i = 0; i < 50; ++i) {
            auto x = oracle::sample_in_qform(rng, pre.matrix);
            // Execute the statement.
            Rational value = stmt.constant;
            for (const auto& [v, c] : stmt.coeffs)
                value += c * x[static_cast<std::size_t>(
                                   std::find(pre.support.begin(), pre.support.end(), v) -
                                   pre.support.begin())];
            // Project onto the post support.
            std::vector<Rational> y;
            for (const auto& v : t.post.support) {
                if (v == stmt.lhs) {
                    y.push_back(value);
                } else {
                    auto it = std::find(pre.support.begin(), pre.support.end(), v);
                    REQUIRE(it != pre.support.end());
                    y.push_back(x[static_cast<std::size_t>(it - pre.support.begin())]);
                }
            }
            CHECK(contains_point_qform(t.post.matrix, y));
        }
    }
}

TEST_CASE("propagation is deterministic") {
    PropagationResult a = propagate_running();
    PropagationResult b = propagate_running();
    CHECK(a.final_ellipsoid.matrix == b.final_ellipsoid.matrix);
    REQUIRE(a.records.size() == b.records.size());
    REQUIRE(a.annotated.triples.size() == b.annotated.triples.size());
    for (std::size_t i = 0; i < a.annotated.triples.size(); ++i) {
        CHECK(a.annotated.triples[i].post.matrix == b.annotated.triples[i].post.matrix);
        CHECK(a.annotated.triples[i].post_matrix_id == b.annotated.triples[i].post_matrix_id);
        CHECK(a.annotated.triples[i].label == b.annotated.triples[i].label);
    }
}
