#include <doctest.h>

#include "credo/psd.hpp"

#include "oracles.hpp"

using namespace credo;

namespace {

RationalMatrix golden_declared_invariant() {
    return RationalMatrix::from_strings(
        {{"1484.8760396857954", "-25.780980284188082"},
         {"-25.780980284188082", "406.11067541120576"}});
}

RationalMatrix golden_escaping_post() {
    return RationalMatrix::from_strings(
        {{"3353.385756854045", "-36.73496680142199"},
         {"-36.73496680142199", "406.10904154688274"}});
}

}  // namespace

TEST_CASE("ldlt_psd basics") {
    CHECK(ldlt_psd(RationalMatrix::identity(2)).proven_psd());
    CHECK(ldlt_psd(RationalMatrix::identity(2)).margin.value() == 1);

    PsdVerdict v = ldlt_psd(RationalMatrix::from_strings({{"1", "2"}, {"2", "1"}}));
    CHECK(v.proven_not_psd());
    REQUIRE(v.witness.has_value());
    CHECK(quadratic_form(RationalMatrix::from_strings({{"1", "2"}, {"2", "1"}}), *v.witness) < 0);

    CHECK_THROWS(ldlt_psd(RationalMatrix::from_strings({{"1", "2"}, {"3", "1"}})));
}

TEST_CASE("boundary cases count as PSD") {
    CHECK(ldlt_psd(RationalMatrix::zero(3, 3)).proven_psd());
    // Rank-deficient PSD: [[1,1],[1,1]].
    CHECK(ldlt_psd(RationalMatrix::from_strings({{"1", "1"}, {"1", "1"}})).proven_psd());
    // Zero diagonal with nonzero off-diagonal refutes.
    PsdVerdict v = ldlt_psd(RationalMatrix::from_strings({{"0", "1"}, {"1", "0"}}));
    CHECK(v.proven_not_psd());
}

TEST_CASE("ldlt_pd is strict") {
    CHECK(ldlt_pd(RationalMatrix::identity(2)));
    CHECK(!ldlt_pd(RationalMatrix::from_strings({{"1", "1"}, {"1", "1"}})));
    CHECK(!ldlt_pd(RationalMatrix::from_strings({{"1", "2"}, {"2", "1"}})));
}

TEST_CASE("declared-vs-generated golden matrices are not contained") {
    PsdVerdict v = ldlt_psd(sub(golden_declared_invariant(), golden_escaping_post()));
    CHECK(v.proven_not_psd());
    REQUIRE(v.witness.has_value());
    CHECK(quadratic_form(sub(golden_declared_invariant(), golden_escaping_post()), *v.witness) < 0);
}

TEST_CASE("ldlt_psd agrees with the principal-minor oracle") {
    oracle::Rng rng(31);
    int refuted = 0, proven = 0;
    for (int i = 0; i < 400; ++i) {
        int n = rng.integer(1, 6);
        RationalMatrix m = rng.symmetric(n, 4);
        // Mix in genuinely PSD instances, otherwise random symmetric skews indefinite.
        if (i % 3 == 0) m = rng.psd(n, 3);
        if (i % 7 == 0)
            for (int d = 0; d < n; ++d) m.at(d, d) += 2;
        PsdVerdict v = ldlt_psd(m);
        bool expected = oracle::psd_by_minors(m);
        CHECK(v.proven_psd() == expected);
        if (v.proven_psd())
            ++proven;
        else {
            ++refuted;
            REQUIRE(v.witness.has_value());
            CHECK(quadratic_form(m, *v.witness) < 0);
        }
    }
    CHECK(proven > 50);
    CHECK(refuted > 50);
}

TEST_CASE("ldlt_inertia matches eigenvalue signs") {
    RationalMatrix m = RationalMatrix::from_strings({{"0", "1"}, {"1", "0"}});
    Inertia in = ldlt_inertia(m);
    CHECK(in.positive == 1);
    CHECK(in.negative == 1);

    oracle::Rng rng(37);
    for (int i = 0; i < 100; ++i) {
        int n = rng.integer(1, 5);
        RationalMatrix s = rng.symmetric(n, 4);
        Inertia got = ldlt_inertia(s);
        std::vector<std::vector<double>> d(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n)));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) d[a][b] = to_double(s.at(a, b));
        auto eig = oracle::jacobi_eigenvalues(d);
        int pos = 0, neg = 0;
        for (double e : eig) {
            if (e > 1e-9) ++pos;
            if (e < -1e-9) ++neg;
        }
        // Jacobi is float-only; skip nearly singular draws.
        bool near_zero = false;
        for (double e : eig)
            if (std::abs(e) <= 1e-9) near_zero = true;
        if (near_zero) continue;
        CHECK(got.positive == pos);
        CHECK(got.negative == neg);
    }
}

TEST_CASE("interval cholesky basics") {
    std::vector<std::vector<double>> id3{{1, 0, 0}, {0, 1, 0}, {0, 0, 1}};
    CHECK(interval_cholesky_psd(id3, 0.0).proven_psd());

    std::vector<std::vector<double>> tiny{{1e-30, 0}, {0, 1}};
    PsdVerdict v = interval_cholesky_psd(tiny, 1e-20);
    CHECK(!v.proven_psd());

    std::vector<std::vector<double>> negdiag{{-1, 0}, {0, 1}};
    CHECK(interval_cholesky_psd(negdiag, 0.0).proven_not_psd());

    std::vector<std::vector<double>> bad{{std::nan(""), 0}, {0, 1}};
    CHECK_THROWS(interval_cholesky_psd(bad, 0.0));
    std::vector<std::vector<double>> asym{{1, 2}, {2.0000001, 1}};
    CHECK_THROWS(interval_cholesky_psd(asym, 0.0));
    CHECK_THROWS(interval_cholesky_psd(id3, -1.0));
}

TEST_CASE("interval cholesky accepts the float-rendered inductive matrix") {
    std::vector<std::vector<double>> q{{1484.8760396857954, -25.780980284188082},
                                       {-25.780980284188082, 406.11067541120576}};
    CHECK(interval_cholesky_psd(q, 0.0).proven_psd());
    CHECK(interval_cholesky_psd(q, std::ldexp(1.0, -30)).proven_psd());
    // Cross-check against the exact decision on the rational lift.
    RationalMatrix lift(2, 2);
    for (int i = 0; i < 2; ++i)
        for (int j = 0; j < 2; ++j) lift.at(i, j) = rational_from_double(q[i][j]);
    CHECK(ldlt_psd(lift).proven_psd());
}

TEST_CASE("interval cholesky is sound against the exact decision") {
    oracle::Rng rng(41);
    int proven = 0;
    for (int i = 0; i < 500; ++i) {
        int n = rng.integer(1, 5);
        RationalMatrix m = (i % 2 == 0) ? rng.psd(n, 3) : rng.symmetric(n, 3);
        // Perturb diagonals toward the PSD boundary now and then.
        if (i % 5 == 0 && n > 0) m.at(0, 0) -= Rational(1, 1000000);
        std::vector<std::vector<double>> d(static_cast<std::size_t>(n),
                                           std::vector<double>(static_cast<std::size_t>(n)));
        for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) d[a][b] = to_double(m.at(a, b));
        // The float rendering must itself be symmetric; rational symmetric input guarantees it.
        PsdVerdict iv = interval_cholesky_psd(d, 0.0);
        if (iv.proven_psd()) {
            ++proven;
            RationalMatrix lift(n, n);
            for (int a = 0; a < n; ++a)
                for (int b = 0; b < n; ++b) lift.at(a, b) = rational_from_double(d[a][b]);
            CHECK(ldlt_psd(lift).proven_psd());
        }
    }
    CHECK(proven > 80);
}
