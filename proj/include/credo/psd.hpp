#pragma once

#include "credo/matrix.hpp"

#include <optional>
#include <vector>

namespace credo {

enum class PsdStatus { ProvenPSD, ProvenNotPSD, Unknown };

struct PsdVerdict {
    PsdStatus status = PsdStatus::Unknown;
    // For ProvenNotPSD: a vector v with v^T M v < 0, exact.
    std::optional<std::vector<Rational>> witness;
    // ProvenPSD: smallest accepted pivot. ProvenNotPSD: the (negative) value
    // of the witness quadratic form.
    std::optional<Rational> margin;

    bool proven_psd() const { return status == PsdStatus::ProvenPSD; }
    bool proven_not_psd() const { return status == PsdStatus::ProvenNotPSD; }
};

const char* to_string(PsdStatus s);

// Exact positive-semidefiniteness decision for a symmetric rational matrix:
// LDL^T with symmetric pivoting on the largest diagonal. A zero pivot whose
// residual row is nonzero refutes, as does any negative diagonal. The
// boundary counts as PSD (closed cone).
PsdVerdict ldlt_psd(const RationalMatrix& m);

// Strict variant: every pivot must be positive (positive definiteness).
bool ldlt_pd(const RationalMatrix& m);

struct Inertia {
    int positive = 0;
    int negative = 0;
    int zero = 0;
};

// Exact inertia by symmetric elimination; falls back to 2x2 pivots when the
// remaining diagonal vanishes. Sylvester's law makes the signs those of the
// eigenvalues.
Inertia ldlt_inertia(const RationalMatrix& m);

// Interval Cholesky with outward rounding on M - shift*I. ProvenPSD only when
// the factorization certifies positive definiteness of the shifted matrix;
// a negative diagonal entry refutes; everything else is Unknown.
PsdVerdict interval_cholesky_psd(const std::vector<std::vector<double>>& m, double shift);

}  // namespace credo
