#pragma once

#include "credo/matrix.hpp"
#include "credo/psd.hpp"

#include <string>
#include <vector>

namespace credo {

enum class EllipsoidForm { PForm, QForm };

// A symmetric-matrix ellipsoid over an ordered variable support. PForm is the
// quadratic inequality x^T P x <= 1 (P positive definite); QForm is the Schur
// form [[1, x^T],[x, Q]] >= 0 with Q = P^-1, which tolerates degenerate
// (rank-deficient) sets.
struct Ellipsoid {
    EllipsoidForm form = EllipsoidForm::QForm;
    RationalMatrix matrix;
    std::vector<std::string> support;
    bool degenerate_ok = true;
};

class EllipsoidError : public std::runtime_error {
public:
    explicit EllipsoidError(const std::string& message) : std::runtime_error(message) {}
};

// Checks symmetry, support arity, and the form's definiteness requirement.
void validate_ellipsoid(const Ellipsoid& e);

// Q = P^-1 when PForm; identity on QForm. Support is preserved.
Ellipsoid to_qform(const Ellipsoid& e);

// Inverse conversion for nonsingular Q (tests and bounds extraction).
Ellipsoid to_pform(const Ellipsoid& e);

// Exact membership in the Q-form set: [[1, x^T],[x, Q]] >= 0.
bool contains_point_qform(const RationalMatrix& q, std::span<const Rational> x);

// Exact membership for PForm: x^T P x <= 1.
bool contains_point_pform(const RationalMatrix& p, std::span<const Rational> x);

struct StateBounds {
    // Per-coordinate: |x_i| <= sqrt(radicand_i) with radicand_i = (P^-1)_ii.
    std::vector<Rational> coordinate_radicands;
    // Per principal axis: certified enclosure [lo, hi] of 1/sqrt(sigma_i(P)),
    // sorted by descending sigma.
    std::vector<std::pair<Rational, Rational>> axis_intervals;
};

// Bound extraction for a positive-definite PForm ellipsoid.
StateBounds state_bounds(const Ellipsoid& pform);

}  // namespace credo
