#include "credo/ellipsoid.hpp"

#include <algorithm>

namespace credo {

void validate_ellipsoid(const Ellipsoid& e) {
    if (e.matrix.rows() != e.matrix.cols())
        throw EllipsoidError("ellipsoid matrix is " + e.matrix.shape_string() + ", need square");
    if (!e.matrix.is_symmetric()) throw EllipsoidError("ellipsoid matrix is not symmetric");
    if (static_cast<int>(e.support.size()) != e.matrix.rows())
        throw EllipsoidError("ellipsoid support has " + std::to_string(e.support.size()) +
                             " variables for a " + e.matrix.shape_string() + " matrix");
    if (e.form == EllipsoidForm::PForm) {
        if (!ldlt_pd(e.matrix)) throw EllipsoidError("P-form matrix is not positive definite");
    } else {
        if (!ldlt_psd(e.matrix).proven_psd())
            throw EllipsoidError("Q-form matrix is not positive semidefinite");
    }
}

Ellipsoid to_qform(const Ellipsoid& e) {
    if (e.form == EllipsoidForm::QForm) return e;
    Ellipsoid q = e;
    q.form = EllipsoidForm::QForm;
    q.matrix = invert(e.matrix);
    return q;
}

Ellipsoid to_pform(const Ellipsoid& e) {
    if (e.form == EllipsoidForm::PForm) return e;
    Ellipsoid p = e;
    p.form = EllipsoidForm::PForm;
    p.matrix = invert(e.matrix);
    return p;
}

bool contains_point_qform(const RationalMatrix& q, std::span<const Rational> x) {
    if (q.rows() != static_cast<int>(x.size()))
        throw DimensionError("contains_point_qform: dimension mismatch");
    int n = q.rows();
    RationalMatrix schur(n + 1, n + 1);
    schur.at(0, 0) = 1;
    for (int i = 0; i < n; ++i) {
        schur.at(0, i + 1) = x[static_cast<std::size_t>(i)];
        schur.at(i + 1, 0) = x[static_cast<std::size_t>(i)];
        for (int j = 0; j < n; ++j) schur.at(i + 1, j + 1) = q.at(i, j);
    }
    return ldlt_psd(schur).proven_psd();
}

bool contains_point_pform(const RationalMatrix& p, std::span<const Rational> x) {
    return quadratic_form(p, x) <= 1;
}

namespace {

// Number of eigenvalues of M strictly below t, by inertia of M - t*I.
int eigs_below(const RationalMatrix& m, const Rational& t) {
    RationalMatrix shifted = m;
    for (int i = 0; i < m.rows(); ++i) shifted.at(i, i) -= t;
    return ldlt_inertia(shifted).negative;
}

// Certified enclosures of all eigenvalues of a symmetric rational matrix, by
// bisection on the inertia. Ascending order.
std::vector<std::pair<Rational, Rational>> eigenvalue_brackets(const RationalMatrix& m,
                                                               const Rational& tol) {
    int n = m.rows();
    // Gershgorin bound.
    Rational radius(0);
    for (int i = 0; i < n; ++i) {
        Rational row(0);
        for (int j = 0; j < n; ++j) row += abs(m.at(i, j));
        radius = std::max(radius, row);
    }
    radius += 1;
    std::vector<std::pair<Rational, Rational>> out;
    for (int k = 0; k < n; ++k) {
        // k-th smallest eigenvalue: bisect on #eigs strictly below t.
        Rational lo = -radius, hi = radius;
        while (hi - lo > tol) {
            Rational mid = (lo + hi) / 2;
            if (eigs_below(m, mid) <= k)
                lo = mid;
            else
                hi = mid;
        }
        out.emplace_back(lo, hi);
    }
    return out;
}

}  // namespace

StateBounds state_bounds(const Ellipsoid& pform) {
    if (pform.form != EllipsoidForm::PForm)
        throw EllipsoidError("state_bounds requires a P-form ellipsoid");
    if (!ldlt_pd(pform.matrix)) throw EllipsoidError("state_bounds: P is not positive definite");

    StateBounds bounds;
    RationalMatrix q = invert(pform.matrix);
    for (int i = 0; i < q.rows(); ++i) bounds.coordinate_radicands.push_back(q.at(i, i));

    // sigma_i(P) are the eigenvalues (P symmetric positive definite).
    Rational tol(1, 1);
    for (int i = 0; i < 40; ++i) tol /= 2;  // ~1e-12 absolute
    auto brackets = eigenvalue_brackets(pform.matrix, tol);
    // Descending sigma -> ascending 1/sqrt(sigma).
    std::reverse(brackets.begin(), brackets.end());
    for (auto& [lo, hi] : brackets) {
        if (lo <= 0) throw EllipsoidError("state_bounds: eigenvalue enclosure not positive");
        // 1/sqrt(sigma) in [1/sqrt(hi), 1/sqrt(lo)].
        Rational axis_lo = Rational(1) / sqrt_upper(hi);
        Rational axis_hi = Rational(1) / sqrt_lower(lo);
        bounds.axis_intervals.emplace_back(axis_lo, axis_hi);
    }
    return bounds;
}

}  // namespace credo
