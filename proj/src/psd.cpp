#include "credo/psd.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace credo {

const char* to_string(PsdStatus s) {
    switch (s) {
        case PsdStatus::ProvenPSD: return "ProvenPSD";
        case PsdStatus::ProvenNotPSD: return "ProvenNotPSD";
        case PsdStatus::Unknown: return "Unknown";
    }
    return "?";
}

namespace {

// One elimination step, recorded in the matrix's ORIGINAL index space so that
// witness lifting stays valid across later symmetric swaps.
struct EliminationStep {
    Rational pivot;
    int pivot_orig;              // original index of the pivot row/column
    std::vector<int> tail_orig;  // original indices of the trailing block
    std::vector<Rational> row;   // pivot-row entries aligned with tail_orig
};

struct LdltOutcome {
    bool psd = false;
    Rational min_pivot;
    bool has_pivot = false;
    std::vector<Rational> witness;  // indexed by original coordinates iff !psd
};

// Runs the exact pivoted elimination on a symmetric matrix. `strict` demands
// positive pivots throughout (positive definiteness).
LdltOutcome run_ldlt(const RationalMatrix& m, bool strict) {
    const int n = m.rows();
    RationalMatrix s = m;
    std::vector<int> perm(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) perm[static_cast<std::size_t>(i)] = i;
    std::vector<EliminationStep> steps;
    LdltOutcome out;

    // Witness for the level-k Schur complement, given in original indices;
    // lift through the recorded steps: prepending w0 = -(row.w)/pivot keeps
    // the quadratic form value unchanged.
    auto finish_not_psd = [&](std::vector<Rational> w_orig) {
        for (auto it = steps.rbegin(); it != steps.rend(); ++it) {
            Rational dot(0);
            for (std::size_t j = 0; j < it->tail_orig.size(); ++j)
                dot += it->row[j] * w_orig[static_cast<std::size_t>(it->tail_orig[j])];
            w_orig[static_cast<std::size_t>(it->pivot_orig)] = -dot / it->pivot;
        }
        out.psd = false;
        out.witness = std::move(w_orig);
    };

    for (int k = 0; k < n; ++k) {
        // Largest remaining diagonal becomes the pivot.
        int best = k;
        for (int i = k + 1; i < n; ++i)
            if (s.at(i, i) > s.at(best, best)) best = i;

        for (int i = k; i < n; ++i)
            if (s.at(i, i) < 0) {
                std::vector<Rational> w(static_cast<std::size_t>(n));
                w[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = 1;
                finish_not_psd(std::move(w));
                return out;
            }

        if (s.at(best, best) == 0) {
            // All remaining diagonal entries are zero. Any nonzero
            // off-diagonal makes a 2x2 minor with negative determinant.
            for (int i = k; i < n; ++i)
                for (int j = i + 1; j < n; ++j)
                    if (s.at(i, j) != 0) {
                        std::vector<Rational> w(static_cast<std::size_t>(n));
                        w[static_cast<std::size_t>(perm[static_cast<std::size_t>(i)])] = 1;
                        w[static_cast<std::size_t>(perm[static_cast<std::size_t>(j)])] =
                            s.at(i, j) > 0 ? -1 : 1;
                        finish_not_psd(std::move(w));
                        return out;
                    }
            if (strict && k < n) {
                std::vector<Rational> w(static_cast<std::size_t>(n));
                w[static_cast<std::size_t>(perm[static_cast<std::size_t>(k)])] = 1;
                finish_not_psd(std::move(w));  // refutes PD only; value is 0, not negative
                return out;
            }
            if (!out.has_pivot || out.min_pivot > 0) {
                out.min_pivot = 0;
                out.has_pivot = true;
            }
            break;
        }

        if (best != k) {
            for (int j = 0; j < n; ++j) std::swap(s.at(k, j), s.at(best, j));
            for (int i = 0; i < n; ++i) std::swap(s.at(i, k), s.at(i, best));
            std::swap(perm[static_cast<std::size_t>(k)], perm[static_cast<std::size_t>(best)]);
        }

        Rational pivot = s.at(k, k);
        if (!out.has_pivot || pivot < out.min_pivot) {
            out.min_pivot = pivot;
            out.has_pivot = true;
        }
        EliminationStep step;
        step.pivot = pivot;
        step.pivot_orig = perm[static_cast<std::size_t>(k)];
        for (int j = k + 1; j < n; ++j) {
            step.tail_orig.push_back(perm[static_cast<std::size_t>(j)]);
            step.row.push_back(s.at(k, j));
        }
        for (int i = k + 1; i < n; ++i) {
            if (s.at(k, i) == 0) continue;
            Rational f = s.at(k, i) / pivot;
            for (int j = k + 1; j < n; ++j) s.at(i, j) -= f * s.at(k, j);
        }
        steps.push_back(std::move(step));
    }

    out.psd = true;
    if (!out.has_pivot) {
        out.min_pivot = 0;  // 0x0 matrix
        out.has_pivot = true;
    }
    return out;
}

}  // namespace

PsdVerdict ldlt_psd(const RationalMatrix& m) {
    if (!m.is_symmetric())
        throw std::invalid_argument("ldlt_psd: matrix " + m.shape_string() + " is not symmetric");
    LdltOutcome out = run_ldlt(m, /*strict=*/false);
    PsdVerdict v;
    if (out.psd) {
        v.status = PsdStatus::ProvenPSD;
        v.margin = out.min_pivot;
    } else {
        v.status = PsdStatus::ProvenNotPSD;
        v.witness = out.witness;
        v.margin = quadratic_form(m, out.witness);
    }
    return v;
}

bool ldlt_pd(const RationalMatrix& m) {
    if (!m.is_symmetric())
        throw std::invalid_argument("ldlt_pd: matrix " + m.shape_string() + " is not symmetric");
    if (m.rows() == 0) return true;
    LdltOutcome out = run_ldlt(m, /*strict=*/true);
    return out.psd && out.min_pivot > 0;
}

Inertia ldlt_inertia(const RationalMatrix& m) {
    if (!m.is_symmetric())
        throw std::invalid_argument("ldlt_inertia: matrix is not symmetric");
    const int n = m.rows();
    RationalMatrix s = m;
    std::vector<bool> done(static_cast<std::size_t>(n), false);
    Inertia inertia;
    std::vector<int> active;
    active.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) active.push_back(i);

    while (!active.empty()) {
        // Prefer the largest |diagonal| as a 1x1 pivot.
        int best = -1;
        for (int idx : active) {
            if (s.at(idx, idx) == 0) continue;
            if (best < 0 || abs(s.at(idx, idx)) > abs(s.at(best, best))) best = idx;
        }
        if (best >= 0) {
            Rational pivot = s.at(best, best);
            (pivot > 0 ? inertia.positive : inertia.negative)++;
            std::erase(active, best);
            for (int i : active) {
                if (s.at(best, i) == 0) continue;
                Rational f = s.at(best, i) / pivot;
                for (int j : active) s.at(i, j) -= f * s.at(best, j);
            }
            continue;
        }
        // Zero diagonal everywhere: find a nonzero off-diagonal 2x2 block,
        // which contributes one positive and one negative eigenvalue.
        int p = -1, q = -1;
        for (std::size_t a = 0; a < active.size() && p < 0; ++a)
            for (std::size_t b = a + 1; b < active.size() && p < 0; ++b)
                if (s.at(active[a], active[b]) != 0) {
                    p = active[a];
                    q = active[b];
                }
        if (p < 0) {
            inertia.zero += static_cast<int>(active.size());
            break;
        }
        Rational a12 = s.at(p, q);
        inertia.positive++;
        inertia.negative++;
        std::erase(active, p);
        std::erase(active, q);
        // Schur complement w.r.t. the [[0, a],[a, 0]] block: S' = S - U inv(B) U^T
        // with inv(B) = [[0, 1/a],[1/a, 0]].
        for (int i : active)
            for (int j : active)
                s.at(i, j) -= (s.at(i, p) * s.at(q, j) + s.at(i, q) * s.at(p, j)) / a12;
    }
    return inertia;
}

namespace {

// Closed interval [lo, hi] with outward widening after every operation: the
// round-to-nearest result is within half an ulp of the exact value, so one
// nextafter step in each direction yields a sound enclosure regardless of the
// prevailing rounding mode.
struct Interval {
    double lo, hi;
};

double down(double x) { return std::nextafter(x, -std::numeric_limits<double>::infinity()); }
double up(double x) { return std::nextafter(x, std::numeric_limits<double>::infinity()); }

Interval exact(double x) { return {x, x}; }

Interval isub(Interval a, Interval b) { return {down(a.lo - b.hi), up(a.hi - b.lo)}; }

Interval imul(Interval a, Interval b) {
    double c[4] = {a.lo * b.lo, a.lo * b.hi, a.hi * b.lo, a.hi * b.hi};
    double lo = c[0], hi = c[0];
    for (double v : c) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {down(lo), up(hi)};
}

// Requires b.lo > 0.
Interval idiv(Interval a, Interval b) {
    double c[4] = {a.lo / b.lo, a.lo / b.hi, a.hi / b.lo, a.hi / b.hi};
    double lo = c[0], hi = c[0];
    for (double v : c) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    return {down(lo), up(hi)};
}

// Requires a.lo >= 0.
Interval isqrt(Interval a) { return {down(std::sqrt(a.lo)), up(std::sqrt(a.hi))}; }

}  // namespace

PsdVerdict interval_cholesky_psd(const std::vector<std::vector<double>>& m, double shift) {
    const int n = static_cast<int>(m.size());
    if (shift < 0 || !std::isfinite(shift))
        throw std::invalid_argument("interval_cholesky_psd: shift must be a nonnegative finite value");
    for (int i = 0; i < n; ++i) {
        if (static_cast<int>(m[static_cast<std::size_t>(i)].size()) != n)
            throw std::invalid_argument("interval_cholesky_psd: matrix is not square");
        for (int j = 0; j < n; ++j) {
            double v = m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)];
            if (!std::isfinite(v))
                throw std::invalid_argument("interval_cholesky_psd: NaN or Inf entry");
            if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] !=
                m[static_cast<std::size_t>(j)][static_cast<std::size_t>(i)])
                throw std::invalid_argument("interval_cholesky_psd: matrix is not symmetric");
        }
    }

    PsdVerdict verdict;
    // A negative diagonal entry refutes outright: e_i^T M e_i < 0.
    for (int i = 0; i < n; ++i)
        if (m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)] < 0) {
            verdict.status = PsdStatus::ProvenNotPSD;
            std::vector<Rational> w(static_cast<std::size_t>(n));
            w[static_cast<std::size_t>(i)] = 1;
            verdict.witness = std::move(w);
            verdict.margin = rational_from_double(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(i)]);
            return verdict;
        }

    // Interval Cholesky of M - shift*I. Success certifies the shifted matrix
    // is positive definite, hence M >= shift*I >= 0.
    std::vector<std::vector<Interval>> L(static_cast<std::size_t>(n),
                                         std::vector<Interval>(static_cast<std::size_t>(n), exact(0.0)));
    double min_pivot_lo = std::numeric_limits<double>::infinity();
    for (int j = 0; j < n; ++j) {
        Interval d = isub(exact(m[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)]), exact(shift));
        for (int k = 0; k < j; ++k)
            d = isub(d, imul(L[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)],
                             L[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]));
        if (!(d.lo > 0)) {
            verdict.status = PsdStatus::Unknown;
            return verdict;
        }
        min_pivot_lo = std::min(min_pivot_lo, d.lo);
        Interval root = isqrt(d);
        L[static_cast<std::size_t>(j)][static_cast<std::size_t>(j)] = root;
        for (int i = j + 1; i < n; ++i) {
            Interval off = exact(m[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)]);
            for (int k = 0; k < j; ++k)
                off = isub(off, imul(L[static_cast<std::size_t>(i)][static_cast<std::size_t>(k)],
                                     L[static_cast<std::size_t>(j)][static_cast<std::size_t>(k)]));
            L[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = idiv(off, root);
        }
    }
    verdict.status = PsdStatus::ProvenPSD;
    if (n > 0) verdict.margin = rational_from_double(min_pivot_lo);
    else verdict.margin = Rational(0);
    return verdict;
}

}  // namespace credo
