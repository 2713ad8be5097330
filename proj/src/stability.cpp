#include "credo/stability.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace credo {

namespace {

const ObserverSpec* find_inductive(const ControllerSpec& spec) {
    const ObserverSpec* found = nullptr;
    for (const auto& obs : spec.observers) {
        bool inductive = obs.kind == ObserverKind::Inductive ||
                         (obs.kind == ObserverKind::Auto &&
                          std::all_of(obs.variables.begin(), obs.variables.end(),
                                      [&](const std::string& v) {
                                          return std::find(spec.state_names.begin(),
                                                           spec.state_names.end(),
                                                           v) != spec.state_names.end();
                                      }));
        if (!inductive) continue;
        if (found) throw StabilityError("more than one inductive observer");
        found = &obs;
    }
    if (!found) throw StabilityError("no inductive observer declared");
    return found;
}

// Pattern of `var` over the raw inputs, from its defining assignment. The
// assignment must be a pure input combination.
std::vector<Rational> channel_pattern(const ControllerSpec& spec,
                                      const StraightLineProgram& program,
                                      const std::string& var) {
    int m = spec.m();
    std::vector<Rational> pattern(static_cast<std::size_t>(m));
    auto input_index = [&](const std::string& name) -> int {
        for (int j = 0; j < m; ++j)
            if (spec.input_names[static_cast<std::size_t>(j)] == name) return j;
        return -1;
    };
    int direct = input_index(var);
    if (direct >= 0) {
        pattern[static_cast<std::size_t>(direct)] = 1;
        return pattern;
    }
    for (const auto& stmt : program.stmts) {
        if (stmt.lhs != var) continue;
        if (stmt.constant != 0)
            throw StabilityError("input channel \"" + var + "\" has a nonzero constant");
        for (const auto& [v, c] : stmt.coeffs) {
            int j = input_index(v);
            if (j < 0)
                throw StabilityError("input channel \"" + var +
                                     "\" is not a pure combination of raw inputs");
            pattern[static_cast<std::size_t>(j)] = c;
        }
        return pattern;
    }
    throw StabilityError("input channel \"" + var + "\" is never computed by the program");
}

// Factors B exactly through the channel patterns: B = B_eff * S with S the
// channel-pattern matrix. Errors if a state row uses inputs outside the span.
RationalMatrix effective_input_matrix(const RationalMatrix& B,
                                      const std::vector<InputChannel>& channels) {
    const int n = B.rows(), m = B.cols();
    const int c = static_cast<int>(channels.size());
    if (m == 0 || B.is_zero()) return RationalMatrix::zero(n, c);
    // Solve S^T X^T = B^T column by column (i.e. row of B as combination of
    // patterns) by Gaussian elimination on the m x c system.
    RationalMatrix st(m, c);
    for (int j = 0; j < c; ++j) {
        if (static_cast<int>(channels[static_cast<std::size_t>(j)].pattern.size()) != m)
            throw StabilityError("channel pattern arity mismatch");
        for (int i = 0; i < m; ++i)
            st.at(i, j) = channels[static_cast<std::size_t>(j)].pattern[static_cast<std::size_t>(i)];
    }
    RationalMatrix beff(n, c);
    for (int row = 0; row < n; ++row) {
        // Augmented elimination solving st * x = B(row,:)^T.
        RationalMatrix aug(m, c + 1);
        for (int i = 0; i < m; ++i) {
            for (int j = 0; j < c; ++j) aug.at(i, j) = st.at(i, j);
            aug.at(i, c) = B.at(row, i);
        }
        int rank = 0;
        std::vector<int> pivot_col;
        for (int col = 0; col < c && rank < m; ++col) {
            int p = -1;
            for (int i = rank; i < m; ++i)
                if (aug.at(i, col) != 0) {
                    p = i;
                    break;
                }
            if (p < 0) continue;
            if (p != rank)
                for (int j = 0; j <= c; ++j) std::swap(aug.at(p, j), aug.at(rank, j));
            Rational piv = aug.at(rank, col);
            for (int j = 0; j <= c; ++j) aug.at(rank, j) /= piv;
            for (int i = 0; i < m; ++i) {
                if (i == rank || aug.at(i, col) == 0) continue;
                Rational f = aug.at(i, col);
                for (int j = 0; j <= c; ++j) aug.at(i, j) -= f * aug.at(rank, j);
            }
            pivot_col.push_back(col);
            ++rank;
        }
        for (int i = rank; i < m; ++i)
            if (aug.at(i, c) != 0)
                throw StabilityError(
                    "state update row " + std::to_string(row) +
                    " reads inputs outside the declared bound channels");
        std::vector<Rational> x(static_cast<std::size_t>(c));
        for (int r = 0; r < rank; ++r) x[static_cast<std::size_t>(pivot_col[static_cast<std::size_t>(r)])] = aug.at(r, c);
        for (int j = 0; j < c; ++j) beff.at(row, j) = x[static_cast<std::size_t>(j)];
    }
    return beff;
}

}  // namespace

StabilityCertificate certificate_from_observers(const ControllerSpec& spec,
                                                const StraightLineProgram& program) {
    const ObserverSpec* inductive = find_inductive(spec);
    StabilityCertificate cert;
    Ellipsoid ind{inductive->form, inductive->matrix, inductive->variables};
    cert.P = to_pform(ind).matrix;
    if (!ldlt_pd(cert.P)) throw StabilityError("inductive observer matrix is not positive definite");
    cert.alpha = Rational(1) - inductive->mu;
    if (!(cert.alpha > 0 && cert.alpha < 1)) throw StabilityError("alpha outside (0,1)");

    std::vector<RationalMatrix> blocks;
    std::vector<std::string> support;
    for (const auto& obs : spec.observers) {
        if (&obs == inductive) continue;
        Ellipsoid bound{obs.form, obs.matrix, obs.variables};
        RationalMatrix q = to_qform(bound).matrix;
        // Scale so that the single-alpha LMI block realizes per-channel
        // multipliers: alpha * Q_joint^-1 = blockdiag(mu_s * Q_s^-1).
        blocks.push_back(scalar_mult(cert.alpha / obs.mu, q));
        for (const auto& v : obs.variables) {
            support.push_back(v);
            cert.channels.push_back(InputChannel{v, channel_pattern(spec, program, v)});
        }
    }
    if (blocks.empty()) throw StabilityError("no assertive observer declares an input bound");
    cert.input_bound = Ellipsoid{EllipsoidForm::QForm, block_diag(blocks), support};
    return cert;
}

LmiResult check_lmi(const ControllerSpec& spec, const StabilityCertificate& cert) {
    const int n = spec.n();
    if (cert.P.rows() != n || cert.P.cols() != n)
        throw DimensionError("check_lmi: P is " + cert.P.shape_string() + ", need " +
                             std::to_string(n) + "x" + std::to_string(n));
    if (!(cert.alpha > 0 && cert.alpha < 1)) throw StabilityError("alpha outside (0,1)");
    const int c = static_cast<int>(cert.channels.size());
    if (cert.input_bound.matrix.rows() != c)
        throw DimensionError("check_lmi: input bound dimension mismatch");

    RationalMatrix beff = effective_input_matrix(spec.B, cert.channels);
    RationalMatrix y;
    try {
        y = invert(cert.input_bound.matrix);
    } catch (const SingularMatrixError&) {
        throw StabilityError("input bound matrix is singular; cannot normalize the LMI");
    }

    RationalMatrix atp = multiply(transpose(spec.A), cert.P);
    RationalMatrix t11 = sub(multiply(atp, spec.A), scalar_mult(Rational(1) - cert.alpha, cert.P));
    RationalMatrix t12 = multiply(atp, beff);
    RationalMatrix t22 = sub(multiply(multiply(transpose(beff), cert.P), beff),
                             scalar_mult(cert.alpha, y));

    RationalMatrix block(n + c, n + c);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) block.at(i, j) = t11.at(i, j);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < c; ++j) {
            block.at(i, n + j) = t12.at(i, j);
            block.at(n + j, i) = t12.at(i, j);
        }
    for (int i = 0; i < c; ++i)
        for (int j = 0; j < c; ++j) block.at(n + i, n + j) = t22.at(i, j);

    LmiResult result{ldlt_psd(scalar_mult(Rational(-1), block)), block};
    return result;
}

bool one_step_decrease(const ControllerSpec& spec, const RationalMatrix& P,
                       std::span<const Rational> x, std::span<const Rational> y) {
    if (static_cast<int>(x.size()) != spec.n() || static_cast<int>(y.size()) != spec.m())
        throw DimensionError("one_step_decrease: dimension mismatch");
    std::vector<Rational> next = multiply_vec(spec.A, x);
    std::vector<Rational> by = multiply_vec(spec.B, y);
    for (std::size_t i = 0; i < next.size(); ++i) next[i] += by[i];
    return quadratic_form(P, next) <= quadratic_form(P, x);
}

namespace {

double uniform01(std::mt19937_64& rng) {
    // 53-bit mantissa mapping; pinned here so traces are reproducible across
    // standard-library implementations.
    return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

}  // namespace

SimTrace simulate(const ControllerSpec& spec, long steps, std::uint64_t seed,
                  const SimOptions& options) {
    if (steps < 0) throw StabilityError("simulate: steps must be nonnegative");
    const int n = spec.n(), m = spec.m(), k = spec.k();
    auto as_doubles = [](const RationalMatrix& mat) {
        std::vector<std::vector<double>> d(static_cast<std::size_t>(mat.rows()),
                                           std::vector<double>(static_cast<std::size_t>(mat.cols())));
        for (int i = 0; i < mat.rows(); ++i)
            for (int j = 0; j < mat.cols(); ++j) d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = to_double(mat.at(i, j));
        return d;
    };
    auto a = as_doubles(spec.A), b = as_doubles(spec.B), c = as_doubles(spec.C),
         d = as_doubles(spec.D);

    if (options.mode == InputMode::Constant &&
        static_cast<int>(options.constant.size()) != m)
        throw StabilityError("simulate: constant input needs one value per raw input");

    std::mt19937_64 rng(seed);
    std::vector<double> x(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) x[static_cast<std::size_t>(i)] = to_double(spec.x0[static_cast<std::size_t>(i)]);

    SimTrace trace;
    trace.seed = seed;
    trace.rows.reserve(static_cast<std::size_t>(steps) + 1);

    auto level_of = [&](const std::vector<double>& state) {
        if (!options.level_p) return 0.0;
        const auto& p = *options.level_p;
        double level = 0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                level += state[static_cast<std::size_t>(i)] * p[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * state[static_cast<std::size_t>(j)];
        return level;
    };

    for (long step = 0; step <= steps; ++step) {
        std::vector<double> y(static_cast<std::size_t>(m), 0.0);
        switch (options.mode) {
            case InputMode::Zero: break;
            case InputMode::Constant:
                y = options.constant;
                break;
            case InputMode::UniformInBound:
                for (const auto& channel : options.channels) {
                    double s = (2.0 * uniform01(rng) - 1.0) * channel.radius;
                    for (int j = 0; j < m; ++j)
                        y[static_cast<std::size_t>(j)] += s * channel.realization[static_cast<std::size_t>(j)];
                }
                break;
        }

        std::vector<double> u(static_cast<std::size_t>(k), 0.0);
        for (int i = 0; i < k; ++i) {
            double acc = 0;
            for (int j = 0; j < n; ++j) acc += c[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
            for (int j = 0; j < m; ++j) acc += d[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
            u[static_cast<std::size_t>(i)] = acc;
        }

        double level = level_of(x);
        trace.max_level = std::max(trace.max_level, level);
        trace.rows.push_back(SimTrace::Row{x, y, u, level});
        if (step == steps) break;

        std::vector<double> next(static_cast<std::size_t>(n), 0.0);
        for (int i = 0; i < n; ++i) {
            double acc = 0;
            for (int j = 0; j < n; ++j) acc += a[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * x[static_cast<std::size_t>(j)];
            for (int j = 0; j < m; ++j) acc += b[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] * y[static_cast<std::size_t>(j)];
            next[static_cast<std::size_t>(i)] = acc;
        }
        x = std::move(next);
    }
    return trace;
}

SimOptions sim_options_from_observers(const ControllerSpec& spec,
                                      const StraightLineProgram& program) {
    SimOptions options;
    options.mode = InputMode::UniformInBound;
    const ObserverSpec* inductive = find_inductive(spec);
    Ellipsoid ind{inductive->form, inductive->matrix, inductive->variables};
    RationalMatrix p = to_pform(ind).matrix;
    std::vector<std::vector<double>> pd(static_cast<std::size_t>(p.rows()),
                                        std::vector<double>(static_cast<std::size_t>(p.cols())));
    for (int i = 0; i < p.rows(); ++i)
        for (int j = 0; j < p.cols(); ++j) pd[static_cast<std::size_t>(i)][static_cast<std::size_t>(j)] = to_double(p.at(i, j));
    options.level_p = pd;

    const int m = spec.m();
    for (const auto& obs : spec.observers) {
        if (&obs == inductive) continue;
        Ellipsoid bound{obs.form, obs.matrix, obs.variables};
        RationalMatrix q = to_qform(bound).matrix;
        for (std::size_t v = 0; v < obs.variables.size(); ++v) {
            std::vector<Rational> pattern = channel_pattern(spec, program, obs.variables[v]);
            // Channel value s realized with the minimum-norm raw input
            // s * pattern / |pattern|^2.
            Rational norm2(0);
            for (const auto& pc : pattern) norm2 += pc * pc;
            if (norm2 == 0) throw StabilityError("empty input channel pattern");
            SimChannel channel;
            channel.realization.resize(static_cast<std::size_t>(m));
            for (int j = 0; j < m; ++j)
                channel.realization[static_cast<std::size_t>(j)] = to_double(pattern[static_cast<std::size_t>(j)] / norm2);
            // Per-axis radius sqrt(Q_vv) of the bound.
            channel.radius = std::sqrt(to_double(q.at(static_cast<int>(v), static_cast<int>(v))));
            options.channels.push_back(std::move(channel));
        }
    }
    return options;
}

}  // namespace credo
