#include "ias/ias.hpp"

#include <Eigen/Cholesky>

#include <algorithm>
#include <cmath>
#include <limits>

namespace ias {

namespace {

XUpdateResult x_update_stacked(const Problem& problem, const Vector& theta,
                               Index budget, NormalSolverBackend backend);

std::uint64_t fnv1a(const std::vector<std::uint8_t>& bytes) {
    std::uint64_t h = 1469598103934665603ULL;
    for (std::uint8_t b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
    return h;
}

Vector clamp_vector(Vector v, double lo, double hi) {
    for (Index i = 0; i < v.size(); ++i) v[i] = std::clamp(v[i], lo, hi);
    return v;
}

}  // namespace

XUpdateResult x_update(const Problem& problem, const Vector& theta,
                       const StoppingRule& rule, NormalSolverBackend backend) {
    if (rule.discrepancy_target == 0.0) {
        // Rule disabled: no early stopping means no surrogate, so solve the
        // stacked system outright (the exact Tikhonov update).
        const Index budget = rule.max_iters > 0
                                 ? rule.max_iters
                                 : 4 * std::min(problem.m(), problem.n_coeffs());
        return x_update_stacked(problem, theta, budget, backend);
    }
    XUpdateResult out;
    if (problem.rep == Representation::Increments2D) {
        auto solver =
            std::make_shared<PinvSolver>(problem.graph->L, theta, backend);
        auto op = compose(problem.signal_op, std::make_shared<PinvMap>(solver));
        CglsResult res = cgls(*op, problem.b, rule);
        out.signal = solver->solve(res.w);
        // Increments recomputed from the nodal solve are compatible by
        // construction (M L x = 0), unlike the raw beta iterate.
        out.coeffs = problem.graph->L * out.signal;
        out.cgls_iters = res.iters;
        out.residual = res.residual_history[static_cast<std::size_t>(res.iters)];
        if (res.min_g_iters != res.iters) {
            out.signal_min_g = solver->solve(res.w_min_g);
            out.coeffs_min_g = problem.graph->L * out.signal_min_g;
            out.cgls_iters_min_g = res.min_g_iters;
        }
        return out;
    }
    auto op = scale_by_prior(problem.coeff_op, theta);
    CglsResult res = cgls(*op, problem.b, rule);
    const Vector sqrt_theta = theta.cwiseSqrt();
    out.coeffs = sqrt_theta.cwiseProduct(res.w);
    out.signal = problem.coeff_to_signal ? problem.coeff_to_signal->apply(out.coeffs)
                                         : out.coeffs;
    out.cgls_iters = res.iters;
    out.residual = res.residual_history[static_cast<std::size_t>(res.iters)];
    if (res.min_g_iters != res.iters) {
        out.coeffs_min_g = sqrt_theta.cwiseProduct(res.w_min_g);
        out.signal_min_g = problem.coeff_to_signal
                               ? problem.coeff_to_signal->apply(out.coeffs_min_g)
                               : out.coeffs_min_g;
        out.cgls_iters_min_g = res.min_g_iters;
    }
    return out;
}

namespace {

// Tikhonov x-update through CGLS on the stacked operator [A_theta; I];
// run with the stopping rule disabled, this converges to the exact
// minimizer of ||A_theta w - b||^2 + ||w||^2.
XUpdateResult x_update_stacked(const Problem& problem, const Vector& theta,
                               Index budget, NormalSolverBackend backend) {
    StoppingRule loose;
    loose.discrepancy_target = 0.0;
    loose.max_iters = budget;
    XUpdateResult out;
    if (problem.rep == Representation::Increments2D) {
        auto solver =
            std::make_shared<PinvSolver>(problem.graph->L, theta, backend);
        auto op = compose(problem.signal_op, std::make_shared<PinvMap>(solver));
        auto stacked = std::make_shared<StackedMap>(op);
        Vector rhs = Vector::Zero(stacked->rows());
        rhs.head(problem.b.size()) = problem.b;
        CglsResult res = cgls(*stacked, rhs, loose);
        out.signal = solver->solve(res.w);
        out.coeffs = problem.graph->L * out.signal;
        out.cgls_iters = res.iters;
        out.residual = (problem.b - problem.signal_op->apply(out.signal)).norm();
        return out;
    }
    auto op = scale_by_prior(problem.coeff_op, theta);
    auto stacked = std::make_shared<StackedMap>(op);
    Vector rhs = Vector::Zero(stacked->rows());
    rhs.head(problem.b.size()) = problem.b;
    CglsResult res = cgls(*stacked, rhs, loose);
    out.coeffs = theta.cwiseSqrt().cwiseProduct(res.w);
    out.signal = problem.coeff_to_signal ? problem.coeff_to_signal->apply(out.coeffs)
                                         : out.coeffs;
    out.cgls_iters = res.iters;
    out.residual = (problem.b - op->apply(res.w)).norm();
    return out;
}

}  // namespace

XUpdateResult x_update_exact(const Problem& problem, const Vector& theta,
                             NormalSolverBackend backend) {
    XUpdateResult out;
    if (problem.rep == Representation::Increments2D) {
        auto solver =
            std::make_shared<PinvSolver>(problem.graph->L, theta, backend);
        auto op = compose(problem.signal_op, std::make_shared<PinvMap>(solver));
        const Matrix M = op->to_dense();
        const Index n = M.cols();
        Vector beta = (M.transpose() * M + Matrix::Identity(n, n))
                          .ldlt()
                          .solve(M.transpose() * problem.b);
        out.signal = solver->solve(beta);
        out.coeffs = problem.graph->L * out.signal;
        out.cgls_iters = 0;
        out.residual = (problem.b - M * beta).norm();
        return out;
    }
    auto op = scale_by_prior(problem.coeff_op, theta);
    const Matrix M = op->to_dense();
    const Index n = M.cols();
    Vector w = (M.transpose() * M + Matrix::Identity(n, n))
                   .ldlt()
                   .solve(M.transpose() * problem.b);
    out.coeffs = theta.cwiseSqrt().cwiseProduct(w);
    out.signal = problem.coeff_to_signal ? problem.coeff_to_signal->apply(out.coeffs)
                                         : out.coeffs;
    out.cgls_iters = 0;
    out.residual = (problem.b - M * w).norm();
    return out;
}

double objective(const Problem& problem, const Vector& signal, const Vector& coeffs,
                 const Vector& theta, const HyperModel& m1, const HyperModel* m2,
                 const std::vector<std::uint8_t>& in_m2) {
    if (coeffs.size() != theta.size() ||
        static_cast<std::size_t>(coeffs.size()) != in_m2.size())
        throw DomainError("objective: length mismatch");
    Vector r = problem.b - problem.signal_op->apply(signal);
    double value = 0.5 * r.squaredNorm();
    for (Index j = 0; j < coeffs.size(); ++j) {
        const HyperModel& mdl = (m2 != nullptr && in_m2[static_cast<std::size_t>(j)])
                                    ? *m2
                                    : m1;
        value += penalty_term(coeffs[j], theta[j], mdl, j);
    }
    return value;
}

std::pair<bool, double> switch_decision(double x_j, const HybridPair& pair, Index j) {
    const double th2 = theta_update(x_j, pair.m2, j);
    if (th2 < pair.theta_bar[j]) return {true, th2};
    return {false, theta_update(x_j, pair.m1, j)};
}

namespace {

IasResult run_impl(const Problem& problem, const HyperModel& m1,
                   const HybridPair* pair, const SolverControls& controls) {
    if (controls.mode != SolveMode::Plain && pair == nullptr)
        throw DomainError("hybrid modes need a hybrid pair");
    if (controls.mode == SolveMode::GlobalHybrid && controls.t_switch < 1)
        throw DomainError("global hybrid needs t_switch >= 1");
    if (!(controls.outer_tol > 0.0)) throw DomainError("outer tolerance must be positive");
    const Index n = problem.n_coeffs();
    if (m1.size() != n) throw DomainError("model size does not match problem");

    StoppingRule rule;
    rule.discrepancy_target = std::sqrt(static_cast<double>(problem.m()));
    rule.tau = controls.tau;
    rule.max_iters = controls.max_cgls;
    rule.reorthogonalize = controls.reorthogonalize;

    // Convexity thresholds for the bitmap diagnostic: the greedy model's
    // bound when a pair is present, the base model's own bound when it is
    // only locally convex, all-pass otherwise.
    Vector theta_bar;
    if (pair != nullptr) {
        theta_bar = pair->theta_bar;
    } else if (m1.locally_convex()) {
        theta_bar.resize(n);
        for (Index j = 0; j < n; ++j) theta_bar[j] = convexity_bound(m1, j);
    }

    IasResult result;
    IasState& st = result.state;
    st.x = Vector::Zero(n);
    if (controls.theta0) {
        if (controls.theta0->size() != n || (controls.theta0->array() <= 0.0).any())
            throw DomainError("theta0 must be positive and match the problem size");
        st.theta = *controls.theta0;
    } else {
        st.theta = m1.vartheta();
    }
    st.in_m2.assign(static_cast<std::size_t>(n), 0);
    st.t = 0;
    result.signal = Vector::Zero(problem.n_signal());

    const double tiny = std::numeric_limits<double>::min();
    const HyperModel* m2c = pair != nullptr ? &pair->m2 : nullptr;
    // The first x-update is accepted unconditionally: when theta0 is far
    // from the signal scale, the early-stopped iterate deliberately leaves
    // the Tikhonov regime to discover the amplitude, and the objective may
    // rise relative to the zero state before the first theta adaptation.
    double f_prev = std::numeric_limits<double>::infinity();
    for (int t = 0; t < controls.max_outer; ++t) {
        // Convergence and cycle breaks are inhibited before the global
        // switch so stage two is always reached.
        const bool may_stop = controls.mode != SolveMode::GlobalHybrid ||
                              t > controls.t_switch;
        XUpdateResult xu = controls.exact_x
                               ? x_update_exact(problem, st.theta, controls.pinv_backend)
                               : x_update(problem, st.theta, rule, controls.pinv_backend);

        // Applies the configured projections and evaluates the objective
        // under the pre-update theta and model assignment.
        auto finalize = [&](Vector x_c, Vector s_c) {
            if (controls.box) {
                s_c = clamp_vector(std::move(s_c), controls.box->first,
                                   controls.box->second);
                x_c = problem.signal_to_coeffs(s_c);
            }
            if (controls.mode == SolveMode::LocalHybrid &&
                controls.projection_enabled) {
                bool touched = false;
                for (Index j = 0; j < n; ++j) {
                    if (!st.in_m2[static_cast<std::size_t>(j)]) continue;
                    const double bound = pair->x_bar[j];
                    const double clamped = std::clamp(x_c[j], -bound, bound);
                    touched |= clamped != x_c[j];
                    x_c[j] = clamped;
                }
                if (touched && problem.rep == Representation::Direct) s_c = x_c;
                if (touched && problem.rep == Representation::Increments1D)
                    s_c = problem.coeff_to_signal->apply(x_c);
            }
            const double f =
                objective(problem, s_c, x_c, st.theta, m1, m2c, st.in_m2);
            return std::tuple<Vector, Vector, double>{std::move(x_c), std::move(s_c), f};
        };

        auto [x_new, sig_new, f_cand] = finalize(std::move(xu.coeffs),
                                                 std::move(xu.signal));
        Index used_cgls = xu.cgls_iters;

        // Monotone acceptance. The rule-selected Krylov index can jitter
        // between outer iterations and raise the objective (limit cycles);
        // since F(x, theta) = G(w)/2 + terms in theta only, the smallest-G
        // iterate of the same path is the natural fallback. If neither
        // candidate improves on the previous iterate, the surrogate has
        // nothing left to offer and the iteration is stationary.
        if (f_cand > f_prev) {
            bool replaced = false;
            if (xu.coeffs_min_g.size() == n) {
                auto [x_alt, sig_alt, f_alt] = finalize(
                    std::move(xu.coeffs_min_g), std::move(xu.signal_min_g));
                if (f_alt <= f_prev) {
                    x_new = std::move(x_alt);
                    sig_new = std::move(sig_alt);
                    f_cand = f_alt;
                    used_cgls = xu.cgls_iters_min_g;
                    replaced = true;
                }
            }
            if (!replaced && !controls.exact_x) {
                // Fall back to the exact stacked update; if even the
                // Tikhonov minimizer cannot improve the objective, the
                // previous iterate already is that minimizer.
                const Index budget =
                    std::min<Index>(std::min(problem.m(), n) * 4, 600);
                XUpdateResult xe = x_update_stacked(problem, st.theta, budget,
                                                    controls.pinv_backend);
                auto [x_ex, sig_ex, f_ex] =
                    finalize(std::move(xe.coeffs), std::move(xe.signal));
                if (f_ex <= f_prev) {
                    x_new = std::move(x_ex);
                    sig_new = std::move(sig_ex);
                    f_cand = f_ex;
                    used_cgls = xe.cgls_iters;
                    replaced = true;
                }
            }
            if (!replaced) {
                if (may_stop) {
                    result.converged = true;
                    break;
                }
                x_new = st.x;
                sig_new = result.signal;
            }
        }

        Vector theta_new(n);
        Index switched_outside = 0;
        switch (controls.mode) {
            case SolveMode::Plain:
                theta_new = theta_update_all(x_new, m1);
                break;
            case SolveMode::LocalHybrid: {
                bool failed = false;
#pragma omp parallel for schedule(static) reduction(+ : switched_outside)
                for (Index j = 0; j < n; ++j) {
                    try {
                        if (st.in_m2[static_cast<std::size_t>(j)]) {
                            theta_new[j] = theta_update(x_new[j], pair->m2, j);
                            if (theta_new[j] >= pair->theta_bar[j]) ++switched_outside;
                        } else {
                            auto [use2, th] = switch_decision(x_new[j], *pair, j);
                            if (use2) st.in_m2[static_cast<std::size_t>(j)] = 1;
                            theta_new[j] = th;
                        }
                    } catch (const Error&) {
#pragma omp atomic write
                        failed = true;
                    }
                }
                if (failed)
                    throw NonConvergence("theta update failed for at least one component");
                break;
            }
            case SolveMode::GlobalHybrid: {
                const bool greedy = t >= controls.t_switch;
                theta_new = theta_update_all(x_new, greedy ? pair->m2 : m1);
                std::fill(st.in_m2.begin(), st.in_m2.end(),
                          static_cast<std::uint8_t>(greedy ? 1 : 0));
                break;
            }
        }

        const double rel_x = (x_new - st.x).norm() / std::max(x_new.norm(), tiny);
        const double rel_th =
            (theta_new - st.theta).norm() / std::max(theta_new.norm(), tiny);
        const double rel = std::max(rel_x, rel_th);

        IterationRecord rec;
        rec.t = t;
        rec.cgls_iters = used_cgls;
        rec.switched_outside = switched_outside;
        rec.rel_change = rel;
        rec.switched_count = static_cast<Index>(
            std::count(st.in_m2.begin(), st.in_m2.end(), std::uint8_t{1}));
        rec.assignment_hash = fnv1a(st.in_m2);
        rec.objective =
            objective(problem, sig_new, x_new, theta_new, m1, m2c, st.in_m2);
        rec.residual = (problem.b - problem.signal_op->apply(sig_new)).norm();
        if (theta_bar.size() == n) {
            rec.convex_bitmap.resize(static_cast<std::size_t>(n));
            for (Index j = 0; j < n; ++j)
                rec.convex_bitmap[static_cast<std::size_t>(j)] =
                    theta_new[j] < theta_bar[j] ? 1 : 0;
        } else {
            rec.convex_bitmap.assign(static_cast<std::size_t>(n), 1);
        }
        result.trace.push_back(std::move(rec));

        st.x = std::move(x_new);
        st.theta = std::move(theta_new);
        st.t = t + 1;
        result.signal = std::move(sig_new);
        f_prev = result.trace.back().objective;

        if (rel < controls.outer_tol && may_stop) {
            result.converged = true;
            break;
        }
    }
    return result;
}

}  // namespace

IasResult run(const Problem& problem, const HyperModel& model,
              const SolverControls& controls) {
    if (controls.mode != SolveMode::Plain)
        throw DomainError("single-model run supports Plain mode only");
    return run_impl(problem, model, nullptr, controls);
}

IasResult run(const Problem& problem, const HybridPair& pair,
              const SolverControls& controls) {
    return run_impl(problem, pair.m1, &pair, controls);
}

}  // namespace ias
