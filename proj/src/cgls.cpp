#include "ias/cgls.hpp"

#include <algorithm>
#include <cmath>

namespace ias {

double g_functional(const LinearMap& op, const Vector& b, const Vector& w) {
    Vector r;
    op.apply(w, r);
    r = b - r;
    return r.squaredNorm() + w.squaredNorm();
}

const char* to_string(StopReason r) {
    switch (r) {
        case StopReason::DiscrepancyGSafeguard: return "discrepancy+g-safeguard";
        case StopReason::MaxIters: return "max-iters";
        case StopReason::ExactConvergence: return "exact-convergence";
        case StopReason::Breakdown: return "breakdown";
    }
    return "unknown";
}

CglsResult cgls(const LinearMap& op, const Vector& b, const StoppingRule& rule) {
    if (b.size() != op.rows()) throw DomainError("cgls: rhs length mismatch");
    if (!(rule.tau > 1.0)) throw DomainError("cgls: safeguard tau must exceed 1");
    if (rule.discrepancy_target < 0.0)
        throw DomainError("cgls: discrepancy target must be nonnegative");

    const Index n = op.cols();
    const Index max_iters =
        rule.max_iters > 0 ? rule.max_iters : std::min(op.rows(), n);

    CglsResult res;
    res.w = Vector::Zero(n);
    Vector r = b;  // residual b - A w
    Vector s;
    op.apply_adjoint(r, s);
    double gamma = s.squaredNorm();
    const double gamma0 = gamma;

    res.residual_history.push_back(r.norm());
    res.g_history.push_back(r.squaredNorm());  // G(0) = ||b||^2
    res.iters = 0;
    res.stop_reason = StopReason::MaxIters;
    res.w_min_g = res.w;
    res.min_g_iters = 0;
    double g_min = res.g_history.front();

    if (gamma0 == 0.0) {
        // A^T b = 0: w = 0 already minimizes ||b - A w||.
        res.stop_reason = StopReason::ExactConvergence;
        return res;
    }

    std::vector<Vector> basis;  // normalized s-vectors, for reorthogonalization
    if (rule.reorthogonalize) basis.push_back(s / std::sqrt(gamma));

    Vector p = s;
    Vector q;
    Vector w_prev = res.w;

    for (Index k = 1; k <= max_iters; ++k) {
        op.apply(p, q);
        const double delta = q.squaredNorm();
        if (delta == 0.0 || !std::isfinite(delta)) {
            res.stop_reason = StopReason::Breakdown;
            return res;
        }
        const double alpha = gamma / delta;
        w_prev = res.w;
        res.w += alpha * p;
        r -= alpha * q;

        const double res_norm = r.norm();
        const double g_now = res_norm * res_norm + res.w.squaredNorm();
        const double g_before = res.g_history.back();
        res.residual_history.push_back(res_norm);
        res.g_history.push_back(g_now);
        if (g_now < g_min) {
            g_min = g_now;
            res.w_min_g = res.w;
            res.min_g_iters = k;
        }

        if (rule.discrepancy_target > 0.0 && res_norm <= rule.discrepancy_target &&
            g_now > rule.tau * g_before && k >= 2) {
            // w_{k} triggered the rule; accept its predecessor. The k >= 2
            // guard keeps the degenerate predecessor w_0 = 0 from being
            // returned when the very first iterate already crosses the
            // discrepancy level (G(w_0) = ||b||^2 carries no ||w|| mass, so
            // the ratio test is meaningless against it).
            res.w = w_prev;
            res.iters = k - 1;
            res.stop_reason = StopReason::DiscrepancyGSafeguard;
            return res;
        }
        res.iters = k;

        op.apply_adjoint(r, s);
        if (rule.reorthogonalize) {
            for (const Vector& v : basis) s -= v.dot(s) * v;
            for (const Vector& v : basis) s -= v.dot(s) * v;
        }
        const double gamma_new = s.squaredNorm();
        if (gamma_new <= 1e-28 * gamma0) {
            // Normal-equations residual vanished: w is the least-squares
            // solution on the current Krylov space and cannot improve.
            res.stop_reason = StopReason::ExactConvergence;
            return res;
        }
        const double beta = gamma_new / gamma;
        gamma = gamma_new;
        if (rule.reorthogonalize) basis.push_back(s / std::sqrt(gamma_new));
        p = s + beta * p;
    }
    res.stop_reason = StopReason::MaxIters;
    return res;
}

}  // namespace ias
