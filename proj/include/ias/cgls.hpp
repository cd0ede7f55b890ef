#pragma once

#include <vector>

#include "ias/linear_map.hpp"
#include "ias/types.hpp"

namespace ias {

// Early-stopping rule for the reduced Krylov subspace solution. The solve
// stops at the first index k+1 whose iterate satisfies BOTH
//   ||b - A w_{k+1}|| <= discrepancy_target   and   G(w_{k+1}) > tau G(w_k),
// and returns the previous iterate w_k: once the residual is at the noise
// level, a growing G signals that further Krylov directions fit noise.
struct StoppingRule {
    double discrepancy_target = 0.0;  // sqrt(m) for whitened noise; 0 disables
    double tau = 1.01;                // safeguard factor, > 1
    Index max_iters = 0;              // 0 -> min(rows, cols)
    bool reorthogonalize = false;     // full reorthogonalization of the residual basis
};

enum class StopReason {
    DiscrepancyGSafeguard,
    MaxIters,
    ExactConvergence,
    Breakdown,
};

struct CglsResult {
    Vector w;
    Index iters = 0;  // dimension of the Krylov space of the returned iterate
    std::vector<double> residual_history;  // ||b - A w_k||, k = 0..
    std::vector<double> g_history;         // G(w_k)
    StopReason stop_reason = StopReason::MaxIters;
    // Iterate with the smallest G along the computed path; coincides with w
    // when the rule stops right past the G minimum.
    Vector w_min_g;
    Index min_g_iters = 0;
};

// G(w) = ||b - A w||^2 + ||w||^2, the objective of the stacked system
// [A; I] w = [b; 0].
double g_functional(const LinearMap& op, const Vector& b, const Vector& w);

// Conjugate gradients for least squares from w_0 = 0; the k-th iterate
// minimizes ||b - A w|| over the Krylov space K_k(A^T b, A^T A).
CglsResult cgls(const LinearMap& op, const Vector& b, const StoppingRule& rule);

const char* to_string(StopReason r);

}  // namespace ias
