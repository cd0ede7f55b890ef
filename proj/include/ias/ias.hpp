#pragma once

#include <cstdint>
#include <optional>
#include <vector>

#include "ias/cgls.hpp"
#include "ias/forward.hpp"
#include "ias/hypermodel.hpp"
#include "ias/pinv.hpp"
#include "ias/types.hpp"

namespace ias {

enum class SolveMode { Plain, LocalHybrid, GlobalHybrid };

struct SolverControls {
    SolveMode mode = SolveMode::Plain;
    double outer_tol = 1e-6;
    int max_outer = 200;
    int t_switch = 10;                // global hybrid switch iteration
    bool projection_enabled = false;  // local hybrid: clamp x_j, j in I, to [-x_bar, x_bar]
    std::optional<std::pair<double, double>> box;  // signal-domain interval constraint
    double tau = 1.01;                // CGLS safeguard
    Index max_cgls = 0;               // 0 -> min(m, n)
    bool reorthogonalize = false;
    NormalSolverBackend pinv_backend = NormalSolverBackend::Cholesky;
    // Solve the stacked system exactly (dense) instead of the early-stopped
    // CGLS surrogate; for small problems and the convexity regression tests.
    bool exact_x = false;
    // Initial variance vector; defaults to the convex model's vartheta.
    std::optional<Vector> theta0;
};

// Current coefficient estimate, componentwise variances, and the set of
// components that have switched to the greedy model.
struct IasState {
    Vector x;      // coefficients (signal, 1D differences, or edge increments)
    Vector theta;  // variances, >= theta_min
    std::vector<std::uint8_t> in_m2;
    int t = 0;
};

struct IterationRecord {
    int t = 0;
    double objective = 0.0;
    double residual = 0.0;  // ||b - A signal|| (whitened)
    Index cgls_iters = 0;
    Index switched_count = 0;
    // Switched components whose updated variance left the convexity region
    // this iteration; stays 0 exactly when the switch set is stable without
    // the projection step.
    Index switched_outside = 0;
    double rel_change = 0.0;
    std::uint64_t assignment_hash = 0;  // fingerprint of the model assignment
    std::vector<std::uint8_t> convex_bitmap;  // theta_j < theta_bar_j
};

struct IasResult {
    IasState state;
    Vector signal;  // nodal/pixel values implied by the coefficients
    std::vector<IterationRecord> trace;
    bool converged = false;
};

// One x-update: least-squares solve of the theta-scaled system through
// CGLS with the reduced-Krylov stopping rule. Returns coefficients, the
// implied signal, and the CGLS iteration count.
struct XUpdateResult {
    Vector coeffs;
    Vector signal;
    Index cgls_iters = 0;
    double residual = 0.0;
    // Fallback candidate from the smallest-G iterate of the same Krylov
    // path; used by the driver's monotone acceptance when the rule-selected
    // iterate would raise the objective. Empty when identical to the primary.
    Vector coeffs_min_g;
    Vector signal_min_g;
    Index cgls_iters_min_g = 0;
};
XUpdateResult x_update(const Problem& problem, const Vector& theta,
                       const StoppingRule& rule,
                       NormalSolverBackend backend = NormalSolverBackend::Cholesky);

// Exact minimizer of the stacked system ||A_theta w - b||^2 + ||w||^2 via a
// dense normal-equations solve; the reference x-update for small problems.
XUpdateResult x_update_exact(const Problem& problem, const Vector& theta,
                             NormalSolverBackend backend = NormalSolverBackend::Cholesky);

// Mixed-model objective: 1/2 ||b - A x||^2 plus the penalty with model m2
// on switched components and m1 elsewhere. Plain callers pass an empty
// switch set.
double objective(const Problem& problem, const Vector& signal, const Vector& coeffs,
                 const Vector& theta, const HyperModel& m1, const HyperModel* m2,
                 const std::vector<std::uint8_t>& in_m2);

// Candidate greedy update theta^{(2)} = g2(x_j); switch iff it lies inside
// the convexity region theta^{(2)} < theta_bar_j (strict).
std::pair<bool, double> switch_decision(double x_j, const HybridPair& pair, Index j);

IasResult run(const Problem& problem, const HyperModel& model,
              const SolverControls& controls);
IasResult run(const Problem& problem, const HybridPair& pair,
              const SolverControls& controls);

}  // namespace ias
