#pragma once

#include <memory>

#include "ias/increments.hpp"
#include "ias/linear_map.hpp"
#include "ias/types.hpp"

namespace ias {

enum class NormalSolverBackend {
    Cholesky,  // sparse LDLT of L_theta^T L_theta, factored once per theta
    Cg,        // Jacobi-preconditioned conjugate gradients, tolerance 1e-10
};

// Least-squares machinery for L_theta = D_theta^{-1/2} L. Solves against
// the sparse normal matrix N = L^T D_theta^{-1} L, which is a weighted
// graph Laplacian with the Dirichlet rows removed, hence SPD when L has
// full column rank.
class PinvSolver {
public:
    PinvSolver(const SparseMatrix& L, const Vector& theta,
               NormalSolverBackend backend = NormalSolverBackend::Cholesky,
               double cg_tol = 1e-10, Index cg_max_iters = 0);

    Index n_rows() const { return L_theta_.rows(); }  // n_e
    Index n_cols() const { return L_theta_.cols(); }  // n_v

    // alpha = L_theta^dagger beta, via the normal equations.
    Vector solve(const Vector& beta) const;

    // w = (L_theta^T L_theta)^{-1} v.
    Vector solve_normal(const Vector& v) const;

    // (L_theta^dagger)^T v = L_theta (L_theta^T L_theta)^{-1} v.
    Vector apply_pinv_adjoint(const Vector& v) const;

    const SparseMatrix& l_theta() const { return L_theta_; }

private:
    SparseMatrix L_theta_;
    struct Impl;
    std::shared_ptr<const Impl> impl_;
};

// L_theta^dagger as a LinearMap (n_v x n_e): forward is the least-squares
// solve, adjoint is the sparse-normal-solve + L_theta trick.
class PinvMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    explicit PinvMap(std::shared_ptr<const PinvSolver> solver)
        : solver_(std::move(solver)) {}

    Index rows() const override { return solver_->n_cols(); }
    Index cols() const override { return solver_->n_rows(); }
    void apply(const Vector& v, Vector& out) const override {
        check_apply_dims(v);
        out = solver_->solve(v);
    }
    void apply_adjoint(const Vector& u, Vector& out) const override {
        check_adjoint_dims(u);
        out = solver_->apply_pinv_adjoint(u);
    }

private:
    std::shared_ptr<const PinvSolver> solver_;
};

// One-shot convenience wrappers.
Vector apply_pinv(const IncrementGraph& g, const Vector& theta, const Vector& beta,
                  NormalSolverBackend backend = NormalSolverBackend::Cholesky);
Vector apply_pinv_adjoint(const IncrementGraph& g, const Vector& theta,
                          const Vector& v,
                          NormalSolverBackend backend = NormalSolverBackend::Cholesky);

}  // namespace ias
