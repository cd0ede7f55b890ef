#include "ias/pinv.hpp"

#include <Eigen/IterativeLinearSolvers>
#include <Eigen/SparseCholesky>

#include "ias/errors.hpp"

namespace ias {

struct PinvSolver::Impl {
    NormalSolverBackend backend;
    Eigen::SimplicialLDLT<SparseMatrix> ldlt;
    Eigen::ConjugateGradient<SparseMatrix, Eigen::Lower | Eigen::Upper,
                             Eigen::DiagonalPreconditioner<double>>
        cg;
    SparseMatrix normal;  // kept alive for the CG backend
};

PinvSolver::PinvSolver(const SparseMatrix& L, const Vector& theta,
                       NormalSolverBackend backend, double cg_tol,
                       Index cg_max_iters) {
    if (theta.size() != L.rows()) throw DomainError("pinv: theta length mismatch");
    if ((theta.array() <= 0.0).any()) throw DomainError("pinv: nonpositive variance");

    Vector inv_sqrt = theta.cwiseSqrt().cwiseInverse();
    L_theta_ = inv_sqrt.asDiagonal() * L;

    auto impl = std::make_shared<Impl>();
    impl->backend = backend;
    impl->normal = SparseMatrix(L_theta_.transpose() * L_theta_);
    switch (backend) {
        case NormalSolverBackend::Cholesky: {
            impl->ldlt.compute(impl->normal);
            if (impl->ldlt.info() != Eigen::Success)
                throw RankDeficient("pinv: normal-matrix factorization failed");
            const Vector d = impl->ldlt.vectorD();
            const double dmax = d.cwiseAbs().maxCoeff();
            if (d.minCoeff() <= 1e-14 * dmax)
                throw RankDeficient("pinv: increment map lost full column rank");
            break;
        }
        case NormalSolverBackend::Cg: {
            impl->cg.setTolerance(cg_tol);
            if (cg_max_iters > 0) impl->cg.setMaxIterations(cg_max_iters);
            impl->cg.compute(impl->normal);
            if (impl->cg.info() != Eigen::Success)
                throw RankDeficient("pinv: CG setup failed");
            break;
        }
    }
    impl_ = std::move(impl);
}

Vector PinvSolver::solve_normal(const Vector& v) const {
    if (v.size() != n_cols()) throw DomainError("pinv: length mismatch");
    if (impl_->backend == NormalSolverBackend::Cholesky) return impl_->ldlt.solve(v);
    Vector w = impl_->cg.solve(v);
    if (impl_->cg.info() != Eigen::Success)
        throw NonConvergence("pinv: CG exhausted its iteration budget");
    return w;
}

Vector PinvSolver::solve(const Vector& beta) const {
    if (beta.size() != n_rows()) throw DomainError("pinv: length mismatch");
    return solve_normal(L_theta_.transpose() * beta);
}

Vector PinvSolver::apply_pinv_adjoint(const Vector& v) const {
    return L_theta_ * solve_normal(v);
}

Vector apply_pinv(const IncrementGraph& g, const Vector& theta, const Vector& beta,
                  NormalSolverBackend backend) {
    return PinvSolver(g.L, theta, backend).solve(beta);
}

Vector apply_pinv_adjoint(const IncrementGraph& g, const Vector& theta,
                          const Vector& v, NormalSolverBackend backend) {
    return PinvSolver(g.L, theta, backend).apply_pinv_adjoint(v);
}

}  // namespace ias
