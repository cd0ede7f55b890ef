#include "ias/whiten.hpp"

#include <Eigen/Cholesky>

#include "ias/errors.hpp"

namespace ias {

namespace {

// v -> L^{-1} v for the lower Cholesky factor L of Sigma; the adjoint
// solves with L^T.
class CholeskyWhitenMap final : public LinearMap {
public:
    explicit CholeskyWhitenMap(Matrix L) : L_(std::move(L)) {}

    Index rows() const override { return L_.rows(); }
    Index cols() const override { return L_.cols(); }

    void apply(const Vector& v, Vector& out) const override {
        check_apply_dims(v);
        out = L_.triangularView<Eigen::Lower>().solve(v);
    }

    void apply_adjoint(const Vector& u, Vector& out) const override {
        check_adjoint_dims(u);
        out = L_.triangularView<Eigen::Lower>().transpose().solve(u);
    }

private:
    Matrix L_;
};

}  // namespace

std::pair<MapPtr, Vector> whiten(MapPtr A, const Vector& b, const Matrix& Sigma) {
    if (Sigma.rows() != Sigma.cols() || Sigma.rows() != A->rows() ||
        b.size() != A->rows())
        throw DomainError("whiten: dimension mismatch");
    if (!Sigma.isApprox(Sigma.transpose(), 1e-12))
        throw NotSpd("whiten: covariance is not symmetric");
    Eigen::LLT<Matrix> llt(Sigma);
    if (llt.info() != Eigen::Success)
        throw NotSpd("whiten: covariance is not positive definite");
    auto S = std::make_shared<CholeskyWhitenMap>(Matrix(llt.matrixL()));
    Vector wb = S->LinearMap::apply(b);
    return {compose(S, std::move(A)), std::move(wb)};
}

std::pair<MapPtr, Vector> whiten(MapPtr A, const Vector& b, double sigma) {
    if (!(sigma > 0.0)) throw NotSpd("whiten: sigma must be positive");
    if (b.size() != A->rows()) throw DomainError("whiten: dimension mismatch");
    return {std::make_shared<ScaledMap>(1.0 / sigma, std::move(A)), b / sigma};
}

}  // namespace ias
