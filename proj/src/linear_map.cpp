#include "ias/linear_map.hpp"

#include <cmath>

#include "ias/kernels.hpp"

namespace ias {

void LinearMap::check_apply_dims(const Vector& v) const {
    if (v.size() != cols())
        throw DomainError("linear map apply: expected length " +
                          std::to_string(cols()) + ", got " +
                          std::to_string(v.size()));
}

void LinearMap::check_adjoint_dims(const Vector& u) const {
    if (u.size() != rows())
        throw DomainError("linear map adjoint: expected length " +
                          std::to_string(rows()) + ", got " +
                          std::to_string(u.size()));
}

Vector LinearMap::column_norms_sq() const {
    Vector e = Vector::Zero(cols());
    Vector out(cols());
    Vector col;
    for (Index j = 0; j < cols(); ++j) {
        e[j] = 1.0;
        apply(e, col);
        out[j] = col.squaredNorm();
        e[j] = 0.0;
    }
    return out;
}

Matrix LinearMap::to_dense() const {
    Matrix D(rows(), cols());
    Vector e = Vector::Zero(cols());
    Vector col;
    for (Index j = 0; j < cols(); ++j) {
        e[j] = 1.0;
        apply(e, col);
        D.col(j) = col;
        e[j] = 0.0;
    }
    return D;
}

void DenseMap::apply(const Vector& v, Vector& out) const {
    check_apply_dims(v);
    kernels::dense_matvec(A_, v, out);
}

void DenseMap::apply_adjoint(const Vector& u, Vector& out) const {
    check_adjoint_dims(u);
    kernels::dense_matvec_adjoint(A_, u, out);
}

Vector DenseMap::column_norms_sq() const { return kernels::column_norms_sq(A_); }

void DiagonalMap::apply(const Vector& v, Vector& out) const {
    check_apply_dims(v);
    out = d_.cwiseProduct(v);
}

void DiagonalMap::apply_adjoint(const Vector& u, Vector& out) const {
    check_adjoint_dims(u);
    out = d_.cwiseProduct(u);
}

void ScaledMap::apply(const Vector& v, Vector& out) const {
    inner_->apply(v, out);
    out *= c_;
}

void ScaledMap::apply_adjoint(const Vector& u, Vector& out) const {
    inner_->apply_adjoint(u, out);
    out *= c_;
}

CompositeMap::CompositeMap(MapPtr outer, MapPtr inner)
    : outer_(std::move(outer)), inner_(std::move(inner)) {
    if (outer_->cols() != inner_->rows())
        throw DomainError("composition dimension mismatch: " +
                          std::to_string(outer_->cols()) + " vs " +
                          std::to_string(inner_->rows()));
}

void CompositeMap::apply(const Vector& v, Vector& out) const {
    Vector mid;
    inner_->apply(v, mid);
    outer_->apply(mid, out);
}

void CompositeMap::apply_adjoint(const Vector& u, Vector& out) const {
    Vector mid;
    outer_->apply_adjoint(u, mid);
    inner_->apply_adjoint(mid, out);
}

ScatterMap::ScatterMap(Index full_size, std::vector<Index> positions)
    : full_size_(full_size), positions_(std::move(positions)) {
    for (Index p : positions_)
        if (p < 0 || p >= full_size_)
            throw DomainError("scatter position out of range");
}

void ScatterMap::apply(const Vector& v, Vector& out) const {
    check_apply_dims(v);
    out = Vector::Zero(full_size_);
    for (std::size_t k = 0; k < positions_.size(); ++k)
        out[positions_[k]] = v[static_cast<Index>(k)];
}

void ScatterMap::apply_adjoint(const Vector& u, Vector& out) const {
    check_adjoint_dims(u);
    out.resize(static_cast<Index>(positions_.size()));
    for (std::size_t k = 0; k < positions_.size(); ++k)
        out[static_cast<Index>(k)] = u[positions_[k]];
}

void Diff1dMap::apply(const Vector& v, Vector& out) const {
    check_apply_dims(v);
    out.resize(n_);
    if (n_ == 0) return;
    out[0] = v[0];
    for (Index i = 1; i < n_; ++i) out[i] = v[i] - v[i - 1];
}

void Diff1dMap::apply_adjoint(const Vector& u, Vector& out) const {
    check_adjoint_dims(u);
    out.resize(n_);
    if (n_ == 0) return;
    for (Index i = 0; i + 1 < n_; ++i) out[i] = u[i] - u[i + 1];
    out[n_ - 1] = u[n_ - 1];
}

void CumSum1dMap::apply(const Vector& v, Vector& out) const {
    check_apply_dims(v);
    out.resize(n_);
    double acc = 0.0;
    for (Index i = 0; i < n_; ++i) {
        acc += v[i];
        out[i] = acc;
    }
}

void CumSum1dMap::apply_adjoint(const Vector& u, Vector& out) const {
    check_adjoint_dims(u);
    out.resize(n_);
    double acc = 0.0;
    for (Index i = n_ - 1; i >= 0; --i) {
        acc += u[i];
        out[i] = acc;
    }
}

void StackedMap::apply(const Vector& v, Vector& out) const {
    check_apply_dims(v);
    Vector top;
    inner_->apply(v, top);
    out.resize(top.size() + v.size());
    out.head(top.size()) = top;
    out.tail(v.size()) = v;
}

void StackedMap::apply_adjoint(const Vector& u, Vector& out) const {
    check_adjoint_dims(u);
    inner_->apply_adjoint(u.head(inner_->rows()), out);
    out += u.tail(inner_->cols());
}

MapPtr compose(MapPtr outer, MapPtr inner) {
    return std::make_shared<CompositeMap>(std::move(outer), std::move(inner));
}

MapPtr scale_by_prior(MapPtr A, const Vector& theta) {
    if (theta.size() != A->cols())
        throw DomainError("scale_by_prior: theta length mismatch");
    if ((theta.array() <= 0.0).any())
        throw DomainError("scale_by_prior: nonpositive variance");
    return compose(std::move(A),
                   std::make_shared<DiagonalMap>(theta.cwiseSqrt()));
}

Vector sensitivity_scaling(const LinearMap& A, double C) {
    if (C <= 0.0) throw DomainError("sensitivity scaling needs C > 0");
    Vector norms = A.column_norms_sq();
    Vector theta(norms.size());
    for (Index j = 0; j < norms.size(); ++j) {
        if (norms[j] == 0.0)
            throw ZeroColumn("column " + std::to_string(j) + " has zero norm");
        theta[j] = C / norms[j];
    }
    return theta;
}

}  // namespace ias
