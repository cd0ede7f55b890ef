#pragma once

#include <memory>
#include <utility>
#include <vector>

#include "ias/errors.hpp"
#include "ias/types.hpp"

namespace ias {

// Abstract m x n linear operator exposing forward and adjoint actions.
// Implementations are immutable after construction and safe to share.
class LinearMap {
public:
    virtual ~LinearMap() = default;

    virtual Index rows() const = 0;
    virtual Index cols() const = 0;

    // out = A v
    virtual void apply(const Vector& v, Vector& out) const = 0;
    // out = A^T u
    virtual void apply_adjoint(const Vector& u, Vector& out) const = 0;

    Vector apply(const Vector& v) const {
        Vector out;
        apply(v, out);
        return out;
    }
    Vector apply_adjoint(const Vector& u) const {
        Vector out;
        apply_adjoint(u, out);
        return out;
    }

    // ||A e_j||^2 per column. The generic path applies the map to unit
    // vectors; concrete maps override with closed forms where available.
    virtual Vector column_norms_sq() const;

    // Materialization for small-scale tests and oracles.
    Matrix to_dense() const;

protected:
    void check_apply_dims(const Vector& v) const;
    void check_adjoint_dims(const Vector& u) const;
};

using MapPtr = std::shared_ptr<const LinearMap>;

// Dense matrix wrapper; applies through the row/column-parallel kernels.
class DenseMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    explicit DenseMap(Matrix A) : A_(std::move(A)) {}

    Index rows() const override { return A_.rows(); }
    Index cols() const override { return A_.cols(); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;
    Vector column_norms_sq() const override;

    const Matrix& matrix() const { return A_; }

private:
    Matrix A_;
};

// v -> d .* v (self-adjoint).
class DiagonalMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    explicit DiagonalMap(Vector d) : d_(std::move(d)) {}

    Index rows() const override { return d_.size(); }
    Index cols() const override { return d_.size(); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;
    Vector column_norms_sq() const override { return d_.cwiseAbs2(); }

private:
    Vector d_;
};

// v -> c v.
class ScaledMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    ScaledMap(double c, MapPtr inner) : c_(c), inner_(std::move(inner)) {}

    Index rows() const override { return inner_->rows(); }
    Index cols() const override { return inner_->cols(); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;
    Vector column_norms_sq() const override {
        return (c_ * c_) * inner_->column_norms_sq();
    }

private:
    double c_;
    MapPtr inner_;
};

// v -> outer(inner(v)).
class CompositeMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    CompositeMap(MapPtr outer, MapPtr inner);

    Index rows() const override { return outer_->rows(); }
    Index cols() const override { return inner_->cols(); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;

private:
    MapPtr outer_, inner_;
};

// Embeds a vector indexed by a subset into a larger zero-padded vector;
// the adjoint gathers the subset back.
class ScatterMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    ScatterMap(Index full_size, std::vector<Index> positions);

    Index rows() const override { return full_size_; }
    Index cols() const override { return static_cast<Index>(positions_.size()); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;
    Vector column_norms_sq() const override {
        return Vector::Ones(static_cast<Index>(positions_.size()));
    }

private:
    Index full_size_;
    std::vector<Index> positions_;
};

// First differences with the x_0 = 0 convention: z_1 = x_1, z_j = x_j - x_{j-1}.
class Diff1dMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    explicit Diff1dMap(Index n) : n_(n) {}

    Index rows() const override { return n_; }
    Index cols() const override { return n_; }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;

private:
    Index n_;
};

// Cumulative sums, the inverse of Diff1dMap in both orders.
class CumSum1dMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    explicit CumSum1dMap(Index n) : n_(n) {}

    Index rows() const override { return n_; }
    Index cols() const override { return n_; }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;

private:
    Index n_;
};

// [A; I]: v -> (A v, v). The least-squares solution of [A; I] w = [b; 0]
// is the Tikhonov-regularized solution of A w = b.
class StackedMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    explicit StackedMap(MapPtr inner) : inner_(std::move(inner)) {}

    Index rows() const override { return inner_->rows() + inner_->cols(); }
    Index cols() const override { return inner_->cols(); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;

private:
    MapPtr inner_;
};

MapPtr compose(MapPtr outer, MapPtr inner);

inline MapPtr make_dense(Matrix A) { return std::make_shared<DenseMap>(std::move(A)); }

// A D_theta^{1/2} as a composition; nothing is materialized.
MapPtr scale_by_prior(MapPtr A, const Vector& theta);

// theta_j = C / ||A e_j||^2.
Vector sensitivity_scaling(const LinearMap& A, double C);

}  // namespace ias
