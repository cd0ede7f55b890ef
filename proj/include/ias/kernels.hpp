#pragma once

#include "ias/types.hpp"

// Hot inner loops, each in two variants: an OpenMP-parallel version used by
// the production paths and a plain serial reference used by the tests and
// the benchmark. Every parallel loop writes disjoint output elements with a
// serial inner accumulation, so results are identical for any thread count.
namespace ias::kernels {

// out = A v (dense, row-parallel).
void dense_matvec(const Matrix& A, const Vector& v, Vector& out);
void dense_matvec_serial(const Matrix& A, const Vector& v, Vector& out);

// out = A^T u (dense, column-parallel; columns are contiguous).
void dense_matvec_adjoint(const Matrix& A, const Vector& u, Vector& out);
void dense_matvec_adjoint_serial(const Matrix& A, const Vector& u, Vector& out);

// out_j = ||A e_j||^2.
Vector column_norms_sq(const Matrix& A);
Vector column_norms_sq_serial(const Matrix& A);

// B = Kr X Kc^T for X of size (Kr.cols() x Kc.cols()), row-major flattening.
// Used by the separable convolution map; parallel over rows of B.
void separable_apply(const Matrix& Kr, const Matrix& Kc, const Vector& x,
                     Vector& out);
void separable_apply_serial(const Matrix& Kr, const Matrix& Kc, const Vector& x,
                            Vector& out);

// X = Kr^T B Kc, the adjoint of separable_apply.
void separable_apply_adjoint(const Matrix& Kr, const Matrix& Kc, const Vector& u,
                             Vector& out);
void separable_apply_adjoint_serial(const Matrix& Kr, const Matrix& Kc,
                                    const Vector& u, Vector& out);

}  // namespace ias::kernels
