#include "ias/kernels.hpp"

namespace ias::kernels {

void dense_matvec_serial(const Matrix& A, const Vector& v, Vector& out) {
    const Index m = A.rows();
    out.resize(m);
    for (Index i = 0; i < m; ++i) out[i] = A.row(i).dot(v);
}

void dense_matvec(const Matrix& A, const Vector& v, Vector& out) {
    const Index m = A.rows();
    out.resize(m);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < m; ++i) out[i] = A.row(i).dot(v);
}

void dense_matvec_adjoint_serial(const Matrix& A, const Vector& u, Vector& out) {
    const Index n = A.cols();
    out.resize(n);
    for (Index j = 0; j < n; ++j) out[j] = A.col(j).dot(u);
}

void dense_matvec_adjoint(const Matrix& A, const Vector& u, Vector& out) {
    const Index n = A.cols();
    out.resize(n);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) out[j] = A.col(j).dot(u);
}

Vector column_norms_sq_serial(const Matrix& A) {
    const Index n = A.cols();
    Vector out(n);
    for (Index j = 0; j < n; ++j) out[j] = A.col(j).squaredNorm();
    return out;
}

Vector column_norms_sq(const Matrix& A) {
    const Index n = A.cols();
    Vector out(n);
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < n; ++j) out[j] = A.col(j).squaredNorm();
    return out;
}

namespace {

// Shared element expressions so the serial and parallel variants cannot
// drift apart numerically.

inline double sep_row_entry(const Matrix& Kr, const Matrix& T, Index oi, Index oj) {
    // (Kr T)(oi, oj) with T = X Kc^T already formed as (n_rows x m_cols).
    return Kr.row(oi).dot(T.col(oj));
}

}  // namespace

void separable_apply_serial(const Matrix& Kr, const Matrix& Kc, const Vector& x,
                            Vector& out) {
    const Index nr = Kr.cols(), nc = Kc.cols();
    const Index mr = Kr.rows(), mc = Kc.rows();
    Eigen::Map<const Matrix> Xt(x.data(), nc, nr);  // column-major view of row-major X
    Matrix T(nr, mc);
    for (Index oj = 0; oj < mc; ++oj)
        for (Index i = 0; i < nr; ++i) T(i, oj) = Kc.row(oj).dot(Xt.col(i));
    out.resize(mr * mc);
    for (Index oi = 0; oi < mr; ++oi)
        for (Index oj = 0; oj < mc; ++oj)
            out[oi * mc + oj] = sep_row_entry(Kr, T, oi, oj);
}

void separable_apply(const Matrix& Kr, const Matrix& Kc, const Vector& x,
                     Vector& out) {
    const Index nr = Kr.cols(), nc = Kc.cols();
    const Index mr = Kr.rows(), mc = Kc.rows();
    Eigen::Map<const Matrix> Xt(x.data(), nc, nr);
    Matrix T(nr, mc);
#pragma omp parallel for schedule(static)
    for (Index oj = 0; oj < mc; ++oj)
        for (Index i = 0; i < nr; ++i) T(i, oj) = Kc.row(oj).dot(Xt.col(i));
    out.resize(mr * mc);
#pragma omp parallel for schedule(static)
    for (Index oi = 0; oi < mr; ++oi)
        for (Index oj = 0; oj < mc; ++oj)
            out[oi * mc + oj] = sep_row_entry(Kr, T, oi, oj);
}

void separable_apply_adjoint_serial(const Matrix& Kr, const Matrix& Kc,
                                    const Vector& u, Vector& out) {
    const Index nr = Kr.cols(), nc = Kc.cols();
    const Index mr = Kr.rows(), mc = Kc.rows();
    Eigen::Map<const Matrix> Ut(u.data(), mc, mr);  // column-major view of row-major U
    Matrix T(mc, nr);
    for (Index i = 0; i < nr; ++i)
        for (Index oj = 0; oj < mc; ++oj) T(oj, i) = Kr.col(i).dot(Ut.row(oj));
    out.resize(nr * nc);
    for (Index i = 0; i < nr; ++i)
        for (Index j = 0; j < nc; ++j) out[i * nc + j] = Kc.col(j).dot(T.col(i));
}

void separable_apply_adjoint(const Matrix& Kr, const Matrix& Kc, const Vector& u,
                             Vector& out) {
    const Index nr = Kr.cols(), nc = Kc.cols();
    const Index mr = Kr.rows(), mc = Kc.rows();
    Eigen::Map<const Matrix> Ut(u.data(), mc, mr);
    Matrix T(mc, nr);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < nr; ++i)
        for (Index oj = 0; oj < mc; ++oj) T(oj, i) = Kr.col(i).dot(Ut.row(oj));
    out.resize(nr * nc);
#pragma omp parallel for schedule(static)
    for (Index i = 0; i < nr; ++i)
        for (Index j = 0; j < nc; ++j) out[i * nc + j] = Kc.col(j).dot(T.col(i));
}

}  // namespace ias::kernels
