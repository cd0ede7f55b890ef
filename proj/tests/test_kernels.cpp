#include <doctest.h>

#include <random>

#include "ias/kernels.hpp"

using namespace ias;
using namespace ias::kernels;

namespace {

std::mt19937_64 eng(55);

Matrix random_matrix(Index m, Index n) {
    std::normal_distribution<double> dist;
    Matrix A(m, n);
    for (Index i = 0; i < m; ++i)
        for (Index j = 0; j < n; ++j) A(i, j) = dist(eng);
    return A;
}

Vector random_vector(Index n) {
    std::normal_distribution<double> dist;
    Vector v(n);
    for (Index i = 0; i < n; ++i) v[i] = dist(eng);
    return v;
}

}  // namespace

TEST_CASE("parallel kernels are bitwise equal to the serial references") {
    // Each parallel loop owns disjoint outputs with serial inner sums, so
    // the results must match to the last bit at any thread count.
    Matrix A = random_matrix(83, 131);
    Vector v = random_vector(131), u = random_vector(83);

    Vector par, ser;
    dense_matvec(A, v, par);
    dense_matvec_serial(A, v, ser);
    CHECK((par - ser).lpNorm<Eigen::Infinity>() == 0.0);

    dense_matvec_adjoint(A, u, par);
    dense_matvec_adjoint_serial(A, u, ser);
    CHECK((par - ser).lpNorm<Eigen::Infinity>() == 0.0);

    CHECK((column_norms_sq(A) - column_norms_sq_serial(A))
              .lpNorm<Eigen::Infinity>() == 0.0);

    Matrix Kr = random_matrix(17, 29), Kc = random_matrix(13, 23);
    Vector x = random_vector(29 * 23), uu = random_vector(17 * 13);
    separable_apply(Kr, Kc, x, par);
    separable_apply_serial(Kr, Kc, x, ser);
    CHECK((par - ser).lpNorm<Eigen::Infinity>() == 0.0);

    separable_apply_adjoint(Kr, Kc, uu, par);
    separable_apply_adjoint_serial(Kr, Kc, uu, ser);
    CHECK((par - ser).lpNorm<Eigen::Infinity>() == 0.0);
}

TEST_CASE("separable kernels agree with the dense Kronecker oracle") {
    Matrix Kr = random_matrix(5, 7), Kc = random_matrix(4, 6);
    // Dense A with row-major flattening on both sides.
    Matrix A(5 * 4, 7 * 6);
    for (Index oi = 0; oi < 5; ++oi)
        for (Index oj = 0; oj < 4; ++oj)
            for (Index i = 0; i < 7; ++i)
                for (Index j = 0; j < 6; ++j)
                    A(oi * 4 + oj, i * 6 + j) = Kr(oi, i) * Kc(oj, j);

    Vector x = random_vector(7 * 6), u = random_vector(5 * 4), got;
    separable_apply(Kr, Kc, x, got);
    CHECK((got - A * x).lpNorm<Eigen::Infinity>() < 1e-12);
    separable_apply_adjoint(Kr, Kc, u, got);
    CHECK((got - A.transpose() * u).lpNorm<Eigen::Infinity>() < 1e-12);
}

TEST_CASE("dense kernels match Eigen arithmetic") {
    Matrix A = random_matrix(31, 44);
    Vector v = random_vector(44), u = random_vector(31), got;
    dense_matvec(A, v, got);
    CHECK((got - A * v).lpNorm<Eigen::Infinity>() < 1e-12);
    dense_matvec_adjoint(A, u, got);
    CHECK((got - A.transpose() * u).lpNorm<Eigen::Infinity>() < 1e-12);
    Vector norms = column_norms_sq(A);
    for (Index j = 0; j < 44; ++j)
        CHECK(norms[j] == doctest::Approx(A.col(j).squaredNorm()).epsilon(1e-13));
}
