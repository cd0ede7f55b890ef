// Times the OpenMP kernels against their serial references. With a single
// hardware thread the ratios sit near 1; the point is the comparison stays
// honest on any machine.

#include <chrono>
#include <cstdio>
#include <functional>

#include "ias/hypermodel.hpp"
#include "ias/kernels.hpp"
#include "ias/rng.hpp"

namespace {

using ias::Index;
using ias::Matrix;
using ias::Vector;

double time_of(const std::function<void()>& fn, int reps) {
    fn();  // warm up
    const auto t0 = std::chrono::steady_clock::now();
    for (int i = 0; i < reps; ++i) fn();
    const auto t1 = std::chrono::steady_clock::now();
    return std::chrono::duration<double>(t1 - t0).count() / reps;
}

void report(const char* name, double serial, double parallel) {
    std::printf("%-28s serial %10.4f ms   parallel %10.4f ms   speedup %5.2fx\n",
                name, serial * 1e3, parallel * 1e3, serial / parallel);
}

}  // namespace

int main() {
    ias::Rng rng(7);

    {
        const Index m = 1500, n = 1500;
        Matrix A(m, n);
        for (Index i = 0; i < m; ++i)
            for (Index j = 0; j < n; ++j) A(i, j) = rng.normal();
        Vector v = rng.normal_vector(n), u = rng.normal_vector(m), out;
        report("dense matvec",
               time_of([&] { ias::kernels::dense_matvec_serial(A, v, out); }, 20),
               time_of([&] { ias::kernels::dense_matvec(A, v, out); }, 20));
        report("dense matvec adjoint",
               time_of([&] { ias::kernels::dense_matvec_adjoint_serial(A, u, out); }, 20),
               time_of([&] { ias::kernels::dense_matvec_adjoint(A, u, out); }, 20));
        report("column norms",
               time_of([&] { ias::kernels::column_norms_sq_serial(A); }, 20),
               time_of([&] { ias::kernels::column_norms_sq(A); }, 20));
    }

    {
        const Index grid = 192, obs = 96;
        Matrix Kr(obs, grid), Kc(obs, grid);
        for (Index i = 0; i < obs; ++i)
            for (Index j = 0; j < grid; ++j) {
                Kr(i, j) = rng.normal();
                Kc(i, j) = rng.normal();
            }
        Vector x = rng.normal_vector(grid * grid), out;
        report("separable blur apply",
               time_of([&] { ias::kernels::separable_apply_serial(Kr, Kc, x, out); }, 20),
               time_of([&] { ias::kernels::separable_apply(Kr, Kc, x, out); }, 20));
    }

    {
        const Index n = 200000;
        // General exponent exercises the Newton path in every component.
        ias::HyperModel model = ias::HyperModel::from_eta(0.5, 1e-2, 1e-4, n);
        Vector x = rng.normal_vector(n);
        report("theta update batch (r=1/2)",
               time_of([&] { ias::theta_update_all_serial(x, model); }, 5),
               time_of([&] { ias::theta_update_all(x, model); }, 5));
    }

    return 0;
}
