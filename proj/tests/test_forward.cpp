#include <doctest.h>

#include <cmath>

#include "ias/forward.hpp"
#include "ias/rng.hpp"

using namespace ias;

namespace {

// Maclaurin series J1(t) = sum (-1)^k (t/2)^{2k+1} / (k! (k+1)!), summed to
// machine precision; trustworthy for |t| <~ 15.
double j1_series(double t) {
    const double half = 0.5 * t;
    double term = half;  // k = 0
    double sum = term;
    for (int k = 1; k < 60; ++k) {
        term *= -half * half / (static_cast<double>(k) * (k + 1));
        sum += term;
        if (std::abs(term) < 1e-18 * std::abs(sum)) break;
    }
    return sum;
}

}  // namespace

TEST_CASE("bessel J1 against the series oracle and pinned references") {
    CHECK(bessel_j1(0.0) == 0.0);
    CHECK(bessel_j1(1.0) == doctest::Approx(0.4400505857449335).epsilon(1e-12));

    for (double t = 0.1; t <= 15.0; t += 0.37)
        CHECK(bessel_j1(t) == doctest::Approx(j1_series(t)).epsilon(1e-11));

    // Odd symmetry.
    for (double t : {0.3, 2.0, 17.5, 80.0})
        CHECK(bessel_j1(-t) == doctest::Approx(-bessel_j1(t)).epsilon(1e-14));

    // 30-digit references beyond the series range.
    struct Ref {
        double t, value;
    } refs[] = {
        {0.5, 0.242268457674873886383954576142},
        {5.0, -0.32757913759146522203773432191},
        {12.0, -0.223447104490627612367697716364},
        {20.0, 0.0668331241758500455789929741936},
        {55.3, -0.0963140448914109335885935272338},
        {99.5, -0.0776631982430769354397902963762},
        {100.0, -0.0771453520141121580326854949272},
    };
    for (const Ref& r : refs) CHECK(std::abs(bessel_j1(r.t) - r.value) <= 1e-8);
}

TEST_CASE("airy kernel value, symmetry and width") {
    CHECK(airy_kernel(0.0, 40.0) == doctest::Approx(0.25).epsilon(1e-12));
    for (double t : {0.01, 0.05, 0.3})
        CHECK(airy_kernel(-t, 40.0) == doctest::Approx(airy_kernel(t, 40.0)));

    // FWHM by bisection on A(t) = A(0)/2.
    const double half = 0.125;
    double lo = 0.0, hi = 0.06;
    REQUIRE(airy_kernel(hi, 40.0) < half);
    for (int i = 0; i < 60; ++i) {
        const double mid = 0.5 * (lo + hi);
        (airy_kernel(mid, 40.0) > half ? lo : hi) = mid;
    }
    CHECK(std::abs(2.0 * lo - 0.08) <= 0.005);

    CHECK_THROWS_AS(airy_kernel(0.1, 0.0), DomainError);
}

TEST_CASE("1d deconvolution matrix quadrature") {
    const Index n = 500, m = 91;
    auto A = build_deconv_1d(n, m, 40.0);
    CHECK(A->rows() == m);
    CHECK(A->cols() == n);

    // Row sums approximate the integral of the kernel over [0,1]; compare
    // against a 10x refined trapezoid oracle.
    const Index nf = 10 * n;
    const double hf = 1.0 / static_cast<double>(nf - 1);
    Vector ones = Vector::Ones(n);
    Vector row_sums = A->apply(ones);
    for (Index j : {Index{0}, Index{30}, Index{60}, Index{90}}) {
        const double s = (4.0 + static_cast<double>(j + 1)) / 100.0;
        double fine = 0.0;
        for (Index k = 0; k < nf; ++k) {
            const double t = static_cast<double>(k) * hf;
            const double w = (k == 0 || k == nf - 1) ? 0.5 * hf : hf;
            fine += w * airy_kernel(s - t, 40.0);
        }
        CHECK(std::abs(row_sums[j] - fine) <= 1e-4 * std::abs(fine));
    }

}

TEST_CASE("gaussian kernel values") {
    const double w = 0.015;
    const double peak = 1.0 / (2.0 * M_PI * w * w);
    CHECK(gaussian_kernel(0.3, 0.4, 0.3, 0.4, w) == doctest::Approx(peak));
    CHECK(gaussian_kernel(0.3 + w, 0.4, 0.3, 0.4, w) ==
          doctest::Approx(peak * std::exp(-0.5)).epsilon(1e-12));

    // Quadrature oracle: the kernel integrates to ~1 over a wide grid.
    const Index g = 400;
    double integral = 0.0;
    for (Index i = 0; i < g; ++i)
        for (Index j = 0; j < g; ++j) {
            const double px = (i + 0.5) / g, py = (j + 0.5) / g;
            integral += gaussian_kernel(px, py, 0.5, 0.5, w) / (g * g);
        }
    CHECK(std::abs(integral - 1.0) < 0.02);
}

TEST_CASE("2d blur map dimensions and entries") {
    // Paper dimensions for Examples 2 and 3; the separable factors make
    // these cheap to build.
    auto ex2 = build_blur_2d(136, 68, 0.015);
    CHECK(ex2->rows() == 68 * 68);
    CHECK(ex2->cols() == 136 * 136);
    auto ex3 = build_blur_2d(128, 64, 0.015);
    CHECK(ex3->rows() == 64 * 64);
    CHECK(ex3->cols() == 128 * 128);

    // Delta input at pixel l gives the kernel samples scaled by the pixel
    // area, matching a direct dense evaluation.
    const Index gn = 9, om = 5;
    const double w = 0.1;
    auto blur = build_blur_2d(gn, om, w);
    const double area = 1.0 / static_cast<double>(gn * gn);
    for (Index l : {Index{0}, Index{22}, Index{40}, Index{80}}) {
        Vector e = Vector::Zero(gn * gn);
        e[l] = 1.0;
        Vector col = blur->apply(e);
        const Index pi = l / gn, pj = l % gn;
        const double px = (static_cast<double>(pj) + 0.5) / gn;
        const double py = (static_cast<double>(pi) + 0.5) / gn;
        for (Index o = 0; o < om * om; ++o) {
            const Index oi = o / om, oj = o % om;
            const double qx = (static_cast<double>(oj) + 0.5) / om;
            const double qy = (static_cast<double>(oi) + 0.5) / om;
            const double want = area * gaussian_kernel(qx, qy, px, py, w);
            CHECK(col[o] == doctest::Approx(want).epsilon(1e-12));
        }
    }

    // Entries are nonnegative, so interior sensitivity scaling never hits a
    // zero column.
    Vector norms = blur->column_norms_sq();
    CHECK(norms.minCoeff() > 0.0);
}

TEST_CASE("synthetic data whitening and determinism") {
    auto A = build_deconv_1d(120, 40, 40.0);
    Vector x = piecewise_constant_signal(120, {0.3, 0.7}, {0.0, 1.0, -0.5});

    // Noiseless convention: unwhitened clean signal, sigma = 1.
    auto [clean, s0] = synth_data(*A, x, 0.0, 5);
    CHECK(s0 == 1.0);
    CHECK((clean - A->apply(x)).norm() == 0.0);

    auto [b1, s1] = synth_data(*A, x, 2.0, 5);
    auto [b2, s2] = synth_data(*A, x, 2.0, 5);
    CHECK(s1 == s2);
    CHECK((b1 - b2).norm() == 0.0);  // bit-exact reproducibility
    auto [b3, s3] = synth_data(*A, x, 2.0, 6);
    CHECK((b1 - b3).norm() > 0.0);

    CHECK(s1 == doctest::Approx(0.02 * A->apply(x).cwiseAbs().maxCoeff()));

    Vector zero = Vector::Zero(120);
    CHECK_THROWS_AS(synth_data(*A, zero, 2.0, 5), DegenerateSignal);
}

TEST_CASE("starry night mass conservation and support") {
    const Index J = 80, grid = 128;
    Vector x = starry_night(J, 3, grid);
    CHECK(x.size() == grid * grid);

    // Binning conserves total mass exactly: sum x_l |cell| = sum a_k.
    Rng replay(3);
    double mass = 0.0;
    for (Index k = 0; k < J; ++k) {
        replay.uniform();
        replay.uniform();
        mass += replay.uniform(1.5, 2.0);
    }
    const double area = 1.0 / (static_cast<double>(grid) * grid);
    CHECK(x.sum() * area == doctest::Approx(mass).epsilon(1e-12));

    Index support = 0;
    for (Index l = 0; l < x.size(); ++l)
        if (x[l] != 0.0) ++support;
    CHECK(support <= J);
    CHECK(support > 0);

    // Determinism.
    Vector y = starry_night(J, 3, grid);
    CHECK((x - y).norm() == 0.0);
}

TEST_CASE("piecewise signal and its increments") {
    Vector x = piecewise_constant_signal(500, {0.10, 0.23, 0.40, 0.65, 0.85},
                                         {0.0, 1.0, 0.3, -0.5, 0.4, -0.2});
    CHECK(x[0] == 0.0);  // f(0) = 0
    Diff1dMap diff(500);
    Vector z = diff.apply(x);
    Index jumps = 0;
    for (Index k = 0; k < 500; ++k)
        if (z[k] != 0.0) ++jumps;
    CHECK(jumps == 5);

    CHECK_THROWS_AS(piecewise_constant_signal(10, {0.5}, {0.0}), DomainError);
    CHECK_THROWS_AS(piecewise_constant_signal(10, {0.5, 0.4}, {0.0, 1.0, 2.0}),
                    DomainError);
}

TEST_CASE("deconv problem carries the inverse-crime guard") {
    Deconv1dSpec spec;
    spec.n = 200;
    spec.n_dense = 200;
    CHECK_THROWS_AS(build_deconv1d_problem(spec), DomainError);

    spec.n_dense = 501;
    Problem p = build_deconv1d_problem(spec);
    CHECK(p.rep == Representation::Increments1D);
    CHECK(p.m() == 91);
    CHECK(p.n_coeffs() == 200);
    REQUIRE(p.truth_coeffs.has_value());
    Index jumps = 0;
    for (Index k = 0; k < p.truth_coeffs->size(); ++k)
        if ((*p.truth_coeffs)[k] != 0.0) ++jumps;
    CHECK(jumps == 5);
    // Whitened data: the noise part has unit scale, so ||b|| well exceeds
    // sqrt(m).
    CHECK(p.b.norm() > std::sqrt(static_cast<double>(p.m())));
}

TEST_CASE("2d problems wire the graph and the mass parametrization") {
    Deblur2dSpec spec2;
    spec2.grid_n = 16;
    spec2.obs_m = 8;
    Problem p2 = build_deblur2d_problem(spec2);
    CHECK(p2.rep == Representation::Increments2D);
    CHECK(p2.graph->n_v == 14 * 14);
    CHECK(p2.n_coeffs() == p2.graph->n_e);
    CHECK(p2.signal_op->cols() == p2.graph->n_v);
    // Truth increments have zero circulation by construction.
    CHECK(circulation_residual(*p2.graph, *p2.truth_coeffs) < 1e-12);

    StarrySpec spec3;
    spec3.grid_n = 32;
    spec3.obs_m = 16;
    spec3.sources = 10;
    Problem p3 = build_starry_problem(spec3);
    CHECK(p3.rep == Representation::Direct);
    // Mass parametrization: the solver-side truth sums to the total mass,
    // which lies in [1.5 J, 2 J].
    const double total = p3.truth_signal->sum();
    CHECK(total >= 1.5 * 10);
    CHECK(total <= 2.0 * 10);
}

TEST_CASE("example 3 synthetic data achieves the stated snr") {
    // Power SNR ||clean||^2 / (m sigma^2) for the canonical configuration.
    StarrySpec spec;
    Problem p = build_starry_problem(spec);
    // b is whitened: b = clean/sigma + e with unit noise, so the SNR is
    // ||b||^2/m - 1 in expectation.
    const double snr =
        p.b.squaredNorm() / static_cast<double>(p.m()) - 1.0;
    CHECK(snr >= 20.0);
    CHECK(snr <= 30.0);
}

TEST_CASE("blocks phantom is piecewise constant in [0,1] with zero ring") {
    const Index gn = 48;
    Vector img = blocks_phantom_2d(gn);
    CHECK(img.minCoeff() >= 0.0);
    CHECK(img.maxCoeff() <= 1.0);
    CHECK(img.maxCoeff() > 0.5);
    for (Index i = 0; i < gn; ++i) {
        CHECK(img[i] == 0.0);
        CHECK(img[(gn - 1) * gn + i] == 0.0);
        CHECK(img[i * gn] == 0.0);
        CHECK(img[i * gn + gn - 1] == 0.0);
    }
    // Piecewise constant: few distinct values.
    std::vector<double> values;
    for (Index l = 0; l < img.size(); ++l) {
        bool seen = false;
        for (double v : values) seen |= v == img[l];
        if (!seen) values.push_back(img[l]);
    }
    CHECK(values.size() <= 4);
}
