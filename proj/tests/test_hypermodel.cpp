#include <doctest.h>

#include <cmath>
#include <random>

#include "ias/hypermodel.hpp"

using namespace ias;

namespace {

// First-order condition of the variance update, used as the independent
// root-finding oracle.
double foc(double theta, double x, double r, double eta_v, double vt) {
    return -0.5 * x * x / (theta * theta) - eta_v / theta +
           r * std::pow(theta, r - 1.0) / std::pow(vt, r);
}

// Bisection on the first-order condition; brackets found by scanning.
double theta_by_bisection(double x, double r, double eta_v, double vt) {
    double lo = 1e-30, hi = 1e30;
    while (foc(lo, x, r, eta_v, vt) > 0.0) lo *= 10.0;
    while (foc(hi, x, r, eta_v, vt) < 0.0) hi /= 10.0;
    for (int i = 0; i < 200; ++i) {
        double mid = std::sqrt(lo * hi);
        if (foc(mid, x, r, eta_v, vt) < 0.0)
            lo = mid;
        else
            hi = mid;
    }
    return std::sqrt(lo * hi);
}

HyperModel scalar_model(double r, double eta_v, double vt, Index n = 1) {
    return HyperModel::from_eta(r, eta_v, vt, n);
}

}  // namespace

TEST_CASE("eta is r*beta - 3/2") {
    CHECK(eta(1.0, 1.5) == doctest::Approx(0.0));
    CHECK(eta(1.0, 1.51) == doctest::Approx(0.01));
    CHECK(eta(-1.0, 3.0) == doctest::Approx(-4.5));
}

TEST_CASE("hypermodel validation") {
    Vector vt = Vector::Constant(3, 1e-5);
    CHECK_THROWS_AS(HyperModel(0.0, 1.0, vt), InvalidModel);
    CHECK_THROWS_AS(HyperModel(1.0, 0.0, vt), InvalidModel);
    CHECK_THROWS_AS(HyperModel(1.0, -2.0, vt), InvalidModel);
    Vector bad = vt;
    bad[1] = 0.0;
    CHECK_THROWS_AS(HyperModel(1.0, 2.0, bad), InvalidModel);
    // 0 < r < 1 with eta < 0 is undefined; eta = 0 is the lp regime.
    CHECK_THROWS_AS(HyperModel::from_eta(0.5, -0.1, 1e-5, 3), InvalidModel);
    CHECK_NOTHROW(HyperModel::from_eta(0.5, 0.0, 1e-5, 3));

    HyperModel gamma = scalar_model(1.0, 1e-2, 1e-5);
    CHECK(gamma.globally_convex());
    CHECK(!gamma.locally_convex());
    CHECK(gamma.eta() == doctest::Approx(1e-2));
    CHECK(gamma.beta() == doctest::Approx(1.51));
    CHECK(gamma.theta_min() == doctest::Approx(1e-21));

    HyperModel inv = scalar_model(-1.0, -4.5, 1e-5);
    CHECK(inv.locally_convex());
    CHECK(inv.beta() == doctest::Approx(3.0));
}

TEST_CASE("theta update at x = 0 returns the background variance") {
    struct Case {
        double r, eta, vt;
    } cases[] = {{1.0, 1e-2, 1e-5}, {-1.0, -4.5, 1e-5}, {0.5, 0.01, 1e-4},
                 {2.0, 0.5, 1e-3}};
    for (const Case& c : cases) {
        HyperModel m = scalar_model(c.r, c.eta, c.vt);
        const double expected = c.vt * std::pow(c.eta / c.r, 1.0 / c.r);
        CHECK(theta_update(0.0, m, 0) ==
              doctest::Approx(expected).epsilon(1e-12));
    }
}

TEST_CASE("theta update closed forms r = +-1") {
    // r = 1: theta = vt (eta + sqrt(eta^2 + 2 x^2 / vt)) / 2.
    HyperModel gamma = scalar_model(1.0, 1e-2, 1.0);
    const double got = theta_update(1.0, gamma, 0);
    CHECK(got == doctest::Approx(0.7121244586351118).epsilon(1e-12));
    CHECK(got == doctest::Approx(theta_by_bisection(1.0, 1.0, 1e-2, 1.0))
                     .epsilon(1e-10));

    // r = -1: theta = (x^2/2 + vt) / |eta|.
    HyperModel inv = scalar_model(-1.0, -4.5, 1e-5);
    const double got2 = theta_update(1.0, inv, 0);
    CHECK(got2 == doctest::Approx(0.50001 / 4.5).epsilon(1e-12));
    CHECK(got2 == doctest::Approx(theta_by_bisection(1.0, -1.0, -4.5, 1e-5))
                      .epsilon(1e-10));
}

TEST_CASE("theta update general exponents match the bisection oracle") {
    struct Case {
        double r, eta, vt;
    } cases[] = {{0.5, 0.01, 1e-4}, {2.0, 0.5, 1e-3}, {-0.5, -2.0, 1e-4},
                 {-2.0, -3.6, 1e-2}, {0.75, 0.3, 1.0}};
    for (const Case& c : cases) {
        HyperModel m = scalar_model(c.r, c.eta, c.vt);
        for (double x : {1e-6, 1e-3, 0.1, 1.0, 10.0, 300.0}) {
            const double got = theta_update(x, m, 0);
            const double want = theta_by_bisection(x, c.r, c.eta, c.vt);
            CHECK(got == doctest::Approx(want).epsilon(1e-9));
        }
    }
}

TEST_CASE("theta update first-order residual is tiny") {
    struct Case {
        double r, eta, vt;
    } cases[] = {{1.0, 1e-2, 1e-5}, {-1.0, -4.5, 1e-5}, {0.5, 0.01, 1e-4},
                 {2.0, 0.5, 1e-3}};
    for (const Case& c : cases) {
        HyperModel m = scalar_model(c.r, c.eta, c.vt);
        for (double x : {1e-3, 0.3, 2.0, 50.0}) {
            const double th = theta_update(x, m, 0);
            const double resid = std::abs(foc(th, x, c.r, c.eta, c.vt));
            CHECK(resid <= 1e-9 * (1.0 / th + x * x / (th * th)));
        }
    }
}

TEST_CASE("theta update is even and strictly increasing in |x|") {
    for (double r : {1.0, 0.5, -1.0, -0.5, 2.0}) {
        const double eta_v = r > 0 ? 0.05 : -2.5;
        HyperModel m = scalar_model(r, eta_v, 1e-3);
        double prev = theta_update(0.0, m, 0);
        for (int i = 1; i <= 100; ++i) {
            const double x = 1e-3 * std::pow(1.12, i);
            const double th = theta_update(x, m, 0);
            CHECK(th == doctest::Approx(theta_update(-x, m, 0)).epsilon(1e-14));
            CHECK(th > prev);
            prev = th;
        }
    }
}

TEST_CASE("theta update is floored for degenerate backgrounds") {
    // eta = 0, r >= 1: g(0) = 0 is clamped to the positivity floor.
    HyperModel m = scalar_model(1.0, 0.0, 1e-5);
    CHECK(theta_update(0.0, m, 0) == m.theta_min());
    CHECK(theta_update(0.0, m, 0) > 0.0);
}

TEST_CASE("theta update errors") {
    CHECK_THROWS_AS(theta_update_scaled(1.0, 0.0, 0.5), InvalidModel);
    HyperModel m = scalar_model(1.0, 1e-2, 1e-5);
    CHECK_THROWS_AS(theta_update(1.0, m, 5), DomainError);
}

TEST_CASE("phi IVP initial value and closed-form agreement") {
    CHECK(phi_ivp(0.0, 0.5, 0.01) == doctest::Approx(4.0 * 0.01 * 0.01));
    CHECK(phi_ivp(0.0, -1.0, -4.5) == doctest::Approx(1.0 / 4.5));

    // r = 1, (z=1, eta=0.01, vt=1): matches the quadratic closed form.
    const double phi = phi_ivp(1.0, 1.0, 0.01);
    CHECK(std::abs(phi - 0.7121244586351118) / 0.7121244586351118 < 1e-6);
}

TEST_CASE("phi IVP small-z expansion for r = 1/2") {
    // phi(z) = 4 eta^2 + z^2/eta + O(z^4)
    const double eta_v = 0.1;
    auto err = [&](double z) {
        return std::abs(phi_ivp(z, 0.5, eta_v) -
                        (4.0 * eta_v * eta_v + z * z / eta_v));
    };
    const double e2 = err(1e-2);
    const double e3 = err(1e-3);
    CHECK(e2 < 1e-4);
    // Quartic scaling: err(1e-2)/err(1e-3) ~ 1e4; anything well above the
    // quadratic ratio 1e2 confirms the z^2 term is exact.
    CHECK(e2 / std::max(e3, 1e-14) > 5e2);
}

TEST_CASE("phi IVP agrees with theta update across exponents") {
    struct Case {
        double r, eta, vt;
    } cases[] = {{0.5, 0.01, 1e-4}, {2.0, 0.5, 1e-3}, {-1.0, -4.5, 1e-5},
                 {-0.5, -2.0, 1e-4}};
    for (const Case& c : cases) {
        HyperModel m = scalar_model(c.r, c.eta, c.vt);
        for (int i = 0; i <= 20; ++i) {
            const double z = 10.0 * i / 20.0;
            const double x = z * std::sqrt(c.vt);
            const double via_ivp = c.vt * phi_ivp(z, c.r, c.eta);
            const double via_update = theta_update(x, m, 0);
            CHECK(std::abs(via_ivp - via_update) <= 1e-6 * via_update);
        }
    }
}

TEST_CASE("phi IVP rejects nonpositive initial values") {
    CHECK_THROWS_AS(phi_ivp(1.0, 0.0, 0.5), InvalidModel);
    CHECK_THROWS_AS(phi_ivp(1.0, 1.0, 0.0), InvalidModel);   // eta/r = 0
    CHECK_THROWS_AS(phi_ivp(1.0, 0.5, -0.1), InvalidModel);  // 0<r<1, eta<0
}

TEST_CASE("convexity bound values and scaling") {
    // r = 1/2: theta_bar / vt = 16 eta^2.
    HyperModel half = scalar_model(0.5, 0.05, 1e-4);
    CHECK(convexity_bound(half, 0) / half.vartheta(0) ==
          doctest::Approx(16.0 * 0.05 * 0.05).epsilon(1e-12));

    HyperModel inv = scalar_model(-1.0, -4.5, 1e-5);
    CHECK(convexity_bound(inv, 0) ==
          doctest::Approx(1e-5 * 2.0 / 4.5).epsilon(1e-12));

    // Linear in vartheta.
    HyperModel doubled = scalar_model(-1.0, -4.5, 2e-5);
    CHECK(convexity_bound(doubled, 0) ==
          doctest::Approx(2.0 * convexity_bound(inv, 0)).epsilon(1e-12));

    // theta_bar / vartheta is component independent.
    Vector vt(3);
    vt << 1e-5, 3e-4, 2.0;
    HyperModel mixed = HyperModel::from_eta(-1.0, -4.5, vt);
    const double ratio0 = convexity_bound(mixed, 0) / vt[0];
    for (Index j : {Index{1}, Index{2}})
        CHECK(convexity_bound(mixed, j) / vt[j] ==
              doctest::Approx(ratio0).epsilon(1e-14));

    CHECK_THROWS_AS(convexity_bound(scalar_model(1.0, 0.01, 1e-5), 0),
                    InvalidModel);
    CHECK_THROWS_AS(convexity_bound(scalar_model(0.5, 0.0, 1e-5), 0),
                    InvalidModel);
}

TEST_CASE("convexity bound marks the Hessian sign change") {
    // det of the 2x2 Hessian of p(x, theta) is (eta + r(r-1)(theta/vt)^r)
    // / theta^3, independent of x; finite differences around theta_bar must
    // change sign there.
    HyperModel inv = scalar_model(-1.0, -4.5, 1e-5);
    const double tb = convexity_bound(inv, 0);
    const double x = 1e-3;
    auto det_h = [&](double th) {
        const double h = 1e-4 * th;
        const double hx = 1e-4 * x;
        auto p = [&](double xx, double tt) { return penalty_term(xx, tt, inv, 0); };
        const double ptt =
            (p(x, th + h) - 2.0 * p(x, th) + p(x, th - h)) / (h * h);
        const double pxx =
            (p(x + hx, th) - 2.0 * p(x, th) + p(x - hx, th)) / (hx * hx);
        const double pxt = (p(x + hx, th + h) - p(x + hx, th - h) -
                            p(x - hx, th + h) + p(x - hx, th - h)) /
                           (4.0 * hx * h);
        return pxx * ptt - pxt * pxt;
    };
    CHECK(det_h(0.9 * tb) > 0.0);
    CHECK(det_h(1.1 * tb) < 0.0);
}

TEST_CASE("x bound values and round trip") {
    HyperModel inv = scalar_model(-1.0, -4.5, 1e-5);
    const double xb = x_bound(inv, 0);
    CHECK(xb == doctest::Approx(std::sqrt(2e-5)).epsilon(1e-12));

    // g(x_bar) = theta_bar.
    for (double r : {-1.0, -0.5, 0.5}) {
        const double eta_v = r > 0 ? 0.05 : -3.0;
        HyperModel m = scalar_model(r, eta_v, 1e-4);
        const double tb = convexity_bound(m, 0);
        const double xbr = x_bound(m, 0);
        CHECK(theta_update(xbr, m, 0) == doctest::Approx(tb).epsilon(1e-8));
    }

    // Monotone in theta_bar: a larger vt scales theta_bar up and x_bar up.
    HyperModel small = scalar_model(-1.0, -4.5, 1e-5);
    HyperModel large = scalar_model(-1.0, -4.5, 4e-5);
    CHECK(x_bound(large, 0) > x_bound(small, 0));
}

TEST_CASE("sensitivity scaling") {
    Matrix I = Matrix::Identity(4, 4);
    DenseMap id{Matrix(I)};
    Vector vt = sensitivity_scaling(id, 1.0);
    for (Index j = 0; j < 4; ++j) CHECK(vt[j] == doctest::Approx(1.0));

    std::mt19937_64 eng(42);
    std::normal_distribution<double> dist;
    Matrix A(5, 8);
    for (Index i = 0; i < 5; ++i)
        for (Index j = 0; j < 8; ++j) A(i, j) = dist(eng);
    DenseMap map{Matrix(A)};
    Vector got = sensitivity_scaling(map, 2.5);
    for (Index j = 0; j < 8; ++j) {
        double norm2 = 0.0;
        for (Index i = 0; i < 5; ++i) norm2 += A(i, j) * A(i, j);
        CHECK(got[j] == doctest::Approx(2.5 / norm2).epsilon(1e-12));
    }

    DenseMap scaled{Matrix(2.0 * A)};
    Vector got2 = sensitivity_scaling(scaled, 2.5);
    for (Index j = 0; j < 8; ++j)
        CHECK(got2[j] == doctest::Approx(got[j] / 4.0).epsilon(1e-12));

    Matrix Z = A;
    Z.col(3).setZero();
    DenseMap zc{Matrix(Z)};
    CHECK_THROWS_AS(sensitivity_scaling(zc, 1.0), ZeroColumn);
}

TEST_CASE("background matching of the second model") {
    HyperModel m1 = scalar_model(1.0, 1e-2, 1e-5, 3);

    // Same parameters -> same scales.
    Vector same = match_vartheta2(m1, 1.0, m1.beta());
    for (Index j = 0; j < 3; ++j)
        CHECK(same[j] == doctest::Approx(1e-5).epsilon(1e-14));

    // The worked inverse-gamma case.
    Vector vt2 = match_vartheta2(m1, -1.0, (-4.5 + 1.5) / -1.0);
    for (Index j = 0; j < 3; ++j)
        CHECK(vt2[j] == doctest::Approx(4.5e-7).epsilon(1e-12));

    // Defining property: g(0 | m1) = g(0 | m2) componentwise.
    struct Pair {
        double r1, eta1, r2, eta2;
    } pairs[] = {{1.0, 1e-2, -1.0, -4.5}, {2.0, 0.3, 0.5, 0.2},
                 {1.0, 1e-4, -0.5, -2.0}, {1.5, 0.7, -1.0, -1.7}};
    for (const Pair& pr : pairs) {
        HyperModel a = scalar_model(pr.r1, pr.eta1, 1e-4, 2);
        Vector vt = match_vartheta2(a, pr.r2, (pr.eta2 + 1.5) / pr.r2);
        HyperModel b = HyperModel::from_eta(pr.r2, pr.eta2, std::move(vt));
        for (Index j = 0; j < 2; ++j) {
            const double g0a = theta_update(0.0, a, j);
            const double g0b = theta_update(0.0, b, j);
            CHECK(std::abs(g0a - g0b) <= 1e-12 * g0a);
        }
    }

    CHECK_THROWS_AS(match_vartheta2(scalar_model(1.0, 0.0, 1e-5), -1.0, 3.0),
                    InvalidModel);
}

TEST_CASE("penalty at the prior scales") {
    HyperModel m = scalar_model(1.7, 0.4, 2e-3, 6);
    Vector x = Vector::Zero(6);
    CHECK(penalty(x, m.vartheta(), m) == doctest::Approx(6.0).epsilon(1e-14));

    Vector bad = m.vartheta();
    bad[2] = 0.0;
    CHECK_THROWS_AS(penalty(x, bad, m), DomainError);
}

TEST_CASE("penalty lp identity at eta = 0") {
    std::mt19937_64 eng(7);
    std::normal_distribution<double> dist;
    for (double r : {0.5, 1.0, 2.0}) {
        const double p = 2.0 * r / (r + 1.0);
        const double cr = (r + 1.0) / std::pow(2.0 * r, r / (r + 1.0));
        HyperModel m(r, 1.5 / r, Vector::Constant(20, 3e-4));
        for (int trial = 0; trial < 20; ++trial) {
            Vector x(20);
            for (Index j = 0; j < 20; ++j) x[j] = dist(eng);
            Vector theta(20);
            double rhs = 0.0;
            for (Index j = 0; j < 20; ++j) {
                theta[j] = theta_update(x[j], m, j);
                rhs += cr * std::pow(std::abs(x[j]), p) /
                       std::pow(m.vartheta(j), p / 2.0);
            }
            const double lhs = penalty(x, theta, m);
            CHECK(std::abs(lhs - rhs) / std::abs(lhs) < 1e-6);
        }
    }
}

TEST_CASE("penalty approaches the weighted l1 norm as eta -> 0+") {
    HyperModel m = scalar_model(1.0, 1e-6, 1e-4, 10);
    std::mt19937_64 eng(11);
    std::normal_distribution<double> dist;
    Vector x(10);
    for (Index j = 0; j < 10; ++j) x[j] = dist(eng);
    Vector theta(10);
    double l1 = 0.0;
    for (Index j = 0; j < 10; ++j) {
        theta[j] = theta_update(x[j], m, j);
        l1 += std::sqrt(2.0) * std::abs(x[j]) / std::sqrt(m.vartheta(j));
    }
    const double got = penalty(x, theta, m);
    CHECK(std::abs(got - l1) / std::abs(got) < 1e-3);
}

TEST_CASE("hybrid pair construction") {
    HyperModel m1 = scalar_model(1.0, 1e-2, 1e-5, 4);
    HybridPair pair = HybridPair::matched(m1, -1.0, -4.5);
    for (Index j = 0; j < 4; ++j) {
        CHECK(pair.m2.vartheta(j) == doctest::Approx(4.5e-7).epsilon(1e-12));
        CHECK(pair.theta_bar[j] == doctest::Approx(2e-7).epsilon(1e-12));
        CHECK(pair.x_bar[j] > 0.0);
    }
    // r ordering enforced both ways.
    CHECK_THROWS_AS(HybridPair::matched(scalar_model(0.5, 0.1, 1e-5), -1.0, -4.5),
                    InvalidModel);
    CHECK_THROWS_AS(HybridPair::matched(m1, 1.5, 0.5), InvalidModel);
    // Explicit vartheta2 must satisfy the matching relation.
    HyperModel wrong = scalar_model(-1.0, -4.5, 1e-5, 4);
    CHECK_THROWS_AS(HybridPair::checked(m1, wrong), InvalidModel);
    HyperModel right = scalar_model(-1.0, -4.5, 4.5e-7, 4);
    CHECK_NOTHROW(HybridPair::checked(m1, right));
}

TEST_CASE("batched theta update matches the serial reference") {
    HyperModel m = HyperModel::from_eta(0.5, 0.02, 1e-4, 257);
    std::mt19937_64 eng(3);
    std::normal_distribution<double> dist;
    Vector x(257);
    for (Index j = 0; j < 257; ++j) x[j] = dist(eng);
    Vector par = theta_update_all(x, m);
    Vector ser = theta_update_all_serial(x, m);
    for (Index j = 0; j < 257; ++j) CHECK(par[j] == ser[j]);
}
