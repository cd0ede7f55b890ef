#include "ias/hypermodel.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace ias {

namespace {

constexpr double kFloorFactor = 1e-16;

// Scaled first-order condition multiplied by xi^2:
//   F(xi) = r xi^{r+1} - eta xi - z^2/2,
// which has a unique positive root for z > 0 and is increasing through it.
inline double scaled_condition(double xi, double r, double eta_v, double half_z2) {
    return r * std::pow(xi, r + 1.0) - eta_v * xi - half_z2;
}

}  // namespace

HyperModel::HyperModel(double r, double beta, Vector vartheta)
    : r_(r), beta_(beta), vartheta_(std::move(vartheta)) {
    if (r_ == 0.0) throw InvalidModel("hypermodel exponent r must be nonzero");
    if (!(beta_ > 0.0)) throw InvalidModel("hypermodel shape beta must be positive");
    if (vartheta_.size() == 0) throw InvalidModel("hypermodel needs at least one scale");
    if (!((vartheta_.array() > 0.0).all()))
        throw InvalidModel("hypermodel scales vartheta must be positive");
    // eta = 0 (r*beta = 3/2) is the weighted-lp regime and is admitted for
    // any r; negative eta with 0 < r < 1 leaves both the variance update
    // and the convexity bounds undefined.
    eta_ = ias::eta(r_, beta_);
    if (r_ > 0.0 && r_ < 1.0 && eta_ < 0.0)
        throw InvalidModel("0 < r < 1 requires eta = r*beta - 3/2 >= 0");
    theta_min_ = kFloorFactor * vartheta_.maxCoeff();
}

HyperModel HyperModel::from_eta(double r, double eta_v, Vector vartheta) {
    if (r == 0.0) throw InvalidModel("hypermodel exponent r must be nonzero");
    return HyperModel(r, (eta_v + 1.5) / r, std::move(vartheta));
}

HyperModel HyperModel::from_eta(double r, double eta_v, double vartheta, Index n) {
    return from_eta(r, eta_v, Vector::Constant(n, vartheta));
}

double eta(double r, double beta) { return r * beta - 1.5; }

double theta_update_scaled(double z, double r, double eta_v) {
    if (r == 0.0) throw InvalidModel("r must be nonzero");
    z = std::abs(z);
    if (z == 0.0) {
        const double base = eta_v / r;
        return base > 0.0 ? std::pow(base, 1.0 / r) : 0.0;
    }
    if (r == 1.0) return 0.5 * (eta_v + std::sqrt(eta_v * eta_v + 2.0 * z * z));
    if (r == -1.0) {
        if (eta_v >= 0.0) throw InvalidModel("r = -1 requires eta < 0");
        return -(1.0 + 0.5 * z * z) / eta_v;
    }

    const double half_z2 = 0.5 * z * z;
    // Seed from the background value and the large-z asymptote, whichever
    // is larger.
    double seed = 0.0;
    if (eta_v / r > 0.0) seed = std::pow(eta_v / r, 1.0 / r);
    double asym = (r > 0.0) ? std::pow(half_z2 / r, 1.0 / (r + 1.0))
                            : half_z2 / std::max(-eta_v, 1e-300);
    seed = std::max({seed, asym, 1e-300});

    // Bracket the root by multiplicative expansion.
    double lo = seed, hi = seed;
    int guard = 0;
    while (scaled_condition(lo, r, eta_v, half_z2) >= 0.0) {
        lo *= 0.5;
        if (++guard > 2000) throw NonConvergence("theta update: bracket expansion failed");
    }
    guard = 0;
    while (scaled_condition(hi, r, eta_v, half_z2) <= 0.0) {
        hi *= 2.0;
        if (++guard > 2000) throw NonConvergence("theta update: bracket expansion failed");
    }

    // Safeguarded Newton on u = log(xi), falling back to bisection whenever
    // a step leaves the bracket.
    double ulo = std::log(lo), uhi = std::log(hi);
    double u = 0.5 * (ulo + uhi);
    const double tol = 1e-12;
    for (int it = 0; it < 100; ++it) {
        const double e1 = std::exp(u);
        const double er1 = r * std::exp((r + 1.0) * u);
        const double g = er1 - eta_v * e1 - half_z2;
        const double dg = (r + 1.0) * er1 - eta_v * e1;
        if (g > 0.0)
            uhi = u;
        else
            ulo = u;
        double unew;
        if (dg != 0.0 && std::isfinite(g / dg)) {
            unew = u - g / dg;
            if (!(unew > ulo && unew < uhi)) unew = 0.5 * (ulo + uhi);
        } else {
            unew = 0.5 * (ulo + uhi);
        }
        const double du = std::abs(unew - u);
        u = unew;
        if (du <= tol) return std::exp(u);
    }
    throw NonConvergence("theta update: Newton budget exhausted");
}

double theta_update(double x_j, const HyperModel& model, Index j) {
    if (j < 0 || j >= model.size()) throw DomainError("theta_update: index out of range");
    const double vt = model.vartheta(j);
    const double z = std::abs(x_j) / std::sqrt(vt);
    const double xi = theta_update_scaled(z, model.r(), model.eta());
    return std::max(vt * xi, model.theta_min());
}

double phi_ivp(double z_abs, double r, double eta_v) {
    if (r == 0.0) throw InvalidModel("r must be nonzero");
    const double base = eta_v / r;
    if (!(base > 0.0))
        throw InvalidModel("phi IVP needs a positive initial value (eta/r > 0)");
    if (z_abs < 0.0) throw DomainError("phi IVP: z must be nonnegative");
    double phi = std::pow(base, 1.0 / r);
    if (z_abs == 0.0) return phi;

    auto f = [r](double z, double y) {
        return 2.0 * z * y / (2.0 * r * r * std::pow(y, r + 1.0) + z * z);
    };
    auto rk4 = [&f](double z, double y, double h) {
        const double k1 = f(z, y);
        const double k2 = f(z + 0.5 * h, y + 0.5 * h * k1);
        const double k3 = f(z + 0.5 * h, y + 0.5 * h * k2);
        const double k4 = f(z + h, y + h * k3);
        return y + (h / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
    };

    const double h0 = std::min(1e-3, z_abs / 1000.0);
    const double tol = 1e-10;
    const double h_min = 1e-15 * std::max(1.0, z_abs);
    double z = 0.0;
    double h = h0;
    while (z < z_abs) {
        h = std::min(h, z_abs - z);
        const double full = rk4(z, phi, h);
        const double mid = rk4(z, phi, 0.5 * h);
        const double halves = rk4(z + 0.5 * h, mid, 0.5 * h);
        if (std::abs(full - halves) <= tol * std::max(1.0, std::abs(halves))) {
            phi = halves;
            z += h;
        } else {
            h *= 0.5;
            if (h < h_min) throw IntegrationFailure("phi IVP: step control underflow");
        }
    }
    return phi;
}

double convexity_bound(const HyperModel& model, Index j) {
    const double r = model.r();
    if (r >= 1.0) throw InvalidModel("convexity bound is defined for r < 1");
    if (r > 0.0 && model.eta() <= 0.0)
        throw InvalidModel("convexity bound for 0 < r < 1 needs eta > 0");
    const double base = model.eta() / (r * std::abs(r - 1.0));
    if (!(base > 0.0)) throw InvalidModel("convexity bound: nonpositive power base");
    return model.vartheta(j) * std::pow(base, 1.0 / r);
}

double x_bound(const HyperModel& model, Index j) {
    const double tb = convexity_bound(model, j);
    const double r = model.r();
    const double vt = model.vartheta(j);
    const double rad =
        2.0 * r * std::pow(tb, r + 1.0) / std::pow(vt, r) - 2.0 * model.eta() * tb;
    if (!(rad >= 0.0))
        throw InvalidModel("x bound: negative radicand (inconsistent parameters)");
    return std::sqrt(rad);
}

Vector match_vartheta2(const HyperModel& m1, double r2, double beta2) {
    if (r2 == 0.0) throw InvalidModel("matching: r2 must be nonzero");
    const double eta2 = eta(r2, beta2);
    const double b1 = m1.eta() / m1.r();
    const double b2 = r2 / eta2;
    if (!(b1 > 0.0) || !(b2 > 0.0))
        throw InvalidModel("matching: nonpositive power base");
    const double factor =
        std::pow(b1, 1.0 / m1.r()) * std::pow(b2, 1.0 / r2);
    return factor * m1.vartheta();
}

double penalty_term(double x_j, double theta_j, const HyperModel& model, Index j) {
    if (!(theta_j > 0.0)) throw DomainError("penalty: nonpositive variance");
    const double ratio = theta_j / model.vartheta(j);
    return 0.5 * x_j * x_j / theta_j - model.eta() * std::log(ratio) +
           std::pow(ratio, model.r());
}

double penalty(const Vector& x, const Vector& theta, const HyperModel& model) {
    if (x.size() != theta.size() || x.size() != model.size())
        throw DomainError("penalty: length mismatch");
    double sum = 0.0;
    for (Index j = 0; j < x.size(); ++j) sum += penalty_term(x[j], theta[j], model, j);
    return sum;
}

HybridPair HybridPair::matched(const HyperModel& m1, double r2, double eta2) {
    if (!(m1.r() >= 1.0)) throw InvalidModel("hybrid pair: r1 must satisfy r1 >= 1");
    if (!(r2 < 1.0) || r2 == 0.0)
        throw InvalidModel("hybrid pair: r2 must satisfy r2 < 1, r2 != 0");
    const double beta2 = (eta2 + 1.5) / r2;
    Vector vt2 = match_vartheta2(m1, r2, beta2);
    return checked(m1, HyperModel(r2, beta2, std::move(vt2)));
}

HybridPair HybridPair::checked(HyperModel m1, HyperModel m2) {
    if (!(m1.r() >= 1.0)) throw InvalidModel("hybrid pair: r1 must satisfy r1 >= 1");
    if (!(m2.r() < 1.0)) throw InvalidModel("hybrid pair: r2 must satisfy r2 < 1");
    if (m1.size() != m2.size()) throw InvalidModel("hybrid pair: size mismatch");
    Vector matched = match_vartheta2(m1, m2.r(), m2.beta());
    for (Index j = 0; j < m2.size(); ++j) {
        const double rel = std::abs(m2.vartheta(j) - matched[j]) /
                           std::max(std::abs(matched[j]),
                                    std::numeric_limits<double>::min());
        if (rel > 1e-12)
            throw InvalidModel("hybrid pair: vartheta2 violates background matching");
    }
    Vector tb(m2.size()), xb(m2.size());
    for (Index j = 0; j < m2.size(); ++j) {
        tb[j] = convexity_bound(m2, j);
        xb[j] = x_bound(m2, j);
        if (!(tb[j] > 0.0) || !(xb[j] > 0.0))
            throw InvalidModel("hybrid pair: nonpositive switching bound");
    }
    return HybridPair{std::move(m1), std::move(m2), std::move(tb), std::move(xb)};
}

Vector theta_update_all_serial(const Vector& x, const HyperModel& model) {
    if (x.size() != model.size()) throw DomainError("theta update: length mismatch");
    Vector out(x.size());
    for (Index j = 0; j < x.size(); ++j) out[j] = theta_update(x[j], model, j);
    return out;
}

Vector theta_update_all(const Vector& x, const HyperModel& model) {
    if (x.size() != model.size()) throw DomainError("theta update: length mismatch");
    Vector out(x.size());
    bool failed = false;
#pragma omp parallel for schedule(static)
    for (Index j = 0; j < x.size(); ++j) {
        try {
            out[j] = theta_update(x[j], model, j);
        } catch (const Error&) {
            // Exceptions must not escape the parallel region; re-raise after.
#pragma omp atomic write
            failed = true;
        }
    }
    if (failed) throw NonConvergence("theta update failed for at least one component");
    return out;
}

}  // namespace ias
