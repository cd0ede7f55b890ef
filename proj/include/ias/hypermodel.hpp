#pragma once

#include <optional>

#include "ias/errors.hpp"
#include "ias/linear_map.hpp"
#include "ias/types.hpp"

namespace ias {

// Generalized gamma hypermodel pi(theta_j) ~ (theta_j/vt_j)^{rb-1}
// exp(-(theta_j/vt_j)^r) with shape exponent r != 0, shape b > 0 and
// componentwise scales vt_j > 0. The derived constant eta = r*b - 3/2
// controls both sparsity promotion and convexity: r >= 1 with eta > 0 gives
// a globally convex objective, r < 1 only a conditionally convex one.
class HyperModel {
public:
    HyperModel(double r, double beta, Vector vartheta);

    static HyperModel from_eta(double r, double eta, Vector vartheta);
    // Uniform scale convenience.
    static HyperModel from_eta(double r, double eta, double vartheta, Index n);

    double r() const { return r_; }
    double beta() const { return beta_; }
    double eta() const { return eta_; }
    const Vector& vartheta() const { return vartheta_; }
    double vartheta(Index j) const { return vartheta_[j]; }
    Index size() const { return vartheta_.size(); }

    bool globally_convex() const { return r_ >= 1.0; }
    bool locally_convex() const { return r_ < 1.0; }

    // Positivity floor for updated variances: 1e-16 * max_j vt_j.
    double theta_min() const { return theta_min_; }

private:
    double r_, beta_, eta_;
    Vector vartheta_;
    double theta_min_;
};

double eta(double r, double beta);

// Variance update g(x_j): the positive root theta of
//   -x_j^2/(2 theta^2) - eta/theta + r theta^{r-1}/vt_j^r = 0.
// Closed forms for r = +-1; safeguarded Newton in log(theta) otherwise.
// The result is clamped from below by model.theta_min().
double theta_update(double x_j, const HyperModel& model, Index j);

// Scaled variant in the dimensionless variables z = |x|/sqrt(vt),
// xi = theta/vt; theta_update is vt * theta_update_scaled(z, r, eta).
double theta_update_scaled(double z, double r, double eta);

// Integrates phi'(z) = 2 z phi / (2 r^2 phi^{r+1} + z^2), phi(0) = (eta/r)^{1/r}
// up to z_abs with a fixed-step RK4 scheme accepted by step halving.
// Cross-check oracle for theta_update: theta = vt * phi(|x|/sqrt(vt)).
double phi_ivp(double z_abs, double r, double eta);

// Componentwise convexity threshold theta_bar_j = vt_j (eta/(r|r-1|))^{1/r},
// defined for r < 1.
double convexity_bound(const HyperModel& model, Index j);

// x_bar_j = g^{-1}(theta_bar_j), the signal level at which the variance
// update leaves the convexity region:
//   x_bar^2 = 2 r theta_bar^{r+1} / vt^r - 2 eta theta_bar.
double x_bound(const HyperModel& model, Index j);

// Componentwise scales for a second model matching the background variance
// of the first: g(0|m1) = g(0|m2) per component.
Vector match_vartheta2(const HyperModel& m1, double r2, double beta2);

// Sum over components of
//   x_j^2/(2 theta_j) - eta log(theta_j/vt_j) + (theta_j/vt_j)^r.
double penalty(const Vector& x, const Vector& theta, const HyperModel& model);
// Single-component term, used by mixed-model objectives.
double penalty_term(double x_j, double theta_j, const HyperModel& model, Index j);

// Convex stage m1 (r1 >= 1) plus greedy stage m2 (r2 < 1) with matched
// background scales, and the per-component switching thresholds.
struct HybridPair {
    HyperModel m1;
    HyperModel m2;
    Vector theta_bar;  // convexity bounds of m2
    Vector x_bar;      // signal bounds g2^{-1}(theta_bar)

    // Builds m2 from (r2, eta2) with vartheta2 matched to m1's background.
    static HybridPair matched(const HyperModel& m1, double r2, double eta2);
    // Validates an explicitly supplied m2 against the matching relation
    // (1e-12 relative).
    static HybridPair checked(HyperModel m1, HyperModel m2);
};

// Batched variance update, parallel over components; serial reference kept
// for the equality tests and the benchmark.
Vector theta_update_all(const Vector& x, const HyperModel& model);
Vector theta_update_all_serial(const Vector& x, const HyperModel& model);

}  // namespace ias
