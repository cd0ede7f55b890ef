#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "ias/increments.hpp"
#include "ias/linear_map.hpp"
#include "ias/types.hpp"

namespace ias {

enum class Representation { Direct, Increments1D, Increments2D };

// A fully assembled (already whitened) inverse problem. The IAS machinery
// works on a coefficient vector whose components carry the hypermodels:
// the signal itself (Direct), its 1D first differences (Increments1D), or
// the free-edge increments of a grid image (Increments2D).
struct Problem {
    Representation rep = Representation::Direct;

    // Whitened map from the signal domain to the data (m x n_signal).
    MapPtr signal_op;
    // Whitened map from the coefficient domain to the data; null in the
    // Increments2D case, where the map depends on theta through the
    // pseudo-inverse and is assembled per outer iteration.
    MapPtr coeff_op;
    // Coefficients -> signal (1D cumulative sums); null when identical.
    MapPtr coeff_to_signal;

    Vector b;  // whitened data
    double sigma = 1.0;

    std::shared_ptr<IncrementGraph> graph;  // Increments2D only

    std::optional<Vector> truth_signal;
    std::optional<Vector> truth_coeffs;

    Index m() const { return b.size(); }
    Index n_signal() const { return signal_op->cols(); }
    Index n_coeffs() const {
        if (rep == Representation::Increments2D) return graph->n_e;
        return coeff_op->cols();
    }

    // Coefficients of a given signal (first differences / edge increments).
    Vector signal_to_coeffs(const Vector& signal) const;
};

// J_1, Bessel function of the first kind.
double bessel_j1(double t);

// A(t) = (J_1(kappa |t|) / (kappa |t|))^2 with the removable singularity
// A(0) = 1/4.
double airy_kernel(double t, double kappa);

// Trapezoid-quadrature convolution matrix for the 1D deconvolution example:
// A_{jk} = w_k A(s_j - t_k), t_k = (k-1)/(n-1) on [0,1],
// s_j = (4+j)/100 for j = 1..m.
MapPtr build_deconv_1d(Index n, Index m, double kappa);

// (1/(2 pi w^2)) exp(-||p-q||^2 / (2 w^2)).
double gaussian_kernel(double px, double py, double qx, double qy, double w);

// Gaussian blur observed on an obs_m x obs_m cell-centered lattice of a
// grid_n x grid_n pixel image over [0,1]^2, entries |cell| A(q_j, p_l).
// The kernel separates per axis, so the map stores two small factors and
// never materializes the m x n matrix.
class SeparableBlurMap final : public LinearMap {
public:
    using LinearMap::apply;
    using LinearMap::apply_adjoint;
    SeparableBlurMap(Matrix row_factor, Matrix col_factor);

    Index rows() const override { return Kr_.rows() * Kc_.rows(); }
    Index cols() const override { return Kr_.cols() * Kc_.cols(); }
    void apply(const Vector& v, Vector& out) const override;
    void apply_adjoint(const Vector& u, Vector& out) const override;
    Vector column_norms_sq() const override;

    const Matrix& row_factor() const { return Kr_; }
    const Matrix& col_factor() const { return Kc_; }

private:
    Matrix Kr_, Kc_;
};

MapPtr build_blur_2d(Index grid_n, Index obs_m, double w);

// clean = A x_true; sigma = (noise_pct/100) max|clean|; returns the whitened
// data clean/sigma + standard normal draws. noise_pct = 0 returns the clean
// signal unwhitened with sigma = 1.
std::pair<Vector, double> synth_data(const LinearMap& A, const Vector& x_true,
                                     double noise_pct, std::uint64_t seed);

// Impulse image: point sources at uniform positions with uniform [1.5, 2]
// amplitudes, binned to pixel-averaged densities on a grid x grid partition
// of [0,1]^2.
Vector starry_night(Index J, std::uint64_t seed, Index grid);

// Piecewise-constant test signal on [0,1] sampled at t_k = (k-1)/(n-1):
// value levels[s] on [positions[s-1], positions[s]).
Vector piecewise_constant_signal(Index n, const std::vector<double>& positions,
                                 const std::vector<double>& levels);

// Piecewise-constant rectangles-plus-disk phantom with values in [0,1] and
// a zero boundary ring.
Vector blocks_phantom_2d(Index grid_n);

// Problem builders for the three experiments.

struct Deconv1dSpec {
    Index n = 500;
    Index m = 91;
    Index n_dense = 1253;  // generative grid, kept different from n
    double kappa = 40.0;
    double noise_pct = 2.0;
    std::uint64_t seed = 1;
    std::vector<double> jump_positions = {0.10, 0.23, 0.40, 0.65, 0.85};
    std::vector<double> levels = {0.0, 1.0, 0.3, -0.5, 0.4, -0.2};
};
Problem build_deconv1d_problem(const Deconv1dSpec& spec);

struct Deblur2dSpec {
    Index grid_n = 48;
    Index obs_m = 24;
    double w = 0.015;
    double noise_pct = 2.0;
    std::uint64_t seed = 1;
};
Problem build_deblur2d_problem(const Deblur2dSpec& spec);

struct StarrySpec {
    Index grid_n = 64;
    Index obs_m = 32;
    Index sources = 24;
    double w = 0.015;
    double noise_pct = 1.8;
    std::uint64_t seed = 3;
};
Problem build_starry_problem(const StarrySpec& spec);

Problem build_matrix_problem(Matrix A, Vector b_or_truth, bool is_truth,
                             double noise_pct, std::uint64_t seed);

}  // namespace ias
