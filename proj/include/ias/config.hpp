#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "ias/ias.hpp"
#include "ias/types.hpp"

namespace ias {

enum class ProblemKind { Deconv1D, Deblur2D, StarryNight, MatrixFile };

enum class ScalingMode { Explicit, Sensitivity };

struct ModelConfig {
    double r = 1.0;
    double eta = 1e-2;
    ScalingMode scaling = ScalingMode::Explicit;
    double vartheta = 1e-5;  // Explicit scaling
    double scale_c = 1.0;    // Sensitivity scaling constant C
};

// Flat key=value experiment description. Every field serializes and parses
// back losslessly; `inherit = <preset>` pulls preset defaults first.
struct ExperimentConfig {
    std::string name = "custom";
    ProblemKind problem = ProblemKind::Deconv1D;

    // Deconv1D
    Index n = 500;
    Index m = 91;
    Index n_dense = 1253;
    double kappa = 40.0;
    std::vector<double> jump_positions = {0.10, 0.23, 0.40, 0.65, 0.85};
    std::vector<double> jump_levels = {0.0, 1.0, 0.3, -0.5, 0.4, -0.2};

    // 2D problems
    Index grid_n = 48;
    Index obs_m = 24;
    double blur_w = 0.015;
    Index sources = 24;

    // MatrixFile
    std::string matrix_file;
    std::string data_file;
    std::string truth_file;

    double noise_pct = 2.0;
    std::uint64_t seed = 1;

    ModelConfig model1;
    std::optional<ModelConfig> model2;  // required by hybrid modes
    // When set, overrides the background-matched vartheta2 (plain greedy runs).
    std::optional<double> model2_vartheta;

    SolveMode mode = SolveMode::Plain;
    int t_switch = 10;
    double tau = 1.01;
    double outer_tol = 1e-6;
    int max_outer = 200;
    Index max_cgls = 0;
    bool projection = false;
    std::optional<double> box_lo, box_hi;

    std::string out_dir = "out";
};

// Parses flat key=value text (#-comments allowed). Unknown keys, bad values
// and malformed lines raise ConfigError with a line/field diagnostic.
ExperimentConfig parse_config(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);

// Lossless inverse of parse_config.
std::string serialize_config(const ExperimentConfig& cfg);

// "key=value" applied on top of an existing config.
void apply_override(ExperimentConfig& cfg, const std::string& assignment);

// Built-in presets: example{1,2,3}-{plain-gamma,plain-invgamma,local-hybrid,
// global-hybrid}.
ExperimentConfig preset(const std::string& name);
std::vector<std::string> preset_names();

}  // namespace ias
