#pragma once

#include <map>
#include <string>

#include "ias/config.hpp"
#include "ias/forward.hpp"
#include "ias/hypermodel.hpp"
#include "ias/ias.hpp"

namespace ias {

Problem build_problem(const ExperimentConfig& cfg);

// Resolved hypermodels for a config + problem: model1 with its scaling
// applied, and the hybrid pair when model2 is configured. Hybrid pairs use
// background-matched vartheta2 unless an explicit override is present.
struct ResolvedModels {
    HyperModel m1;
    std::optional<HybridPair> pair;
};
ResolvedModels build_models(const ExperimentConfig& cfg, const Problem& problem);

SolverControls build_controls(const ExperimentConfig& cfg);

struct ExperimentResult {
    IasResult solve;
    std::map<std::string, std::string> metrics;
    std::string out_dir;
};

// Detected support under the reporting threshold |x_j| > 1e-3 max|x|.
std::vector<Index> detect_support(const Vector& x, double rel_threshold = 1e-3);

// Synthesises the problem and writes data + ground truth to cfg.out_dir.
void generate_experiment(const ExperimentConfig& cfg);

// Full pipeline: build, solve, write reconstruction/theta/trace/bitmap/
// metrics (and PGM images for 2D problems).
ExperimentResult run_experiment(const ExperimentConfig& cfg);

// Side-by-side metric comparison of two run directories; returns the table
// as delimited text (metric,a,b,delta).
std::string compare_runs(const std::string& dir_a, const std::string& dir_b);

}  // namespace ias
