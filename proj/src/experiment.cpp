#include "ias/experiment.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <set>
#include <sstream>

#include "ias/io.hpp"

namespace ias {

namespace {

Vector model_vartheta(const ModelConfig& mc, const Problem& problem) {
    const Index n = problem.n_coeffs();
    if (mc.scaling == ScalingMode::Sensitivity) {
        // Sensitivity of the data to each coefficient; for the 2D increment
        // representation the theta-independent map A L^dagger (theta = 1)
        // defines the column norms.
        if (problem.rep == Representation::Increments2D) {
            auto solver = std::make_shared<PinvSolver>(problem.graph->L,
                                                       Vector::Ones(problem.graph->n_e));
            auto op = compose(problem.signal_op, std::make_shared<PinvMap>(solver));
            return sensitivity_scaling(*op, mc.scale_c);
        }
        return sensitivity_scaling(*problem.coeff_op, mc.scale_c);
    }
    if (!(mc.vartheta > 0.0)) throw ConfigError("vartheta must be positive");
    return Vector::Constant(n, mc.vartheta);
}

}  // namespace

Problem build_problem(const ExperimentConfig& cfg) {
    switch (cfg.problem) {
        case ProblemKind::Deconv1D: {
            Deconv1dSpec spec;
            spec.n = cfg.n;
            spec.m = cfg.m;
            spec.n_dense = cfg.n_dense;
            spec.kappa = cfg.kappa;
            spec.noise_pct = cfg.noise_pct;
            spec.seed = cfg.seed;
            spec.jump_positions = cfg.jump_positions;
            spec.levels = cfg.jump_levels;
            return build_deconv1d_problem(spec);
        }
        case ProblemKind::Deblur2D: {
            Deblur2dSpec spec;
            spec.grid_n = cfg.grid_n;
            spec.obs_m = cfg.obs_m;
            spec.w = cfg.blur_w;
            spec.noise_pct = cfg.noise_pct;
            spec.seed = cfg.seed;
            return build_deblur2d_problem(spec);
        }
        case ProblemKind::StarryNight: {
            StarrySpec spec;
            spec.grid_n = cfg.grid_n;
            spec.obs_m = cfg.obs_m;
            spec.sources = cfg.sources;
            spec.w = cfg.blur_w;
            spec.noise_pct = cfg.noise_pct;
            spec.seed = cfg.seed;
            return build_starry_problem(spec);
        }
        case ProblemKind::MatrixFile: {
            if (cfg.matrix_file.empty())
                throw ConfigError("matrix problem needs matrix_file");
            Matrix A = read_matrix_csv(cfg.matrix_file);
            if (!cfg.truth_file.empty()) {
                Vector truth = read_vector_csv(cfg.truth_file);
                return build_matrix_problem(std::move(A), std::move(truth), true,
                                            cfg.noise_pct, cfg.seed);
            }
            if (cfg.data_file.empty())
                throw ConfigError("matrix problem needs truth_file or data_file");
            Vector b = read_vector_csv(cfg.data_file);
            return build_matrix_problem(std::move(A), std::move(b), false, 0.0,
                                        cfg.seed);
        }
    }
    throw ConfigError("unknown problem kind");
}

ResolvedModels build_models(const ExperimentConfig& cfg, const Problem& problem) {
    HyperModel m1 =
        HyperModel::from_eta(cfg.model1.r, cfg.model1.eta, model_vartheta(cfg.model1, problem));
    if (cfg.mode != SolveMode::Plain && !cfg.model2)
        throw ConfigError("hybrid modes need model2.*");
    std::optional<HybridPair> pair;
    if (cfg.model2) {
        if (cfg.model2_vartheta) {
            HyperModel m2 = HyperModel::from_eta(
                cfg.model2->r, cfg.model2->eta,
                Vector::Constant(problem.n_coeffs(), *cfg.model2_vartheta));
            pair = HybridPair::checked(m1, std::move(m2));
        } else {
            pair = HybridPair::matched(m1, cfg.model2->r, cfg.model2->eta);
        }
    }
    return {std::move(m1), std::move(pair)};
}

SolverControls build_controls(const ExperimentConfig& cfg) {
    SolverControls c;
    c.mode = cfg.mode;
    c.outer_tol = cfg.outer_tol;
    c.max_outer = cfg.max_outer;
    c.t_switch = cfg.t_switch;
    c.projection_enabled = cfg.projection;
    c.tau = cfg.tau;
    c.max_cgls = cfg.max_cgls;
    if (cfg.box_lo && cfg.box_hi) c.box = {*cfg.box_lo, *cfg.box_hi};
    else if (cfg.box_lo || cfg.box_hi)
        throw ConfigError("box constraint needs both box_lo and box_hi");
    return c;
}

std::vector<Index> detect_support(const Vector& x, double rel_threshold) {
    std::vector<Index> support;
    const double peak = x.cwiseAbs().maxCoeff();
    if (peak == 0.0) return support;
    const double thr = rel_threshold * peak;
    for (Index j = 0; j < x.size(); ++j)
        if (std::abs(x[j]) > thr) support.push_back(j);
    return support;
}

namespace {

std::string path_in(const std::string& dir, const std::string& file) {
    return dir + "/" + file;
}

void write_problem_files(const ExperimentConfig& cfg, const Problem& problem) {
    const std::string& dir = cfg.out_dir;
    atomic_write(path_in(dir, "config_resolved.txt"), serialize_config(cfg));
    write_vector_csv(path_in(dir, "data.csv"), problem.b);
    std::map<std::string, std::string> info;
    info["sigma"] = format_double(problem.sigma);
    info["m"] = std::to_string(problem.m());
    info["n_signal"] = std::to_string(problem.n_signal());
    info["n_coeffs"] = std::to_string(problem.n_coeffs());
    write_metrics_csv(path_in(dir, "problem.csv"), info);
    if (problem.truth_signal)
        write_vector_csv(path_in(dir, "truth_signal.csv"), *problem.truth_signal);
    if (problem.truth_coeffs)
        write_vector_csv(path_in(dir, "truth_coeffs.csv"), *problem.truth_coeffs);
}

double rel_l2_error(const Vector& est, const Vector& truth) {
    const double denom = truth.norm();
    if (denom == 0.0) return est.norm();
    return (est - truth).norm() / denom;
}

}  // namespace

void generate_experiment(const ExperimentConfig& cfg) {
    Problem problem = build_problem(cfg);
    write_problem_files(cfg, problem);
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
    Problem problem = build_problem(cfg);
    ResolvedModels models = build_models(cfg, problem);
    SolverControls controls = build_controls(cfg);

    const auto t0 = std::chrono::steady_clock::now();
    IasResult solve = models.pair ? run(problem, *models.pair, controls)
                                  : run(problem, models.m1, controls);
    const auto t1 = std::chrono::steady_clock::now();
    const double seconds = std::chrono::duration<double>(t1 - t0).count();

    const std::string& dir = cfg.out_dir;
    write_problem_files(cfg, problem);
    write_vector_csv(path_in(dir, "recon_coeffs.csv"), solve.state.x);
    write_vector_csv(path_in(dir, "recon_signal.csv"), solve.signal);
    write_vector_csv(path_in(dir, "theta.csv"), solve.state.theta);
    write_trace_csv(path_in(dir, "trace.csv"), solve.trace);
    write_bitmap_csv(path_in(dir, "bitmap.csv"), solve.trace);

    if (cfg.problem == ProblemKind::Deblur2D || cfg.problem == ProblemKind::StarryNight) {
        // Full-grid image for 2D problems (increment problems carry only
        // free nodes; bound pixels are zero).
        Vector full = Vector::Zero(cfg.grid_n * cfg.grid_n);
        if (problem.rep == Representation::Increments2D) {
            for (Index v = 0; v < problem.graph->n_v; ++v)
                full[problem.graph->free_nodes[static_cast<std::size_t>(v)]] =
                    solve.signal[v];
        } else {
            full = solve.signal;
        }
        const double hi = full.size() ? full.maxCoeff() : 1.0;
        const double lo = full.size() ? full.minCoeff() : 0.0;
        write_pgm16(path_in(dir, "recon.pgm"), full, cfg.grid_n, cfg.grid_n, lo, hi);
    }

    std::map<std::string, std::string> metrics;
    metrics["preset"] = cfg.name;
    metrics["outer_iters"] = std::to_string(solve.state.t);
    metrics["converged"] = solve.converged ? "1" : "0";
    Index total_cgls = 0;
    for (const IterationRecord& r : solve.trace) total_cgls += r.cgls_iters;
    metrics["total_cgls_iters"] = std::to_string(total_cgls);
    metrics["final_cgls_iters"] =
        std::to_string(solve.trace.empty() ? 0 : solve.trace.back().cgls_iters);
    metrics["final_objective"] = format_double(
        solve.trace.empty() ? 0.0 : solve.trace.back().objective);
    metrics["final_residual"] = format_double(
        solve.trace.empty() ? 0.0 : solve.trace.back().residual);
    metrics["final_switched"] = std::to_string(
        solve.trace.empty() ? 0 : solve.trace.back().switched_count);
    metrics["runtime_sec"] = format_double(seconds);

    const std::vector<Index> support = detect_support(solve.state.x);
    metrics["support_detected"] = std::to_string(support.size());
    if (problem.truth_coeffs) {
        const std::vector<Index> true_support = detect_support(*problem.truth_coeffs);
        metrics["support_true"] = std::to_string(true_support.size());
        std::set<Index> truth_set(true_support.begin(), true_support.end());
        std::size_t hits = 0;
        for (Index j : support)
            if (truth_set.count(j)) ++hits;
        const double precision =
            support.empty() ? 0.0 : static_cast<double>(hits) / support.size();
        const double recall = true_support.empty()
                                  ? 1.0
                                  : static_cast<double>(hits) / true_support.size();
        metrics["support_precision"] = format_double(precision);
        metrics["support_recall"] = format_double(recall);
        metrics["support_false_positives"] = std::to_string(support.size() - hits);
        metrics["rel_l2_error_coeffs"] =
            format_double(rel_l2_error(solve.state.x, *problem.truth_coeffs));
    }
    if (problem.truth_signal)
        metrics["rel_l2_error_signal"] =
            format_double(rel_l2_error(solve.signal, *problem.truth_signal));
    write_metrics_csv(path_in(dir, "metrics.csv"), metrics);

    return ExperimentResult{std::move(solve), std::move(metrics), dir};
}

std::string compare_runs(const std::string& dir_a, const std::string& dir_b) {
    const auto a = read_metrics_csv(dir_a + "/metrics.csv");
    const auto b = read_metrics_csv(dir_b + "/metrics.csv");
    std::set<std::string> keys;
    for (const auto& [k, v] : a) keys.insert(k);
    for (const auto& [k, v] : b) keys.insert(k);
    std::ostringstream out;
    out << "metric,a,b,delta\n";
    for (const std::string& k : keys) {
        const auto ia = a.find(k), ib = b.find(k);
        const std::string va = ia == a.end() ? "" : ia->second;
        const std::string vb = ib == b.end() ? "" : ib->second;
        std::string delta;
        try {
            if (!va.empty() && !vb.empty())
                delta = format_double(std::stod(vb) - std::stod(va));
        } catch (const std::exception&) {
            delta = va == vb ? "0" : "differs";
        }
        out << k << "," << va << "," << vb << "," << delta << "\n";
    }
    return out.str();
}

}  // namespace ias
