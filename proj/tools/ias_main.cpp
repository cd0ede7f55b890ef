// Experiment runner for the hierarchical-Bayes sparse solvers: synthesize
// data, run any solver mode, and compare run directories.

#include <cstdio>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "ias/config.hpp"
#include "ias/errors.hpp"
#include "ias/experiment.hpp"
#include "ias/io.hpp"

namespace {

struct CommonArgs {
    std::string preset;
    std::string config_path;
    std::vector<std::string> overrides;
    std::string out_dir;
    long long seed = -1;
};

void add_common(CLI::App* cmd, CommonArgs& args) {
    cmd->add_option("--preset", args.preset, "built-in preset name");
    cmd->add_option("--config", args.config_path, "key=value config file");
    cmd->add_option("--override", args.overrides, "key=value applied last")
        ->take_all();
    cmd->add_option("--out", args.out_dir, "output directory");
    cmd->add_option("--seed", args.seed, "RNG seed");
}

ias::ExperimentConfig resolve_config(const CommonArgs& args) {
    if (args.preset.empty() && args.config_path.empty())
        throw ias::ConfigError("need --preset or --config");
    ias::ExperimentConfig cfg;
    if (!args.preset.empty()) cfg = ias::preset(args.preset);
    if (!args.config_path.empty()) {
        if (!args.preset.empty())
            throw ias::ConfigError("--preset and --config are mutually exclusive; "
                                   "use 'inherit = <preset>' inside the config");
        cfg = ias::parse_config_file(args.config_path);
    }
    if (args.seed >= 0) cfg.seed = static_cast<std::uint64_t>(args.seed);
    if (!args.out_dir.empty()) cfg.out_dir = args.out_dir;
    for (const std::string& ov : args.overrides) ias::apply_override(cfg, ov);
    return cfg;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Sparsity-promoting hierarchical Bayesian solvers"};
    app.require_subcommand(1);

    CommonArgs gen_args, run_args;
    std::string cmp_a, cmp_b;

    CLI::App* gen = app.add_subcommand("generate", "synthesize and pin data");
    add_common(gen, gen_args);

    CLI::App* runc = app.add_subcommand("run", "solve an experiment");
    add_common(runc, run_args);

    CLI::App* cmp = app.add_subcommand("compare", "diff two run directories");
    cmp->add_option("dir_a", cmp_a, "first run directory")->required();
    cmp->add_option("dir_b", cmp_b, "second run directory")->required();

    CLI::App* lst = app.add_subcommand("presets", "list built-in presets");

    CLI11_PARSE(app, argc, argv);

    try {
        if (gen->parsed()) {
            ias::generate_experiment(resolve_config(gen_args));
            return 0;
        }
        if (runc->parsed()) {
            ias::ExperimentConfig cfg = resolve_config(run_args);
            ias::ExperimentResult result = ias::run_experiment(cfg);
            for (const auto& [key, value] : result.metrics)
                std::printf("%s = %s\n", key.c_str(), value.c_str());
            std::printf("artifacts: %s\n", result.out_dir.c_str());
            return 0;
        }
        if (cmp->parsed()) {
            std::cout << ias::compare_runs(cmp_a, cmp_b);
            return 0;
        }
        if (lst->parsed()) {
            for (const std::string& name : ias::preset_names())
                std::printf("%s\n", name.c_str());
            return 0;
        }
    } catch (const ias::ConfigError& e) {
        std::fprintf(stderr, "config error: %s\n", e.what());
        return 2;
    } catch (const ias::MissingArtifact& e) {
        std::fprintf(stderr, "missing artifact: %s\n", e.what());
        return 3;
    } catch (const ias::IoError& e) {
        std::fprintf(stderr, "io error: %s\n", e.what());
        return 3;
    } catch (const ias::Error& e) {
        std::fprintf(stderr, "solver error: %s\n", e.what());
        return 4;
    }
    return 0;
}
