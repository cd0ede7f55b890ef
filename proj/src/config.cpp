#include "ias/config.hpp"

#include <cctype>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <sstream>

#include "ias/errors.hpp"

namespace ias {

namespace {

std::string trim(const std::string& s) {
    std::size_t a = 0, b = s.size();
    while (a < b && std::isspace(static_cast<unsigned char>(s[a]))) ++a;
    while (b > a && std::isspace(static_cast<unsigned char>(s[b - 1]))) --b;
    return s.substr(a, b - a);
}

std::string fmt_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

double parse_double(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        double d = std::stod(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": invalid number '" + v + "'");
    }
}

long long parse_int(const std::string& v, const std::string& where) {
    try {
        std::size_t pos = 0;
        long long d = std::stoll(v, &pos);
        if (pos != v.size()) throw std::invalid_argument(v);
        return d;
    } catch (const std::exception&) {
        throw ConfigError(where + ": invalid integer '" + v + "'");
    }
}

bool parse_flag(const std::string& v, const std::string& where) {
    if (v == "on" || v == "true" || v == "1") return true;
    if (v == "off" || v == "false" || v == "0") return false;
    throw ConfigError(where + ": invalid flag '" + v + "' (use on/off)");
}

std::vector<double> parse_list(const std::string& v, const std::string& where) {
    std::vector<double> out;
    std::stringstream ss(v);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(parse_double(item, where));
    }
    if (out.empty()) throw ConfigError(where + ": empty list");
    return out;
}

std::string fmt_list(const std::vector<double>& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ",";
        out += fmt_double(v[i]);
    }
    return out;
}

ModelConfig& model2_of(ExperimentConfig& cfg) {
    if (!cfg.model2) cfg.model2 = ModelConfig{-1.0, -4.5, ScalingMode::Explicit, 1e-5, 1.0};
    return *cfg.model2;
}

using Setter = std::function<void(ExperimentConfig&, const std::string&, const std::string&)>;

const std::map<std::string, Setter>& setters() {
    static const std::map<std::string, Setter> table = {
        {"name", [](ExperimentConfig& c, const std::string& v, const std::string&) { c.name = v; }},
        {"problem",
         [](ExperimentConfig& c, const std::string& v, const std::string& w) {
             if (v == "deconv1d") c.problem = ProblemKind::Deconv1D;
             else if (v == "deblur2d") c.problem = ProblemKind::Deblur2D;
             else if (v == "starry") c.problem = ProblemKind::StarryNight;
             else if (v == "matrix") c.problem = ProblemKind::MatrixFile;
             else throw ConfigError(w + ": unknown problem '" + v + "'");
         }},
        {"n", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.n = parse_int(v, w); }},
        {"m", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.m = parse_int(v, w); }},
        {"n_dense", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.n_dense = parse_int(v, w); }},
        {"kappa", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.kappa = parse_double(v, w); }},
        {"jump_positions", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.jump_positions = parse_list(v, w); }},
        {"jump_levels", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.jump_levels = parse_list(v, w); }},
        {"grid_n", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.grid_n = parse_int(v, w); }},
        {"obs_m", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.obs_m = parse_int(v, w); }},
        {"blur_w", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.blur_w = parse_double(v, w); }},
        {"sources", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.sources = parse_int(v, w); }},
        {"matrix_file", [](ExperimentConfig& c, const std::string& v, const std::string&) { c.matrix_file = v; }},
        {"data_file", [](ExperimentConfig& c, const std::string& v, const std::string&) { c.data_file = v; }},
        {"truth_file", [](ExperimentConfig& c, const std::string& v, const std::string&) { c.truth_file = v; }},
        {"noise_pct", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.noise_pct = parse_double(v, w); }},
        {"seed", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.seed = static_cast<std::uint64_t>(parse_int(v, w)); }},
        {"model1.r", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.model1.r = parse_double(v, w); }},
        {"model1.eta", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.model1.eta = parse_double(v, w); }},
        {"model1.scaling",
         [](ExperimentConfig& c, const std::string& v, const std::string& w) {
             if (v == "explicit") c.model1.scaling = ScalingMode::Explicit;
             else if (v == "sensitivity") c.model1.scaling = ScalingMode::Sensitivity;
             else throw ConfigError(w + ": unknown scaling '" + v + "'");
         }},
        {"model1.vartheta", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.model1.vartheta = parse_double(v, w); }},
        {"model1.scale_c", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.model1.scale_c = parse_double(v, w); }},
        {"model2.r", [](ExperimentConfig& c, const std::string& v, const std::string& w) { model2_of(c).r = parse_double(v, w); }},
        {"model2.eta", [](ExperimentConfig& c, const std::string& v, const std::string& w) { model2_of(c).eta = parse_double(v, w); }},
        {"model2.vartheta",
         [](ExperimentConfig& c, const std::string& v, const std::string& w) {
             model2_of(c);
             c.model2_vartheta = parse_double(v, w);
         }},
        {"mode",
         [](ExperimentConfig& c, const std::string& v, const std::string& w) {
             if (v == "plain") c.mode = SolveMode::Plain;
             else if (v == "local-hybrid") c.mode = SolveMode::LocalHybrid;
             else if (v == "global-hybrid") c.mode = SolveMode::GlobalHybrid;
             else throw ConfigError(w + ": unknown mode '" + v + "'");
         }},
        {"t_switch", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.t_switch = static_cast<int>(parse_int(v, w)); }},
        {"tau", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.tau = parse_double(v, w); }},
        {"outer_tol", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.outer_tol = parse_double(v, w); }},
        {"max_outer", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.max_outer = static_cast<int>(parse_int(v, w)); }},
        {"max_cgls", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.max_cgls = parse_int(v, w); }},
        {"projection", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.projection = parse_flag(v, w); }},
        {"box_lo", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.box_lo = parse_double(v, w); }},
        {"box_hi", [](ExperimentConfig& c, const std::string& v, const std::string& w) { c.box_hi = parse_double(v, w); }},
        {"out", [](ExperimentConfig& c, const std::string& v, const std::string&) { c.out_dir = v; }},
    };
    return table;
}

void set_key(ExperimentConfig& cfg, const std::string& key, const std::string& value,
             const std::string& where) {
    auto it = setters().find(key);
    if (it == setters().end())
        throw ConfigError(where + ": unknown key '" + key + "'");
    it->second(cfg, value, where + ", key '" + key + "'");
}

}  // namespace

ExperimentConfig parse_config(const std::string& text) {
    // First pass: find an inherit directive so preset defaults apply before
    // any other key, regardless of line order.
    std::istringstream scan(text);
    std::string line;
    ExperimentConfig cfg;
    int lineno = 0;
    bool inherited = false;
    while (std::getline(scan, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError("line " + std::to_string(lineno) + ": expected key=value");
        if (trim(line.substr(0, eq)) == "inherit") {
            if (inherited)
                throw ConfigError("line " + std::to_string(lineno) +
                                  ": duplicate inherit directive");
            cfg = preset(trim(line.substr(eq + 1)));
            inherited = true;
        }
    }

    std::istringstream in(text);
    lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        auto eq = line.find('=');
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key == "inherit") continue;
        set_key(cfg, key, value, "line " + std::to_string(lineno));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path + "'");
    std::stringstream buf;
    buf << in.rdbuf();
    return parse_config(buf.str());
}

std::string serialize_config(const ExperimentConfig& cfg) {
    std::ostringstream out;
    out << "name = " << cfg.name << "\n";
    switch (cfg.problem) {
        case ProblemKind::Deconv1D: out << "problem = deconv1d\n"; break;
        case ProblemKind::Deblur2D: out << "problem = deblur2d\n"; break;
        case ProblemKind::StarryNight: out << "problem = starry\n"; break;
        case ProblemKind::MatrixFile: out << "problem = matrix\n"; break;
    }
    out << "n = " << cfg.n << "\n";
    out << "m = " << cfg.m << "\n";
    out << "n_dense = " << cfg.n_dense << "\n";
    out << "kappa = " << fmt_double(cfg.kappa) << "\n";
    out << "jump_positions = " << fmt_list(cfg.jump_positions) << "\n";
    out << "jump_levels = " << fmt_list(cfg.jump_levels) << "\n";
    out << "grid_n = " << cfg.grid_n << "\n";
    out << "obs_m = " << cfg.obs_m << "\n";
    out << "blur_w = " << fmt_double(cfg.blur_w) << "\n";
    out << "sources = " << cfg.sources << "\n";
    if (!cfg.matrix_file.empty()) out << "matrix_file = " << cfg.matrix_file << "\n";
    if (!cfg.data_file.empty()) out << "data_file = " << cfg.data_file << "\n";
    if (!cfg.truth_file.empty()) out << "truth_file = " << cfg.truth_file << "\n";
    out << "noise_pct = " << fmt_double(cfg.noise_pct) << "\n";
    out << "seed = " << cfg.seed << "\n";
    out << "model1.r = " << fmt_double(cfg.model1.r) << "\n";
    out << "model1.eta = " << fmt_double(cfg.model1.eta) << "\n";
    out << "model1.scaling = "
        << (cfg.model1.scaling == ScalingMode::Explicit ? "explicit" : "sensitivity")
        << "\n";
    out << "model1.vartheta = " << fmt_double(cfg.model1.vartheta) << "\n";
    out << "model1.scale_c = " << fmt_double(cfg.model1.scale_c) << "\n";
    if (cfg.model2) {
        out << "model2.r = " << fmt_double(cfg.model2->r) << "\n";
        out << "model2.eta = " << fmt_double(cfg.model2->eta) << "\n";
        if (cfg.model2_vartheta)
            out << "model2.vartheta = " << fmt_double(*cfg.model2_vartheta) << "\n";
    }
    switch (cfg.mode) {
        case SolveMode::Plain: out << "mode = plain\n"; break;
        case SolveMode::LocalHybrid: out << "mode = local-hybrid\n"; break;
        case SolveMode::GlobalHybrid: out << "mode = global-hybrid\n"; break;
    }
    out << "t_switch = " << cfg.t_switch << "\n";
    out << "tau = " << fmt_double(cfg.tau) << "\n";
    out << "outer_tol = " << fmt_double(cfg.outer_tol) << "\n";
    out << "max_outer = " << cfg.max_outer << "\n";
    out << "max_cgls = " << cfg.max_cgls << "\n";
    out << "projection = " << (cfg.projection ? "on" : "off") << "\n";
    if (cfg.box_lo) out << "box_lo = " << fmt_double(*cfg.box_lo) << "\n";
    if (cfg.box_hi) out << "box_hi = " << fmt_double(*cfg.box_hi) << "\n";
    out << "out = " << cfg.out_dir << "\n";
    return out.str();
}

void apply_override(ExperimentConfig& cfg, const std::string& assignment) {
    auto eq = assignment.find('=');
    if (eq == std::string::npos)
        throw ConfigError("override '" + assignment + "': expected key=value");
    set_key(cfg, trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)),
            "override");
}

namespace {

ExperimentConfig example1_base() {
    ExperimentConfig c;
    c.problem = ProblemKind::Deconv1D;
    c.n = 500;
    c.m = 91;
    c.n_dense = 1253;
    c.kappa = 40.0;
    c.noise_pct = 2.0;
    c.seed = 13;
    c.model1 = {1.0, 1e-2, ScalingMode::Explicit, 1e-5, 1.0};
    return c;
}

ExperimentConfig example2_base() {
    ExperimentConfig c;
    c.problem = ProblemKind::Deblur2D;
    c.grid_n = 48;
    c.obs_m = 24;
    c.blur_w = 0.015;
    c.noise_pct = 2.0;
    c.seed = 1;
    c.model1 = {1.0, 1e-4, ScalingMode::Explicit, 1e-3, 1.0};
    c.box_lo = 0.0;
    c.box_hi = 1.0;
    c.max_outer = 100;
    return c;
}

ExperimentConfig example3_base() {
    ExperimentConfig c;
    c.problem = ProblemKind::StarryNight;
    c.grid_n = 64;
    c.obs_m = 32;
    c.sources = 24;
    c.blur_w = 0.015;
    c.noise_pct = 1.8;
    c.seed = 3;
    c.model1 = {1.0, 1e-5, ScalingMode::Explicit, 1e-4, 1.0};
    c.max_outer = 100;
    return c;
}

void make_plain_greedy(ExperimentConfig& c, double eta2, double vartheta2) {
    c.model1.r = -1.0;
    c.model1.eta = eta2;
    c.model1.vartheta = vartheta2;
    c.mode = SolveMode::Plain;
}

void make_hybrid(ExperimentConfig& c, SolveMode mode, double eta2) {
    c.model2 = ModelConfig{-1.0, eta2, ScalingMode::Explicit, 0.0, 1.0};
    c.mode = mode;
}

}  // namespace

ExperimentConfig preset(const std::string& name) {
    ExperimentConfig c;
    if (name == "example1-plain-gamma") {
        c = example1_base();
    } else if (name == "example1-plain-invgamma") {
        c = example1_base();
        make_plain_greedy(c, -4.5, 1e-5);
    } else if (name == "example1-local-hybrid") {
        c = example1_base();
        make_hybrid(c, SolveMode::LocalHybrid, -4.5);
    } else if (name == "example1-global-hybrid") {
        c = example1_base();
        make_hybrid(c, SolveMode::GlobalHybrid, -4.5);
    } else if (name == "example2-plain-gamma") {
        c = example2_base();
    } else if (name == "example2-plain-invgamma") {
        c = example2_base();
        make_plain_greedy(c, -6.5, 1e-4);
    } else if (name == "example2-local-hybrid") {
        c = example2_base();
        make_hybrid(c, SolveMode::LocalHybrid, -6.5);
    } else if (name == "example2-global-hybrid") {
        c = example2_base();
        make_hybrid(c, SolveMode::GlobalHybrid, -6.5);
    } else if (name == "example3-plain-gamma") {
        c = example3_base();
    } else if (name == "example3-plain-invgamma") {
        c = example3_base();
        make_plain_greedy(c, -4.5, 1e-6);
    } else if (name == "example3-local-hybrid") {
        c = example3_base();
        make_hybrid(c, SolveMode::LocalHybrid, -4.5);
    } else if (name == "example3-global-hybrid") {
        c = example3_base();
        make_hybrid(c, SolveMode::GlobalHybrid, -4.5);
    } else {
        throw ConfigError("unknown preset '" + name + "'");
    }
    c.name = name;
    return c;
}

std::vector<std::string> preset_names() {
    return {
        "example1-plain-gamma",  "example1-plain-invgamma",
        "example1-local-hybrid", "example1-global-hybrid",
        "example2-plain-gamma",  "example2-plain-invgamma",
        "example2-local-hybrid", "example2-global-hybrid",
        "example3-plain-gamma",  "example3-plain-invgamma",
        "example3-local-hybrid", "example3-global-hybrid",
    };
}

}  // namespace ias
