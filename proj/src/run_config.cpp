#include "caputo/run_config.hpp"

#include <cctype>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

namespace caputo {

namespace {

std::string trim(const std::string& s) {
    std::size_t b = 0, e = s.size();
    while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
    while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
    return s.substr(b, e - b);
}

double parse_double(const std::string& key, const std::string& v) {
    std::size_t pos = 0;
    double out = 0.0;
    try {
        out = std::stod(v, &pos);
    } catch (const std::exception&) {
        throw config_error("key '" + key + "': cannot parse '" + v + "' as a number");
    }
    if (pos != v.size())
        throw config_error("key '" + key + "': trailing characters in '" + v + "'");
    if (!std::isfinite(out))
        throw config_error("key '" + key + "': value must be finite");
    return out;
}

Vec parse_vec(const std::string& key, const std::string& v) {
    std::istringstream in(v);
    Vec out;
    std::string tok;
    while (in >> tok) out.push_back(parse_double(key, tok));
    if (out.empty()) throw config_error("key '" + key + "': expected at least one number");
    return out;
}

std::size_t parse_size(const std::string& key, const std::string& v) {
    const double d = parse_double(key, v);
    if (d < 0.0 || d != std::floor(d) || d > 1e15)
        throw config_error("key '" + key + "': expected a non-negative integer");
    return static_cast<std::size_t>(d);
}

bool parse_bool(const std::string& key, const std::string& v) {
    if (v == "true" || v == "1") return true;
    if (v == "false" || v == "0") return false;
    throw config_error("key '" + key + "': expected true or false, got '" + v + "'");
}

const std::map<std::string, std::set<std::string>>& field_param_names() {
    static const std::map<std::string, std::set<std::string>> names = {
        {"zero", {"dim", "L", "offset"}},
        {"constant", {"c", "L", "offset"}},
        {"linear", {"lambda", "dim", "L", "offset"}},
        {"logistic", {"L", "offset"}},
        {"linear_forced", {"A", "omega", "L", "offset"}},
    };
    return names;
}

const std::map<std::string, std::set<std::string>>& input_param_names() {
    static const std::map<std::string, std::set<std::string>> names = {
        {"constant", {"x0"}},
        {"polynomial", {"coeffs"}},
        {"sinusoid", {"offset", "amplitude", "omega", "phase"}},
    };
    return names;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

std::string fmt(const Vec& v) {
    std::string out;
    for (std::size_t i = 0; i < v.size(); ++i) {
        if (i) out += ' ';
        out += fmt(v[i]);
    }
    return out;
}

// Collects "prefix.*" entries into a ParamMap, validating names against the
// preset's declared parameter list.
ParamMap take_params(std::map<std::string, std::string>& kv, const std::string& prefix,
                     const std::string& preset,
                     const std::map<std::string, std::set<std::string>>& allowed) {
    const auto it = allowed.find(preset);
    if (it == allowed.end())
        throw config_error("key '" + prefix + ".preset': unknown preset '" + preset + "'");
    ParamMap out;
    for (auto entry = kv.begin(); entry != kv.end();) {
        const std::string& key = entry->first;
        if (key.rfind(prefix + ".", 0) == 0) {
            const std::string param = key.substr(prefix.size() + 1);
            if (param != "preset") {
                if (!it->second.count(param))
                    throw config_error("key '" + key + "': preset '" + preset +
                                       "' takes no parameter '" + param + "'");
                out[param] = parse_vec(key, entry->second);
            }
            entry = kv.erase(entry);
        } else {
            ++entry;
        }
    }
    return out;
}

}  // namespace

RunConfig RunConfig::parse(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream in(text);
    std::string line;
    std::size_t lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const std::size_t hash = line.find('#');
        if (hash != std::string::npos) line.erase(hash);
        line = trim(line);
        if (line.empty()) continue;
        const std::size_t eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error("line " + std::to_string(lineno) +
                               ": expected 'key = value'");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (key.empty() || value.empty())
            throw config_error("line " + std::to_string(lineno) +
                               ": empty key or value");
        for (char c : key)
            if (!std::islower(static_cast<unsigned char>(c)) &&
                !std::isdigit(static_cast<unsigned char>(c)) && c != '.' &&
                c != '_' && c != 'L' && c != 'A')
                throw config_error("line " + std::to_string(lineno) +
                                   ": invalid character in key '" + key + "'");
        if (!kv.emplace(key, value).second)
            throw config_error("line " + std::to_string(lineno) + ": duplicate key '" +
                               key + "'");
    }

    RunConfig cfg;
    auto take = [&kv](const std::string& key) -> std::optional<std::string> {
        auto it = kv.find(key);
        if (it == kv.end()) return std::nullopt;
        std::string v = it->second;
        kv.erase(it);
        return v;
    };

    if (auto v = take("alpha")) cfg.alpha = parse_double("alpha", *v);
    if (auto v = take("beta")) cfg.beta = parse_double("beta", *v);
    if (!(cfg.alpha > 0.0 && cfg.alpha < 1.0))
        throw config_error("alpha must lie in (0, 1)");
    if (!(cfg.beta >= 0.0)) throw config_error("beta must be non-negative");

    if (auto v = take("field.preset")) cfg.field_preset = *v;
    cfg.field_params = take_params(kv, "field", cfg.field_preset, field_param_names());

    if (auto v = take("input.preset")) cfg.input_preset = *v;
    cfg.input_params = take_params(kv, "input", cfg.input_preset, input_param_names());

    if (auto v = take("input2.preset")) cfg.input2_preset = *v;
    if (cfg.input2_preset) {
        cfg.input2_params =
            take_params(kv, "input2", *cfg.input2_preset, input_param_names());
    }

    if (auto v = take("grid.h")) cfg.grid_h = parse_double("grid.h", *v);
    if (auto v = take("grid.horizon")) cfg.grid_horizon = parse_double("grid.horizon", *v);
    if (!(cfg.grid_h > 0.0)) throw config_error("grid.h must be positive");
    if (!(cfg.grid_horizon > 0.0)) throw config_error("grid.horizon must be positive");

    if (auto v = take("solver.method")) cfg.solver_method = *v;
    if (cfg.solver_method != "pece" && cfg.solver_method != "picard")
        throw config_error("solver.method must be 'pece' or 'picard'");
    if (auto v = take("solver.gamma")) cfg.solver_gamma = parse_double("solver.gamma", *v);
    if (auto v = take("solver.tolerance"))
        cfg.solver_tolerance = parse_double("solver.tolerance", *v);
    if (auto v = take("solver.max_iterations"))
        cfg.solver_max_iterations = parse_size("solver.max_iterations", *v);

    if (auto v = take("engine.corrections"))
        cfg.corrections = parse_bool("engine.corrections", *v);
    if (auto v = take("engine.window_rule")) cfg.window_rule = *v;
    if (cfg.window_rule != "product" && cfg.window_rule != "trapezoid")
        throw config_error("engine.window_rule must be 'product' or 'trapezoid'");
    if (auto v = take("metric.n_max")) cfg.metric_n_max = parse_size("metric.n_max", *v);
    if (cfg.metric_n_max < 1) throw config_error("metric.n_max must be at least 1");

    if (auto v = take("check.tau")) cfg.check_tau = parse_double("check.tau", *v);
    if (auto v = take("check.sigma")) cfg.check_sigma = parse_double("check.sigma", *v);
    if (auto v = take("check.tolerance"))
        cfg.check_tolerance = parse_double("check.tolerance", *v);
    if (auto v = take("check.x_star")) cfg.check_x_star = parse_vec("check.x_star", *v);
    if (cfg.check_tau < 0.0 || cfg.check_sigma < 0.0)
        throw config_error("check.tau and check.sigma must be non-negative");

    if (auto v = take("omega.x0")) cfg.omega_x0 = parse_vec("omega.x0", *v);
    if (auto v = take("omega.horizon"))
        cfg.omega_horizon = parse_double("omega.horizon", *v);
    if (auto v = take("omega.window")) cfg.omega_window = parse_double("omega.window", *v);
    if (auto v = take("omega.tolerance"))
        cfg.omega_tolerance = parse_double("omega.tolerance", *v);

    if (!kv.empty()) {
        std::string keys;
        for (const auto& [key, value] : kv) {
            if (!keys.empty()) keys += ", ";
            keys += "'" + key + "'";
        }
        throw config_error("unknown configuration key(s): " + keys);
    }

    // Fail fast on unusable presets / grids (same diagnostics as build time).
    cfg.grid();
    cfg.field();
    return cfg;
}

RunConfig RunConfig::parse_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error("cannot open config file '" + path + "'");
    std::ostringstream text;
    text << in.rdbuf();
    return parse(text.str());
}

std::string RunConfig::serialize() const {
    std::ostringstream out;
    out << "alpha = " << fmt(alpha) << "\n";
    out << "beta = " << fmt(beta) << "\n";
    auto params = [&out](const std::string& prefix, const std::string& preset,
                         const ParamMap& p) {
        out << prefix << ".preset = " << preset << "\n";
        for (const auto& [name, value] : p)
            out << prefix << "." << name << " = " << fmt(value) << "\n";
    };
    params("field", field_preset, field_params);
    params("input", input_preset, input_params);
    if (input2_preset) params("input2", *input2_preset, input2_params);
    out << "grid.h = " << fmt(grid_h) << "\n";
    out << "grid.horizon = " << fmt(grid_horizon) << "\n";
    out << "solver.method = " << solver_method << "\n";
    if (solver_gamma) out << "solver.gamma = " << fmt(*solver_gamma) << "\n";
    out << "solver.tolerance = " << fmt(solver_tolerance) << "\n";
    out << "solver.max_iterations = " << solver_max_iterations << "\n";
    out << "engine.corrections = " << (corrections ? "true" : "false") << "\n";
    out << "engine.window_rule = " << window_rule << "\n";
    out << "metric.n_max = " << metric_n_max << "\n";
    out << "check.tau = " << fmt(check_tau) << "\n";
    out << "check.sigma = " << fmt(check_sigma) << "\n";
    if (check_tolerance) out << "check.tolerance = " << fmt(*check_tolerance) << "\n";
    out << "check.x_star = " << fmt(check_x_star) << "\n";
    out << "omega.x0 = " << fmt(omega_x0) << "\n";
    out << "omega.horizon = " << fmt(omega_horizon) << "\n";
    out << "omega.window = " << fmt(omega_window) << "\n";
    out << "omega.tolerance = " << fmt(omega_tolerance) << "\n";
    return out.str();
}

UniformGrid RunConfig::grid() const {
    const double panels = grid_horizon / grid_h;
    const double rounded = std::round(panels);
    if (rounded < 1.0 || std::abs(panels - rounded) > 1e-9 * std::max(1.0, panels))
        throw config_error("grid.horizon must be a positive multiple of grid.h");
    return UniformGrid(grid_h, static_cast<std::size_t>(rounded));
}

GridFunction RunConfig::second_input(const UniformGrid& g) const {
    if (!input2_preset)
        throw config_error("this check needs a second input (input2.preset = ...)");
    return make_input(*input2_preset, input2_params, g);
}

PicardConfig RunConfig::picard_config() const {
    const double gamma =
        solver_gamma ? *solver_gamma : 2.0 * std::max(field().lipschitz(), 1e-12);
    return PicardConfig(gamma, solver_tolerance, solver_max_iterations);
}

SolverOptions RunConfig::solver_options() const {
    SolverOptions opts;
    opts.beta = beta;
    opts.corrections = corrections;
    return opts;
}

EngineOptions RunConfig::engine_options() const {
    EngineOptions opts;
    opts.solver = solver_options();
    opts.picard = solver_method == "picard";
    if (opts.picard) opts.picard_config = picard_config();
    opts.window_rule = window_rule == "trapezoid" ? EngineOptions::WindowRule::trapezoid
                                                  : EngineOptions::WindowRule::product;
    return opts;
}

}  // namespace caputo
