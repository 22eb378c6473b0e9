#pragma once
// Parsing and validation of the run configuration: a flat text format of
// dotted keys ("section.key = value"), '#' comments, doubles/vectors/strings.
// Unknown keys are rejected so a typo cannot silently change an experiment.

#include <optional>
#include <string>

#include "caputo/presets.hpp"
#include "caputo/semigroup.hpp"

namespace caputo {

struct config_error : std::runtime_error {
    explicit config_error(const std::string& what) : std::runtime_error(what) {}
};

struct RunConfig {
    double alpha = 0.5;
    double beta = 0.0;

    std::string field_preset = "zero";
    ParamMap field_params;
    std::string input_preset = "constant";
    ParamMap input_params;
    // Optional second input (continuity checks compare two inputs).
    std::optional<std::string> input2_preset;
    ParamMap input2_params;

    double grid_h = 0.0;        // required
    double grid_horizon = 0.0;  // required

    std::string solver_method = "pece";  // "pece" | "picard"
    std::optional<double> solver_gamma;  // default 2L at build time
    double solver_tolerance = 1e-10;
    std::size_t solver_max_iterations = 200;

    bool corrections = true;
    std::string window_rule = "product";  // "product" | "trapezoid"
    std::size_t metric_n_max = 8;

    double check_tau = 0.0;
    double check_sigma = 0.0;
    std::optional<double> check_tolerance;
    Vec check_x_star{1.0};

    Vec omega_x0{1.0};
    double omega_horizon = 8.0;
    double omega_window = 2.0;
    double omega_tolerance = 1e-6;

    static RunConfig parse(const std::string& text);
    static RunConfig parse_file(const std::string& path);
    // Canonical text form; parse(serialize()) reproduces the configuration.
    std::string serialize() const;

    // Typed builders (validated).
    FractionalOrder order() const { return FractionalOrder(alpha); }
    UniformGrid grid() const;
    VectorField field() const { return make_field(field_preset, field_params); }
    TimedField timed_field() const { return make_timed_field(field_preset, field_params); }
    GridFunction input(const UniformGrid& g) const {
        return make_input(input_preset, input_params, g);
    }
    GridFunction second_input(const UniformGrid& g) const;
    PicardConfig picard_config() const;
    SolverOptions solver_options() const;
    EngineOptions engine_options() const;
    MetricParams metric_params() const { return MetricParams(metric_n_max); }
};

}  // namespace caputo
