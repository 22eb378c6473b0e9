#include "caputo/io.hpp"

#include <cstdio>
#include <fstream>
#include <ostream>

namespace caputo {

std::string format_g17(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

namespace {

void write_rows_csv(std::ostream& out, const UniformGrid& grid,
                    const std::vector<Vec>& values) {
    const std::size_t dim = values.empty() ? 0 : values.front().size();
    out << "t";
    for (std::size_t c = 0; c < dim; ++c) out << ",x" << (c + 1);
    out << "\n";
    for (std::size_t j = 0; j < values.size(); ++j) {
        out << format_g17(grid.t(j));
        for (double v : values[j]) out << "," << format_g17(v);
        out << "\n";
    }
}

}  // namespace

void write_grid_function_csv(std::ostream& out, const GridFunction& f) {
    write_rows_csv(out, f.grid(), f.values());
}

void write_trajectory_csv(std::ostream& out, const Trajectory& x) {
    write_rows_csv(out, x.grid, x.values);
}

Json trajectory_metadata(const Trajectory& x, double alpha) {
    Json j;
    j["solver"] = x.solver;
    j["alpha"] = alpha;
    j["h"] = x.grid.h();
    j["horizon"] = x.grid.horizon();
    j["nodes"] = x.grid.nodes();
    j["dim"] = x.values.empty() ? 0 : x.values.front().size();
    j["iterations"] = x.iterations;
    j["residual"] = x.residual;
    j["iterate_ratios"] = x.iterate_ratios;
    j["warnings"] = x.warnings;
    return j;
}

Json to_json(const DefectReport& report) {
    Json j;
    j["identity"] = report.identity;
    j["defect"] = report.defect;
    j["tolerance"] = report.tolerance;
    j["h"] = report.h;
    j["alpha"] = report.alpha;
    j["pass"] = report.pass;
    Json details = Json::object();
    for (const auto& [key, value] : report.details) details[key] = value;
    j["details"] = details;
    return j;
}

Json to_json(const OmegaReport& report) {
    Json j;
    j["horizon"] = report.horizon;
    j["window"] = report.window;
    j["tolerance"] = report.tolerance;
    j["converged"] = report.converged;
    j["mean"] = report.mean;
    j["min"] = report.min;
    j["max"] = report.max;
    j["oscillation"] = report.oscillation;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot open '" + path + "' for writing");
    out << content;
    if (!out) throw std::runtime_error("failed writing '" + path + "'");
}

}  // namespace caputo
