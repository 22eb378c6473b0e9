#pragma once
// Deterministic serialization: CSV with 17 significant digits (lossless for
// binary64) and JSON reports with shortest round-trip number formatting.

#include <iosfwd>
#include <string>

#include <json.hpp>

#include "caputo/defect_report.hpp"
#include "caputo/fde_solver.hpp"
#include "caputo/semigroup.hpp"

namespace caputo {

using Json = nlohmann::ordered_json;

std::string format_g17(double v);

// Header "t,x1,...,xd", one row per node.
void write_grid_function_csv(std::ostream& out, const GridFunction& f);
void write_trajectory_csv(std::ostream& out, const Trajectory& x);

Json trajectory_metadata(const Trajectory& x, double alpha);
Json to_json(const DefectReport& report);
Json to_json(const OmegaReport& report);

void write_text_file(const std::string& path, const std::string& content);

}  // namespace caputo
