#pragma once

#include <filesystem>
#include <string>
#include <utility>
#include <vector>

#include <json.hpp>

#include "fmpl/grid.hpp"

namespace fmpl {

using json = nlohmann::json;

/// Field CSV: a '#'-prefixed JSON grid header, then one row per node with
/// the per-axis indices and re/im columns.
void write_field_csv(const std::filesystem::path& path, const ComplexField& u);
ComplexField read_field_csv(const std::filesystem::path& path);

void write_curve_csv(const std::filesystem::path& path, const std::string& x_name,
                     const std::string& y_name,
                     const std::vector<std::pair<double, double>>& curve);

void write_json_file(const std::filesystem::path& path, const json& j);
json read_json_file(const std::filesystem::path& path);

json grid_metadata(const Grid& g);

}  // namespace fmpl
