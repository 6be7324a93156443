#pragma once

#include <json.hpp>

#include <filesystem>
#include <string>
#include <vector>

namespace eqflow::cli {

/// 17 significant digits, '.' separator, no locale.
std::string format_number(double v);

struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<double>> columns;
};

void write_csv(const std::filesystem::path& path, const CsvTable& table);
/// One header line, then comma-separated numbers. Throws std::runtime_error on malformed input.
CsvTable read_csv(const std::filesystem::path& path);

/// Columns as arrays keyed by header name.
nlohmann::json table_json(const CsvTable& table);
void write_json(const std::filesystem::path& path, const nlohmann::json& j);

}  // namespace eqflow::cli
