#include "io.hpp"

#include <charconv>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <system_error>

namespace eqflow::cli {

std::string format_number(double v) {
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 17);
    return std::string(buf, res.ptr);
}

void write_csv(const std::filesystem::path& path, const CsvTable& table) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    for (std::size_t j = 0; j < table.header.size(); ++j) out << (j ? "," : "") << table.header[j];
    out << '\n';
    const std::size_t n = table.columns.empty() ? 0 : table.columns.front().size();
    std::string line;
    for (std::size_t i = 0; i < n; ++i) {
        line.clear();
        for (std::size_t j = 0; j < table.columns.size(); ++j) {
            if (j) line += ',';
            line += format_number(table.columns[j][i]);
        }
        line += '\n';
        out << line;
    }
    if (!out) throw std::runtime_error("write failed: " + path.string());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot open " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw std::runtime_error(path.string() + ": empty file");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    {
        std::stringstream ss(line);
        std::string cell;
        while (std::getline(ss, cell, ',')) t.header.push_back(cell);
    }
    t.columns.assign(t.header.size(), {});
    int lineno = 1;
    while (std::getline(in, line)) {
        ++lineno;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        if (line.empty()) continue;
        std::size_t col = 0, pos = 0;
        while (pos <= line.size()) {
            const std::size_t end = std::min(line.find(',', pos), line.size());
            if (col >= t.columns.size())
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": too many fields");
            double v = 0.0;
            const char* first = line.data() + pos;
            const char* last = line.data() + end;
            while (first < last && *first == ' ') ++first;
            const auto res = std::from_chars(first, last, v);
            if (res.ec != std::errc() || res.ptr != last)
                throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": not a number: '" +
                                         std::string(line.data() + pos, line.data() + end) + "'");
            t.columns[col++].push_back(v);
            pos = end + 1;
        }
        if (col != t.columns.size())
            throw std::runtime_error(path.string() + ":" + std::to_string(lineno) + ": expected " +
                                     std::to_string(t.columns.size()) + " fields");
    }
    return t;
}

nlohmann::json table_json(const CsvTable& table) {
    nlohmann::json j = nlohmann::json::object();
    for (std::size_t c = 0; c < table.header.size(); ++c) j[table.header[c]] = table.columns[c];
    return j;
}

void write_json(const std::filesystem::path& path, const nlohmann::json& j) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << j.dump(2) << '\n';
}

}  // namespace eqflow::cli
