#pragma once

#include <map>
#include <ostream>
#include <string>
#include <variant>
#include <vector>

#include "json.hpp"

namespace ksdiff::cli {

enum class Format { Csv, Json };

/// Provenance block written at the top of every artifact.
struct Meta {
    std::string command;
    std::string command_line;
    unsigned long long seed = 0;
    std::map<std::string, double> tolerances;
    std::map<std::string, std::string> parameters;
};

using Cell = std::variant<double, long long, std::string, bool>;

struct Table {
    std::vector<std::string> columns;
    std::vector<std::vector<Cell>> rows;

    void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

struct Check {
    std::string suite;
    std::string name;
    bool passed = false;
    double value = 0.0;
    double reference = 0.0;
    double tolerance = 0.0;
    std::string detail;
};

struct Report {
    std::vector<Check> checks;
    bool passed() const;
};

std::string version();
/// %.17g, with nan / inf / -inf spelled out.
std::string format_double(double v);
std::string csv_escape(const std::string& s);
nlohmann::json meta_json(const Meta& meta);

void write_table(std::ostream& os, const Meta& meta, const Table& table, Format format);
void write_report(std::ostream& os, const Meta& meta, const Report& report, Format format);

}  // namespace ksdiff::cli
