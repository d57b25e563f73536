#include "output.hpp"

#include <cmath>
#include <cstdio>

#ifndef KSDIFF_VERSION
#define KSDIFF_VERSION "0.0.0"
#endif

namespace ksdiff::cli {

namespace {

nlohmann::json cell_json(const Cell& c) {
    return std::visit(
        [](const auto& v) -> nlohmann::json {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
                if (!std::isfinite(v)) return nullptr;
                return v;
            } else {
                return v;
            }
        },
        c);
}

std::string cell_csv(const Cell& c) {
    return std::visit(
        [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>)
                return format_double(v);
            else if constexpr (std::is_same_v<T, long long>)
                return std::to_string(v);
            else if constexpr (std::is_same_v<T, bool>)
                return v ? "true" : "false";
            else
                return csv_escape(v);
        },
        c);
}

void write_csv_header(std::ostream& os, const Meta& meta) {
    os << "# ksdiff-meta " << meta_json(meta).dump() << "\n";
}

void write_csv_row(std::ostream& os, const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) os << ',';
        os << fields[i];
    }
    os << "\n";
}

}  // namespace

bool Report::passed() const {
    for (const auto& c : checks)
        if (!c.passed) return false;
    return true;
}

std::string version() { return KSDIFF_VERSION; }

std::string format_double(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char ch : s) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

nlohmann::json meta_json(const Meta& meta) {
    nlohmann::json tol = nlohmann::json::object();
    for (const auto& [k, v] : meta.tolerances) tol[k] = v;
    nlohmann::json par = nlohmann::json::object();
    for (const auto& [k, v] : meta.parameters) par[k] = v;
    return {{"program", "ksdiff"},          {"version", version()}, {"command", meta.command},
            {"command_line", meta.command_line}, {"seed", meta.seed},    {"tolerances", tol},
            {"parameters", par}};
}

void write_table(std::ostream& os, const Meta& meta, const Table& table, Format format) {
    if (format == Format::Json) {
        nlohmann::json rows = nlohmann::json::array();
        for (const auto& r : table.rows) {
            nlohmann::json row = nlohmann::json::array();
            for (const auto& c : r) row.push_back(cell_json(c));
            rows.push_back(std::move(row));
        }
        nlohmann::json doc = {{"meta", meta_json(meta)}, {"columns", table.columns}, {"rows", std::move(rows)}};
        os << doc.dump(2) << "\n";
        return;
    }
    write_csv_header(os, meta);
    std::vector<std::string> head;
    for (const auto& c : table.columns) head.push_back(csv_escape(c));
    write_csv_row(os, head);
    for (const auto& r : table.rows) {
        std::vector<std::string> f;
        for (const auto& c : r) f.push_back(cell_csv(c));
        write_csv_row(os, f);
    }
}

void write_report(std::ostream& os, const Meta& meta, const Report& report, Format format) {
    if (format == Format::Json) {
        nlohmann::json checks = nlohmann::json::array();
        for (const auto& c : report.checks) {
            checks.push_back({{"suite", c.suite},
                              {"name", c.name},
                              {"passed", c.passed},
                              {"value", cell_json(c.value)},
                              {"reference", cell_json(c.reference)},
                              {"tolerance", cell_json(c.tolerance)},
                              {"detail", c.detail}});
        }
        nlohmann::json doc = {{"meta", meta_json(meta)}, {"passed", report.passed()}, {"checks", std::move(checks)}};
        os << doc.dump(2) << "\n";
        return;
    }
    Table t;
    t.columns = {"suite", "check", "passed", "value", "reference", "tolerance", "detail"};
    for (const auto& c : report.checks) t.add({c.suite, c.name, c.passed, c.value, c.reference, c.tolerance, c.detail});
    write_table(os, meta, t, Format::Csv);
}

}  // namespace ksdiff::cli
