#include "gsa/report.hpp"

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "gsa/errors.hpp"

namespace gsa {

namespace fs = std::filesystem;

std::string format_double(double value) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value == 0.0 ? 0.0 : value);
    return buf;
}

void write_file_atomic(const std::string& path, const std::string& content) {
    static std::atomic<unsigned long> counter{0};
    const fs::path target(path);
    if (target.has_parent_path()) fs::create_directories(target.parent_path());
    const fs::path tmp = target.string() + ".tmp." + std::to_string(::getpid()) + "." + std::to_string(counter++);
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw ConfigError("output", "cannot write '" + tmp.string() + "'");
        out << content;
        out.flush();
        if (!out) throw ConfigError("output", "write failed for '" + tmp.string() + "'");
    }
    fs::rename(tmp, target);
}

std::string series_csv(const TimeSeries& series) {
    std::ostringstream out;
    out << "time";
    for (const auto& n : series.names) out << ',' << n;
    out << '\n';
    for (std::size_t i = 0; i < series.time.size(); ++i) {
        out << format_double(series.time[i]);
        for (const auto& column : series.values) out << ',' << format_double(column.at(i));
        out << '\n';
    }
    return out.str();
}

std::string series_csv(const TimeSeries& series, const std::string& name) {
    const auto& column = series.column(name);
    std::ostringstream out;
    out << "time," << name << '\n';
    for (std::size_t i = 0; i < series.time.size(); ++i)
        out << format_double(series.time[i]) << ',' << format_double(column.at(i)) << '\n';
    return out.str();
}

std::string table_csv(const Table& table) {
    std::ostringstream out;
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i];
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << format_double(row[i]);
        out << '\n';
    }
    return out.str();
}

std::string write_report(const std::string& directory, const ScenarioReport& report) {
    const fs::path dir(directory);
    fs::create_directories(dir);
    const auto json_path = (dir / "report.json").string();
    write_file_atomic(json_path, report.to_json().dump(2) + "\n");
    if (!report.series.time.empty()) {
        write_file_atomic((dir / "series.csv").string(), series_csv(report.series));
        for (const auto& name : report.series.names)
            write_file_atomic((dir / "series" / (name + ".csv")).string(), series_csv(report.series, name));
    }
    for (const auto& [name, table] : report.tables)
        write_file_atomic((dir / "tables" / (name + ".csv")).string(), table_csv(table));
    return json_path;
}

}  // namespace gsa
