#pragma once

#include <string>
#include <vector>

#include "gsa/scenarios.hpp"

namespace gsa {

/// Decimal text of a double with 17 significant digits.
std::string format_double(double value);

/// Writes `content` to `path` through a temporary file in the same directory and a rename.
void write_file_atomic(const std::string& path, const std::string& content);

/// CSV with a header row: time, then every observable in declaration order. LF line endings.
std::string series_csv(const TimeSeries& series);
/// Two-column CSV (time, observable) for one named series.
std::string series_csv(const TimeSeries& series, const std::string& name);
std::string table_csv(const Table& table);

/// Writes report.json, series.csv, series/<name>.csv and tables/<name>.csv under `directory`.
/// Returns the path of report.json.
std::string write_report(const std::string& directory, const ScenarioReport& report);

}  // namespace gsa
