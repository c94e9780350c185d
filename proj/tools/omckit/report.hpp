#pragma once

#include <string>
#include <vector>

#include <json.hpp>

namespace omckit::cli {

/// One named CSV payload: fixed column schema, numeric cells at 17
/// significant digits. NaN cells serialize as empty fields.
struct Table {
  std::string name;  // file stem, e.g. "series"
  std::vector<std::string> columns;
  std::vector<std::vector<double>> rows;
};

std::string format17(double v);

void write_table_csv(const Table& t, const std::string& dir);
Table read_table_csv(const std::string& path);

/// Minimal decorative SVG: first column as x, every later column as a
/// polyline. Not intended for quantitative use.
void write_table_svg(const Table& t, const std::string& dir);

struct ReportBundle {
  std::vector<Table> tables;
  std::vector<std::pair<std::string, nlohmann::json>> fits;  // name -> json
  nlohmann::json provenance;  // config hash, version, timestamp
};

void ensure_dir(const std::string& dir);

/// Writes tables (csv [+svg]), fit JSONs, and report.json with provenance.
void write_bundle(const ReportBundle& bundle, const std::string& dir,
                  const std::vector<std::string>& formats);

nlohmann::json make_provenance(const nlohmann::json& config_doc);

}  // namespace omckit::cli
