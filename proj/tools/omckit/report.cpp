#include "report.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "config.hpp"
#include "omckit/errors.hpp"
#include "version.hpp"

namespace omckit::cli {

std::string format17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

void ensure_dir(const std::string& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw IoError("cannot create directory '" + dir + "': " + ec.message());
}

void write_table_csv(const Table& t, const std::string& dir) {
  const std::string path = dir + "/" + t.name + ".csv";
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  for (std::size_t c = 0; c < t.columns.size(); ++c)
    out << (c ? "," : "") << t.columns[c];
  out << '\n';
  for (const auto& row : t.rows) {
    if (row.size() != t.columns.size())
      throw ValidationError("table '" + t.name + "': ragged row");
    for (std::size_t c = 0; c < row.size(); ++c) {
      if (c) out << ',';
      if (!std::isnan(row[c])) out << format17(row[c]);
    }
    out << '\n';
  }
  if (!out) throw IoError("write failed for '" + path + "'");
}

Table read_table_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open '" + path + "'");
  Table t;
  t.name = std::filesystem::path(path).stem().string();
  std::string line;
  if (!std::getline(in, line))
    throw ValidationError(path + ":1: empty table");
  {
    std::stringstream hs(line);
    std::string col;
    while (std::getline(hs, col, ',')) t.columns.push_back(col);
  }
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    // manual split so trailing empty cells survive
    std::vector<std::string> cells;
    std::size_t pos = 0;
    while (true) {
      const std::size_t comma = line.find(',', pos);
      if (comma == std::string::npos) {
        cells.push_back(line.substr(pos));
        break;
      }
      cells.push_back(line.substr(pos, comma - pos));
      pos = comma + 1;
    }
    if (cells.size() != t.columns.size())
      throw ValidationError(path + ":" + std::to_string(line_no) +
                            ": expected " + std::to_string(t.columns.size()) +
                            " columns, got " + std::to_string(cells.size()));
    std::vector<double> row;
    row.reserve(cells.size());
    for (const auto& cell : cells) {
      if (cell.empty()) {
        row.push_back(std::nan(""));
        continue;
      }
      char* end = nullptr;
      const double v = std::strtod(cell.c_str(), &end);
      if (end == cell.c_str() || *end != '\0')
        throw ValidationError(path + ":" + std::to_string(line_no) +
                              ": bad numeric cell '" + cell + "'");
      row.push_back(v);
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

void write_table_svg(const Table& t, const std::string& dir) {
  if (t.columns.size() < 2 || t.rows.empty()) return;
  constexpr double kW = 640, kH = 400, kPad = 40;
  double xmin = 1e300, xmax = -1e300, ymin = 1e300, ymax = -1e300;
  for (const auto& r : t.rows) {
    if (std::isnan(r[0])) continue;
    xmin = std::min(xmin, r[0]);
    xmax = std::max(xmax, r[0]);
    for (std::size_t c = 1; c < r.size(); ++c) {
      if (std::isnan(r[c])) continue;
      ymin = std::min(ymin, r[c]);
      ymax = std::max(ymax, r[c]);
    }
  }
  if (!(xmax > xmin)) xmax = xmin + 1.0;
  if (!(ymax > ymin)) ymax = ymin + 1.0;
  const auto sx = [&](double x) {
    return kPad + (x - xmin) / (xmax - xmin) * (kW - 2 * kPad);
  };
  const auto sy = [&](double y) {
    return kH - kPad - (y - ymin) / (ymax - ymin) * (kH - 2 * kPad);
  };
  const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                          "#8c564b", "#e377c2"};
  const std::string path = dir + "/" + t.name + ".svg";
  std::ofstream out(path);
  if (!out) throw IoError("cannot open '" + path + "' for writing");
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << kW
      << "\" height=\"" << kH << "\">\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kH - kPad << "\" x2=\""
      << kW - kPad << "\" y2=\"" << kH - kPad
      << "\" stroke=\"black\"/>\n";
  out << "<line x1=\"" << kPad << "\" y1=\"" << kPad << "\" x2=\"" << kPad
      << "\" y2=\"" << kH - kPad << "\" stroke=\"black\"/>\n";
  for (std::size_t c = 1; c < t.columns.size(); ++c) {
    out << "<polyline fill=\"none\" stroke=\"" << colors[(c - 1) % 6]
        << "\" points=\"";
    for (const auto& r : t.rows) {
      if (std::isnan(r[0]) || std::isnan(r[c])) continue;
      out << sx(r[0]) << ',' << sy(r[c]) << ' ';
    }
    out << "\"/>\n";
  }
  out << "</svg>\n";
}

nlohmann::json make_provenance(const nlohmann::json& config_doc) {
  const auto now = std::chrono::system_clock::now();
  const std::time_t tt = std::chrono::system_clock::to_time_t(now);
  char stamp[32];
  std::strftime(stamp, sizeof(stamp), "%FT%TZ", std::gmtime(&tt));
  return nlohmann::json{{"config_hash", config_hash(config_doc)},
                        {"toolkit_version", kVersion},
                        {"timestamp", stamp}};
}

void write_bundle(const ReportBundle& bundle, const std::string& dir,
                  const std::vector<std::string>& formats) {
  ensure_dir(dir);
  const bool svg =
      std::find(formats.begin(), formats.end(), "svg") != formats.end();
  for (const auto& t : bundle.tables) {
    write_table_csv(t, dir);
    if (svg) write_table_svg(t, dir);
  }
  for (const auto& [name, j] : bundle.fits) {
    std::ofstream out(dir + "/" + name + ".json");
    if (!out) throw IoError("cannot write fit json '" + name + "'");
    out << j.dump(2) << '\n';
  }
  std::ofstream rep(dir + "/report.json");
  if (!rep) throw IoError("cannot write report.json");
  nlohmann::json doc;
  doc["provenance"] = bundle.provenance;
  doc["tables"] = nlohmann::json::array();
  for (const auto& t : bundle.tables) doc["tables"].push_back(t.name + ".csv");
  doc["fits"] = nlohmann::json::array();
  for (const auto& [name, j] : bundle.fits) {
    doc["fits"].push_back(name + ".json");
    (void)j;
  }
  rep << doc.dump(2) << '\n';
}

}  // namespace omckit::cli
