#include "divdis/report.hpp"

#include <cmath>
#include <cstdio>

#include <json.hpp>

#include "divdis/error.hpp"
#include "divdis/io.hpp"

namespace divdis::report {

namespace fs = std::filesystem;

void Table::add(std::vector<Cell> row) {
  if (row.size() != columns.size()) {
    fail(ErrorCode::InvalidArgument, "table '" + name + "': row has " + std::to_string(row.size()) +
                                         " cells, expected " + std::to_string(columns.size()));
  }
  rows.push_back(std::move(row));
}

std::string format_sig6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  std::string s = buf;
  return s == "-0" ? "0" : s;
}

std::string format_fixed2(double v) {
  if (!std::isfinite(v)) return format_sig6(v);
  char buf[48];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

namespace {

std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + "\"";
}

std::string csv_cell(const Cell& c) {
  struct Visitor {
    std::string operator()(std::monostate) const { return {}; }
    std::string operator()(const std::string& s) const { return csv_escape(s); }
    std::string operator()(double d) const { return format_sig6(d); }
    std::string operator()(std::int64_t i) const { return std::to_string(i); }
    std::string operator()(bool b) const { return b ? "true" : "false"; }
  };
  return std::visit(Visitor{}, c);
}

nlohmann::ordered_json json_cell(const Cell& c) {
  struct Visitor {
    nlohmann::ordered_json operator()(std::monostate) const { return nullptr; }
    nlohmann::ordered_json operator()(const std::string& s) const { return s; }
    nlohmann::ordered_json operator()(double d) const { return d; }
    nlohmann::ordered_json operator()(std::int64_t i) const { return i; }
    nlohmann::ordered_json operator()(bool b) const { return b; }
  };
  return std::visit(Visitor{}, c);
}

}  // namespace

std::string to_csv(const Table& t) {
  std::string out;
  for (const auto& c : t.comments) out += "# " + c + "\n";
  for (std::size_t i = 0; i < t.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_escape(t.columns[i]);
  }
  out += '\n';
  for (const auto& row : t.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_cell(row[i]);
    }
    out += '\n';
  }
  return out;
}

std::string to_json(const Table& t) {
  nlohmann::ordered_json doc;
  doc["name"] = t.name;
  if (!t.comments.empty()) doc["comments"] = t.comments;
  doc["columns"] = t.columns;
  doc["rows"] = nlohmann::ordered_json::array();
  for (const auto& row : t.rows) {
    nlohmann::ordered_json obj = nlohmann::ordered_json::object();
    for (std::size_t i = 0; i < row.size(); ++i) obj[t.columns[i]] = json_cell(row[i]);
    doc["rows"].push_back(std::move(obj));
  }
  return doc.dump(2) + "\n";
}

std::vector<fs::path> write_table(const Table& t, const fs::path& dir,
                                  const std::vector<Format>& formats, bool force) {
  fs::create_directories(dir);
  std::vector<fs::path> paths;
  for (auto f : formats) paths.push_back(dir / (t.name + (f == Format::Csv ? ".csv" : ".json")));
  if (!force) {
    for (const auto& p : paths) {
      if (fs::exists(p)) fail(ErrorCode::OutputExists, p.string() + " exists (use --force)");
    }
  }
  for (std::size_t i = 0; i < formats.size(); ++i) {
    io::write_text(paths[i], formats[i] == Format::Csv ? to_csv(t) : to_json(t));
  }
  return paths;
}

}  // namespace divdis::report
