#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace divdis::report {

/// monostate renders as an empty CSV field / JSON null.
using Cell = std::variant<std::monostate, std::string, double, std::int64_t, bool>;

struct Table {
  std::string name;                   // file stem
  std::vector<std::string> comments;  // "# ..." lines above the CSV header
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row);
};

/// %.6g, with "-0" folded to "0" and non-finite values spelled nan/inf/-inf.
std::string format_sig6(double v);

/// %.2f, for the paper-shaped summary tables.
std::string format_fixed2(double v);

std::string to_csv(const Table& t);

/// {"columns": [...], "rows": [{col: value, ...}], "comments": [...]}, doubles
/// at full round-trip precision.
std::string to_json(const Table& t);

enum class Format { Csv, Json };

/// Writes <dir>/<name>.csv and/or .json. Existing files are an error unless
/// `force` is set. Returns the written paths.
std::vector<std::filesystem::path> write_table(const Table& t, const std::filesystem::path& dir,
                                               const std::vector<Format>& formats, bool force);

}  // namespace divdis::report
