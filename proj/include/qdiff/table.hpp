#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

#include <json.hpp>

namespace qdiff {

using Cell = std::variant<double, std::int64_t, std::string>;

/// Column-oriented result of a figure, sweep or single command. Written as
/// CSV (header row, LF endings) or as JSON {"meta": ..., "rows": [...]}.
struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  nlohmann::json meta = nlohmann::json::object();

  void add_row(std::vector<Cell> row);
};

inline constexpr const char* kVersion = "1.0.0";

/// 12 significant digits; "nan", "inf", "-inf" for non-finite values.
std::string format_number(double value);

void write_csv(std::ostream& out, const Table& table);
void write_json(std::ostream& out, const Table& table);

}  // namespace qdiff
