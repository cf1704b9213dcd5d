#pragma once

#include "json.hpp"

#include <iosfwd>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace dirac::cli {

struct IoError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

enum class ColumnType { Int, Real, Text };

struct Column {
  std::string name;
  ColumnType type = ColumnType::Real;
};

using Cell = std::variant<long long, double, std::string>;

// Header row plus typed columns. Reals print as the shortest decimal that
// reads back to the same double, so identical values give identical bytes.
struct Table {
  std::vector<Column> columns;
  std::vector<std::vector<Cell>> rows;

  void add_row(std::vector<Cell> row);
  void write_csv(std::ostream& os) const;
  nlohmann::json to_json() const;
  // Writes name.csv or name.json into dir; throws IoError.
  void save(const std::string& dir, const std::string& name, const std::string& format) const;
};

std::string format_real(double v);
// Parses against a schema; header names must match. Throws std::runtime_error.
Table read_csv(std::istream& is, const std::vector<Column>& schema);

}  // namespace dirac::cli
