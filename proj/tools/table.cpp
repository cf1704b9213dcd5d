#include "table.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace dirac::cli {

std::string format_real(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

void Table::add_row(std::vector<Cell> row) {
  if (row.size() != columns.size()) throw std::logic_error("table row has the wrong width");
  rows.push_back(std::move(row));
}

namespace {

std::string cell_text(const Cell& c) {
  if (auto* i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (auto* d = std::get_if<double>(&c)) return format_real(*d);
  return std::get<std::string>(c);
}

std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char ch : line) {
    if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

double parse_real(const std::string& s) {
  if (s == "nan") return std::nan("");
  if (s == "inf") return HUGE_VAL;
  if (s == "-inf") return -HUGE_VAL;
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::runtime_error("bad real '" + s + "'");
  return v;
}

long long parse_int(const std::string& s) {
  long long v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw std::runtime_error("bad integer '" + s + "'");
  return v;
}

}  // namespace

void Table::write_csv(std::ostream& os) const {
  for (size_t k = 0; k < columns.size(); ++k) os << (k ? "," : "") << columns[k].name;
  os << '\n';
  for (const auto& row : rows) {
    for (size_t k = 0; k < row.size(); ++k) os << (k ? "," : "") << cell_text(row[k]);
    os << '\n';
  }
}

nlohmann::json Table::to_json() const {
  nlohmann::json cols = nlohmann::json::array();
  for (const auto& c : columns) {
    const char* t = c.type == ColumnType::Int ? "int" : c.type == ColumnType::Real ? "real" : "text";
    cols.push_back({{"name", c.name}, {"type", t}});
  }
  nlohmann::json data = nlohmann::json::array();
  for (const auto& row : rows) {
    nlohmann::json r = nlohmann::json::array();
    for (const auto& c : row) std::visit([&](const auto& v) { r.push_back(v); }, c);
    data.push_back(std::move(r));
  }
  return {{"columns", cols}, {"rows", data}};
}

void Table::save(const std::string& dir, const std::string& name, const std::string& format) const {
  const auto path = std::filesystem::path(dir) / (name + (format == "json" ? ".json" : ".csv"));
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot open " + path.string() + " for writing");
  if (format == "json")
    os << to_json().dump(1) << '\n';
  else
    write_csv(os);
  if (!os) throw IoError("write failed: " + path.string());
}

Table read_csv(std::istream& is, const std::vector<Column>& schema) {
  Table t;
  t.columns = schema;
  std::string line;
  if (!std::getline(is, line)) throw std::runtime_error("empty csv");
  auto head = split(line);
  if (head.size() != schema.size()) throw std::runtime_error("csv header width mismatch");
  for (size_t k = 0; k < head.size(); ++k)
    if (head[k] != schema[k].name) throw std::runtime_error("csv column '" + head[k] + "' != '" + schema[k].name + "'");
  while (std::getline(is, line)) {
    auto cells = split(line);
    if (cells.size() != schema.size()) throw std::runtime_error("csv row width mismatch");
    std::vector<Cell> row;
    for (size_t k = 0; k < cells.size(); ++k) {
      switch (schema[k].type) {
        case ColumnType::Int: row.emplace_back(parse_int(cells[k])); break;
        case ColumnType::Real: row.emplace_back(parse_real(cells[k])); break;
        case ColumnType::Text: row.emplace_back(cells[k]); break;
      }
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace dirac::cli
