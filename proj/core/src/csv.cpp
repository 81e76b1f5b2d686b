#include "gatsim/csv.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "gatsim/config.hpp"
#include "gatsim/error.hpp"

namespace gatsim {

std::string format_number(double value) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", value);
  return buf;
}

void CsvTable::add_row(std::vector<Cell> row) {
  if (row.size() != columns_.size()) throw ParameterError("row width does not match the header");
  std::vector<std::string> text;
  text.reserve(row.size());
  for (const auto& cell : row) {
    if (const auto* d = std::get_if<double>(&cell))
      text.push_back(format_number(*d));
    else
      text.push_back(std::get<std::string>(cell));
  }
  rows_.push_back(std::move(text));
  lines_.push_back(rows_.size() + 1);
}

std::size_t CsvTable::column_index(const std::string& name) const {
  const auto it = std::find(columns_.begin(), columns_.end(), name);
  if (it == columns_.end()) throw ParameterError("no column named '" + name + "'");
  return static_cast<std::size_t>(it - columns_.begin());
}

std::vector<double> CsvTable::numeric_column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<double> out;
  out.reserve(rows_.size());
  for (std::size_t r = 0; r < rows_.size(); ++r) {
    try {
      out.push_back(parse_double(rows_[r][idx]));
    } catch (const ParameterError&) {
      throw ParseError("column '" + name + "' holds non-numeric value '" + rows_[r][idx] + "'", lines_[r]);
    }
  }
  return out;
}

std::vector<std::string> CsvTable::text_column(const std::string& name) const {
  const auto idx = column_index(name);
  std::vector<std::string> out;
  for (const auto& row : rows_) out.push_back(row[idx]);
  return out;
}

void CsvTable::write(std::ostream& out) const {
  auto emit = [&](const std::vector<std::string>& fields) {
    for (std::size_t i = 0; i < fields.size(); ++i) out << (i ? "," : "") << fields[i];
    out << '\n';
  };
  emit(columns_);
  for (const auto& row : rows_) emit(row);
}

std::string CsvTable::to_string() const {
  std::ostringstream out;
  write(out);
  return out.str();
}

void CsvTable::save(const std::string& path) const {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ParameterError("cannot write " + path);
  write(out);
}

CsvTable CsvTable::read(std::istream& in) {
  auto split = [](const std::string& line) {
    std::vector<std::string> fields;
    std::stringstream ss(line);
    std::string f;
    while (std::getline(ss, f, ',')) fields.push_back(f);
    if (!line.empty() && line.back() == ',') fields.emplace_back();
    return fields;
  };
  std::string line;
  std::size_t line_no = 0;
  CsvTable table;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto fields = split(line);
    if (table.columns_.empty()) {
      table.columns_ = std::move(fields);
      continue;
    }
    if (fields.size() != table.columns_.size())
      throw ParseError("expected " + std::to_string(table.columns_.size()) + " fields, found " +
                           std::to_string(fields.size()),
                       line_no);
    table.rows_.push_back(std::move(fields));
    table.lines_.push_back(line_no);
  }
  if (table.columns_.empty()) throw ParseError("missing header", line_no + 1);
  return table;
}

CsvTable CsvTable::load(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ParameterError("cannot open " + path);
  return read(in);
}

}  // namespace gatsim
