#pragma once

#include <cstddef>
#include <iosfwd>
#include <string>
#include <variant>
#include <vector>

namespace gatsim {

// Numbers are written with 12 significant digits ("%.12g"), rows end in '\n'.
std::string format_number(double value);

class CsvTable {
 public:
  using Cell = std::variant<double, std::string>;

  CsvTable() = default;
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void add_row(std::vector<Cell> row);

  const std::vector<std::string>& columns() const { return columns_; }
  std::size_t rows() const { return rows_.size(); }
  const std::vector<std::vector<std::string>>& cells() const { return rows_; }
  std::size_t column_index(const std::string& name) const;
  // Parses one column as numbers; throws ParseError on a non-numeric cell.
  std::vector<double> numeric_column(const std::string& name) const;
  std::vector<std::string> text_column(const std::string& name) const;

  std::string to_string() const;
  void write(std::ostream& out) const;
  void save(const std::string& path) const;

  // Reads a header line plus rows; ragged rows raise ParseError with the line.
  static CsvTable read(std::istream& in);
  static CsvTable load(const std::string& path);

 private:
  std::vector<std::string> columns_;
  std::vector<std::vector<std::string>> rows_;
  std::vector<std::size_t> lines_;  // source line of each row
};

}  // namespace gatsim
