#pragma once

#include <filesystem>
#include <string>
#include <variant>
#include <vector>

namespace driftclass {

using Cell = std::variant<double, long, std::string>;

struct Table {
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;

  void add(std::vector<Cell> row) { rows.push_back(std::move(row)); }
};

/// %.12g for reals, plain integers, strings quoted only when needed.
std::string format_cell(const Cell& c);
std::string format_number(double v);

std::string to_csv(const Table& t);

/// Writes with '\n' endings; throws Io with the path and OS error.
void emit_csv(const Table& t, const std::filesystem::path& path);

}  // namespace driftclass
