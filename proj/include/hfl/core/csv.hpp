#pragma once

#include <fstream>
#include <string>
#include <vector>

#include "hfl/core/error.hpp"

namespace hfl::csv {

// Minimal comma-separated reader: no quoting, which every file written by this
// library satisfies.
inline std::vector<std::string> split(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cell);
      cell.clear();
    } else if (c != '\r') {
      cell.push_back(c);
    }
  }
  out.push_back(cell);
  return out;
}

struct Table {
  std::vector<std::string> header;
  std::vector<std::vector<std::string>> rows;
};

inline Table read(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::IoError, "cannot open " + path);
  Table table;
  std::string line;
  if (!std::getline(in, line)) fail(ErrorKind::SchemaMismatch, "missing header in " + path);
  table.header = split(line);
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    auto row = split(line);
    if (row.size() != table.header.size())
      fail(ErrorKind::SchemaMismatch, path + ": row " + std::to_string(table.rows.size() + 1) +
                                          " has " + std::to_string(row.size()) + " cells, expected " +
                                          std::to_string(table.header.size()));
    table.rows.push_back(std::move(row));
  }
  return table;
}

inline std::string join(const std::vector<std::string>& cells) {
  std::string out;
  for (std::size_t i = 0; i < cells.size(); ++i) {
    if (i) out += ',';
    out += cells[i];
  }
  return out;
}

}  // namespace hfl::csv
