// Copyright 2026 The dmlab Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "dmlab/io.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "dmlab/structure.hpp"

namespace dmlab {

std::string format_double(double x) {
  if (std::isnan(x)) return "nan";
  if (std::isinf(x)) return x > 0 ? "inf" : "-inf";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

void CsvTable::add_row(std::vector<CsvCell> row) {
  if (row.size() != header_.size()) throw std::invalid_argument("csv: row width differs from header");
  rows_.push_back(std::move(row));
}

std::string CsvTable::str() const {
  std::string out;
  auto put_line = [&out](const auto& cells, auto&& render) {
    for (std::size_t i = 0; i < cells.size(); ++i) {
      if (i) out += ',';
      out += render(cells[i]);
    }
    out += '\n';
  };
  put_line(header_, [](const std::string& s) { return s; });
  for (const auto& row : rows_) {
    put_line(row, [](const CsvCell& cell) {
      return std::visit(
          [](const auto& v) -> std::string {
            using T = std::decay_t<decltype(v)>;
            if constexpr (std::is_same_v<T, double>) {
              return format_double(v);
            } else if constexpr (std::is_same_v<T, std::string>) {
              return v;
            } else {
              return std::to_string(v);
            }
          },
          cell);
    });
  }
  return out;
}

void write_text_file(const std::string& path, const std::string& content) {
  const std::string tmp = path + ".tmp";
  {
    std::ofstream f(tmp, std::ios::binary | std::ios::trunc);
    if (!f) throw std::runtime_error("cannot write " + tmp);
    f << content;
    if (!f) throw std::runtime_error("write failed for " + tmp);
  }
  std::filesystem::rename(tmp, path);
}

std::string read_text_file(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw ConfigError("cannot read " + path);
  std::ostringstream ss;
  ss << f.rdbuf();
  return ss.str();
}

namespace {

double parse_number(const std::string& text, const std::string& path, long line) {
  const char* begin = text.c_str();
  while (*begin == ' ' || *begin == '\t') ++begin;
  char* end = nullptr;
  errno = 0;
  const double x = std::strtod(begin, &end);
  while (end && (*end == ' ' || *end == '\t' || *end == '\r')) ++end;
  if (end == begin || *end != '\0' || errno == ERANGE) {
    throw ConfigError(path + ":" + std::to_string(line) + ": not a number: \"" + text + "\"");
  }
  return x;
}

// Numeric rows of a CSV file; the first line is skipped when `header` is set.
std::vector<std::vector<double>> read_numeric_rows(const std::string& path, bool header) {
  std::istringstream in(read_text_file(path));
  std::vector<std::vector<double>> rows;
  std::string line;
  long number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (header && number == 1) continue;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> row;
    std::istringstream cells(line);
    std::string cell;
    while (std::getline(cells, cell, ',')) row.push_back(parse_number(cell, path, number));
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw ConfigError(path + ":" + std::to_string(number) + ": ragged row");
    }
    rows.push_back(std::move(row));
  }
  return rows;
}

Matrix to_matrix(const std::vector<std::vector<double>>& rows) {
  if (rows.empty()) return Matrix(0, 0);
  Matrix out(static_cast<Eigen::Index>(rows.size()), static_cast<Eigen::Index>(rows.front().size()));
  for (std::size_t i = 0; i < rows.size(); ++i) {
    for (std::size_t j = 0; j < rows[i].size(); ++j) out(i, j) = rows[i][j];
  }
  return out;
}

}  // namespace

Matrix read_functionals_csv(const std::string& path) {
  Matrix rows = to_matrix(read_numeric_rows(path, false));
  if (rows.size() == 0) throw ConfigError(path + ": no functionals");
  return rows;
}

void write_net_csv(const std::string& path, const Net& net) {
  std::vector<std::string> header;
  for (int c = 0; c < net.d; ++c) header.push_back("x" + std::to_string(c + 1));
  CsvTable table(header);
  for (int k = 0; k < net.size(); ++k) {
    std::vector<CsvCell> row;
    for (int c = 0; c < net.d; ++c) row.emplace_back(net.points(c, k));
    table.add_row(std::move(row));
  }
  write_text_file(path, table.str());
}

Matrix read_net_csv(const std::string& path) { return to_matrix(read_numeric_rows(path, true)).transpose(); }

void write_profile_csv(const std::string& path, const QuantileProfile& profile) {
  CsvTable table({"lambda"});
  for (Eigen::Index i = 0; i < profile.values.size(); ++i) table.add_row({profile.values[i]});
  write_text_file(path, table.str());
}

Vector read_profile_csv(const std::string& path) {
  const Matrix m = to_matrix(read_numeric_rows(path, true));
  if (m.cols() != 1) throw ConfigError(path + ": expected a single column");
  return m.col(0);
}

}  // namespace dmlab
