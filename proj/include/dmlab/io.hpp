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

#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "dmlab/types.hpp"

namespace dmlab {

struct Net;
struct QuantileProfile;

/// %.17g; "inf", "-inf" and "nan" for non-finite values.
std::string format_double(double x);

using CsvCell = std::variant<double, std::int64_t, std::uint64_t, std::string>;

/// Comma-separated table with a header row and a newline after every line.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> header) : header_(std::move(header)) {}

  void add_row(std::vector<CsvCell> row);
  std::size_t rows() const { return rows_.size(); }
  std::string str() const;

 private:
  std::vector<std::string> header_;
  std::vector<std::vector<CsvCell>> rows_;
};

/// Writes through a temporary file and a rename, so readers never see a
/// partial file.
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Functionals, one per line, comma-separated, no header.
Matrix read_functionals_csv(const std::string& path);

/// Header x1,..,xd, then one point per line.
void write_net_csv(const std::string& path, const Net& net);
Matrix read_net_csv(const std::string& path);

/// Header "lambda", then one value per line.
void write_profile_csv(const std::string& path, const QuantileProfile& profile);
Vector read_profile_csv(const std::string& path);

}  // namespace dmlab
