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
#include <iosfwd>
#include <limits>
#include <optional>
#include <string>

#include "dmlab/certify.hpp"
#include "dmlab/config.hpp"

namespace dmlab {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int {
  kExitOk = 0,
  kExitInvalidConfig = 1,
  kExitNumericalFailure = 2,
  kExitAssertionFailure = 3,
};

/// The replayable part of a report (no timings).
Json report_to_json(const CertifyReport& report, const CertifyConfig& config);

struct CertifyCommand {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  bool assert_pass = false;
};

/// report.json, directions.csv, manifest.json. Nothing is written unless the
/// run succeeds numerically.
int cmd_certify(const CertifyCommand& cmd, std::ostream& err);

struct CritdimCommand {
  SpaceSpec space;
  long samples = 100000;
  std::uint64_t seed = 1;
  GaussMethod method = GaussMethod::kAuto;
  std::string out_dir;  // optional critdim.csv
};

/// Prints "family,n,dstar,stderr,method" to `out`.
int cmd_critdim(const CritdimCommand& cmd, std::ostream& out, std::ostream& err);

struct DiagnoseCommand {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
};

/// diagnostics.csv (one row per trial) and decomposition.csv (one row per
/// trial and probe direction).
int cmd_diagnose(const DiagnoseCommand& cmd, std::ostream& err);

struct BaselineCommand {
  int n = 4096;
  int m = 64;
  double p = std::numeric_limits<double>::infinity();
  DistributionSpec zspec = DistributionSpec::rademacher(1);
  int trials = 20;
  std::uint64_t seed = 1;
  std::string out_dir;
};

/// gap.csv with columns trial,seed,n,m,gap.
int cmd_baseline(const BaselineCommand& cmd, std::ostream& err);

/// Entry point of the dmlab executable.
int run_cli(int argc, char** argv);

}  // namespace dmlab
