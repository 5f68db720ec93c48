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

#include "dmlab/parallel.hpp"

#include <atomic>
#include <cmath>
#include <vector>

namespace dmlab {

namespace {
std::atomic<int> g_workers{1};
}

int worker_count() { return g_workers.load(std::memory_order_relaxed); }

void set_worker_count(int workers) { g_workers.store(workers < 1 ? 1 : workers, std::memory_order_relaxed); }

MeanStderr mean_and_stderr(std::span<const double> values) {
  MeanStderr out;
  if (values.empty()) return out;
  const double n = static_cast<double>(values.size());
  out.mean = pairwise_sum(values) / n;
  if (values.size() < 2) return out;
  std::vector<double> sq(values.size());
  for (std::size_t i = 0; i < values.size(); ++i) {
    const double dv = values[i] - out.mean;
    sq[i] = dv * dv;
  }
  const double var = pairwise_sum<double>(sq) / (n - 1.0);
  out.std_error = std::sqrt(var / n);
  return out;
}

}  // namespace dmlab
