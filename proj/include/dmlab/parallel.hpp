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

#include <cstddef>
#include <span>

namespace dmlab {

/// Worker count used by every parallel loop. Results never depend on it.
int worker_count();
void set_worker_count(int workers);

/// Runs body(i) for i in [0, count). Iterations must write disjoint state.
template <typename Body>
void parallel_for(std::ptrdiff_t count, Body&& body) {
#if defined(_OPENMP)
  const int workers = worker_count();
#pragma omp parallel for schedule(static) num_threads(workers) if (workers > 1)
  for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
#else
  for (std::ptrdiff_t i = 0; i < count; ++i) body(i);
#endif
}

/// Pairwise (tree) summation in a fixed order.
template <typename Scalar>
Scalar pairwise_sum(std::span<const Scalar> values) {
  if (values.empty()) return Scalar(0);
  if (values.size() <= 8) {
    Scalar acc(0);
    for (const Scalar& v : values) acc += v;
    return acc;
  }
  const std::size_t half = values.size() / 2;
  return pairwise_sum(values.first(half)) + pairwise_sum(values.subspan(half));
}

/// Sample mean and standard error of the mean, both via pairwise sums.
struct MeanStderr {
  double mean = 0.0;
  double std_error = 0.0;
};
MeanStderr mean_and_stderr(std::span<const double> values);

}  // namespace dmlab
