// Copyright 2026 The quadplan Authors
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

#ifndef QUADPLAN_BENCH_HPP_
#define QUADPLAN_BENCH_HPP_

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

#include "quadplan/io.hpp"
#include "quadplan/surrogate.hpp"

namespace quadplan {

/// Wall-clock seconds of one call.
double wall_seconds(const std::function<void()>& fn);

struct BenchRow {
  std::string task;
  double duration_s = 0.0;   // motion duration
  double optimizer_s = 0.0;  // trajectory optimization wall time
  double network_s = 0.0;    // encode + forward + IK rollout wall time
  double speedup = 0.0;      // optimizer_s / network_s
  bool network_realtime = false;  // network_s < duration_s
};

struct BenchReport {
  std::vector<BenchRow> rows;
  std::string table() const;
};

/// Benchmark tasks: "walk" (10 cycles), "marathon" (50 cycles), "jump"
/// (10 jumps). Directions are seeded; the network side rolls the surrogate
/// through the same description the optimizer solves.
MotionDescription bench_description(const Config& cfg, const std::string& task,
                                    std::uint64_t seed);

BenchRow bench_task(const Config& cfg, const SurrogateModel& net, const std::string& task,
                    std::uint64_t seed);

BenchReport run_bench(const Config& cfg, const SurrogateModel& net,
                      const std::vector<std::string>& tasks, std::uint64_t seed);

}  // namespace quadplan

#endif  // QUADPLAN_BENCH_HPP_
