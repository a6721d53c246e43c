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

#include "quadplan/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <stdexcept>

#include "quadplan/centopt.hpp"
#include "quadplan/ik.hpp"
#include "quadplan/rng.hpp"

namespace quadplan {

double wall_seconds(const std::function<void()>& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

MotionDescription bench_description(const Config& cfg, const std::string& task,
                                    std::uint64_t seed) {
  Rng rng(seed);
  if (task == "walk") {
    const WalkTiming timing = WalkTiming::steady();
    std::vector<Eigen::Vector2d> dirs;
    for (int i = 0; i < 10; ++i) dirs.push_back(rng.disk(timing.max_step_len));
    return gen_static_walk(cfg.model, 10, dirs, timing);
  }
  if (task == "marathon") return gen_marathon(cfg.model, 50, rng, WalkTiming::steady());
  if (task == "jump") {
    const JumpTiming timing = JumpTiming::standard();
    const double ballistic = timing.ballistic_bound * cfg.model.gravity *
                             timing.t_flight * timing.t_flight;
    const double radius = std::min(timing.max_jump_len, 0.99 * ballistic);
    std::vector<Eigen::Vector2d> dirs;
    for (int i = 0; i < 10; ++i) dirs.push_back(rng.disk(radius));
    return gen_jump(cfg.model, 10, dirs, timing);
  }
  throw std::invalid_argument("bench: unknown task '" + task + "'");
}

BenchRow bench_task(const Config& cfg, const SurrogateModel& net, const std::string& task,
                    std::uint64_t seed) {
  const MotionDescription d = bench_description(cfg, task, seed);

  BenchRow row;
  row.task = task;
  row.duration_s = d.duration();
  row.optimizer_s = wall_seconds([&]() {
    const CentroidalTrajectory traj = solve_centroidal(d, cfg.model, cfg.opt);
    (void)traj;
  });
  row.network_s = wall_seconds([&]() {
    NetworkSource source(net, d);
    const WholeBodyPlan plan = rollout(d, source, cfg.model, cfg.ik);
    (void)plan;
  });
  row.speedup = row.network_s > 0.0 ? row.optimizer_s / row.network_s : 0.0;
  row.network_realtime = row.network_s < row.duration_s;
  return row;
}

BenchReport run_bench(const Config& cfg, const SurrogateModel& net,
                      const std::vector<std::string>& tasks, std::uint64_t seed) {
  BenchReport report;
  for (const std::string& task : tasks) report.rows.push_back(bench_task(cfg, net, task, seed));
  return report;
}

std::string BenchReport::table() const {
  std::ostringstream os;
  char line[160];
  std::snprintf(line, sizeof line, "%-10s %12s %14s %12s %9s %14s\n", "task", "duration[s]",
                "optimizer[s]", "network[s]", "speedup", "net<duration");
  os << line;
  for (const BenchRow& r : rows) {
    std::snprintf(line, sizeof line, "%-10s %12.2f %14.2f %12.3f %8.1fx %14s\n", r.task.c_str(),
                  r.duration_s, r.optimizer_s, r.network_s, r.speedup,
                  r.network_realtime ? "yes" : "NO");
    os << line;
  }
  return os.str();
}

}  // namespace quadplan
