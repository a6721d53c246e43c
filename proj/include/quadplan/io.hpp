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

#ifndef QUADPLAN_IO_HPP_
#define QUADPLAN_IO_HPP_

#include <cstdint>
#include <string>
#include <string_view>

#include "quadplan/gait.hpp"
#include "quadplan/ik.hpp"
#include "quadplan/model.hpp"
#include "quadplan/sim.hpp"
#include "quadplan/surrogate.hpp"
#include "quadplan/wbc.hpp"

namespace quadplan {

// Persistence layer. Every artifact embeds a format version, the hash of the
// config it was produced under and the seed, so results remain attributable.
// Text artifacts print doubles with %.17g, which round-trips exactly:
// write -> read -> write is byte-identical. Binary artifacts are
// little-endian float64/ints.

inline constexpr int kConfigFormatVersion = 1;
inline constexpr int kMotionFormatVersion = 1;
inline constexpr int kPlanFormatVersion = 1;
inline constexpr int kTrackingFormatVersion = 1;
inline constexpr std::uint32_t kDatasetFormatVersion = 1;
inline constexpr std::uint32_t kModelFormatVersion = 1;

/// 64-bit FNV-1a.
std::uint64_t fnv1a(std::string_view data);

// Everything tunable in one place; hashed as a unit.
struct Config {
  RobotModel model = RobotModel::desk_default();
  WbcGains gains;
  OptSettings opt;
  IkWeights ik;
  TrainHyper train;
  WalkTiming walk;
  JumpTiming jump;
  double disturbance_std = 0.0;  // N, per-axis plant disturbance in cmd track
};

/// Canonical key/value text; key order is fixed so equal configs serialize
/// identically.
std::string config_to_text(const Config& c);
/// Throws std::invalid_argument on unknown keys, arity mismatches or a
/// missing/wrong header line.
Config config_from_text(const std::string& text);
/// FNV-1a of the canonical text.
std::uint64_t config_hash(const Config& c);
Config load_config(const std::string& path);
void save_config(const Config& c, const std::string& path);

struct MotionArtifact {
  MotionDescription description;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};
void save_motion(const MotionDescription& d, std::uint64_t config_hash, std::uint64_t seed,
                 const std::string& path);
MotionArtifact load_motion(const std::string& path);

struct PlanArtifact {
  WholeBodyPlan plan;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};
void save_plan(const WholeBodyPlan& plan, std::uint64_t config_hash, std::uint64_t seed,
               const std::string& path);
PlanArtifact load_plan(const std::string& path);

struct TrackingArtifact {
  TrackingLog log;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};
void save_tracking(const TrackingLog& log, std::uint64_t config_hash, std::uint64_t seed,
                   const std::string& path);
TrackingArtifact load_tracking(const std::string& path);

void save_dataset(const Dataset& ds, const std::string& path);
Dataset load_dataset(const std::string& path);

void save_model(const SurrogateModel& m, const std::string& path);
SurrogateModel load_model(const std::string& path);

/// First whitespace-separated token of the file's first line ("quadplan-plan",
/// "QPDS", ...); lets callers dispatch on artifact kind.
std::string artifact_kind(const std::string& path);

void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

}  // namespace quadplan

#endif  // QUADPLAN_IO_HPP_
