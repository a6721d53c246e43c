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

#ifndef QUADPLAN_SURROGATE_HPP_
#define QUADPLAN_SURROGATE_HPP_

#include <array>
#include <cstdint>
#include <vector>

#include <Eigen/Dense>

#include "quadplan/centopt.hpp"
#include "quadplan/gait.hpp"
#include "quadplan/ik.hpp"
#include "quadplan/mlp.hpp"
#include "quadplan/model.hpp"
#include "quadplan/rng.hpp"

namespace quadplan {

// Input layout of the step predictor. Stored with datasets and models so the
// encoder and a trained net can never disagree silently.
struct FeatureLayout {
  int history_steps = 10;   // trailing robot states, oldest first
  int window_steps = 101;   // contact steps centered on the current one
  int gen_pos_dim = 18;     // base pos, base rpy, joints
  int target_dim = 15;      // com, lin momentum, ang momentum, wrench
  double last_flag = 10.0;  // value of the final-pattern marker when set

  int history_block() const { return history_steps * 2 * gen_pos_dim; }
  int window_block() const { return window_steps * kNumLegs * 4; }
  int feature_dim() const { return history_block() + window_block() + 1; }

  bool operator==(const FeatureLayout& o) const = default;
};

/// Output spans of the group L1 loss: com, lin momentum, ang momentum, wrench.
LossGroups centroidal_groups();

/// Features at `step`, everything expressed in the motion pattern frame that
/// contains the step. `history` holds the trailing whole-body states, oldest
/// first and ending at the current one; shorter histories are padded by
/// repeating the oldest entry. Contact entries hold the stance position
/// (current or upcoming) and the seconds until the effector's next touchdown
/// (zero while in stance); steps outside the plan clamp to its ends.
Eigen::VectorXd encode_features(const std::vector<WholeBodyState>& history,
                                const MotionDescription& d, int step,
                                const FeatureLayout& layout = {});

/// Next-step regression target in the pattern frame at `step`.
Eigen::VectorXd encode_target(const CentroidalState& next_state,
                              const Eigen::Matrix<double, 6, 1>& wrench,
                              const MotionDescription& d, int step);

struct Dataset {
  FeatureLayout layout;
  double dt = 0.01;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
  Eigen::MatrixXd features;  // feature_dim x rows
  Eigen::MatrixXd targets;   // target_dim x rows
  std::vector<std::pair<int, int>> description_ranges;  // [begin, end) per description
  Eigen::VectorXd feat_mean, feat_std, targ_mean, targ_std;

  int rows() const { return static_cast<int>(features.cols()); }
  void compute_stats();  // over all rows; std floored at 1e-8
};

struct DatasetGenSettings {
  OptSettings opt;
  IkWeights ik;
  FeatureLayout layout;
  int threads = 1;
  bool verbose = false;
};

/// Solves every description, rolls the plan out kinematically and records one
/// (features, target) pair per step. Descriptions are independent; rows land
/// in precomputed ranges so any thread count yields identical output.
Dataset gen_dataset(const RobotModel& model, const std::vector<MotionDescription>& descriptions,
                    const DatasetGenSettings& settings = {});

struct SurrogateModel {
  FeatureLayout layout;
  Mlp net;
  Eigen::VectorXd feat_mean, feat_std, targ_mean, targ_std;
  std::uint64_t config_hash = 0;
  std::uint64_t seed = 0;
};

struct TrainHyper {
  double lr = 1e-4;
  double weight_decay = 1e-4;
  int batch = 256;
  int epochs = 64;
  double noise_pos = 1e-3;  // added to the raw history position entries
  double noise_vel = 1e-2;  // added to the raw history velocity entries
  double val_fraction = 0.1;
  std::uint64_t seed = 1;
  bool verbose = false;
};

struct TrainResult {
  SurrogateModel model;   // final-epoch parameters
  Mlp best_val_net;       // parameters at the best validation epoch
  double init_val_loss = 0.0;
  double best_val_loss = 0.0;
  std::vector<double> train_loss;                 // per epoch
  std::vector<double> val_loss;                   // per epoch
  std::vector<std::array<double, 4>> val_groups;  // per epoch
};

/// Adam with decoupled weight decay on standardized features and targets.
/// The validation split is by description (not by row). Deterministic given
/// hyper.seed; NaN or Inf loss aborts naming the offending batch.
TrainResult train_surrogate(const Dataset& ds, const TrainHyper& hyper);

struct CentroidalPrediction {
  CentroidalState state;
  Eigen::Matrix<double, 6, 1> wrench;
};

/// encode -> standardize -> forward -> de-standardize -> back to world frame.
CentroidalPrediction predict_step(const SurrogateModel& m,
                                  const std::vector<WholeBodyState>& history,
                                  const MotionDescription& d, int step);

// Plugs the network into ik.rollout, feeding its own rollout states back into
// the feature history.
class NetworkSource final : public CentroidalSource {
 public:
  NetworkSource(const SurrogateModel& model, const MotionDescription& d);
  void query(int step, const WholeBodyState& q, CentroidalState* state_next,
             Eigen::Matrix<double, 6, 1>* wrench) override;

 private:
  const SurrogateModel& model_;
  const MotionDescription& d_;
  std::vector<WholeBodyState> history_;
};

}  // namespace quadplan

#endif  // QUADPLAN_SURROGATE_HPP_
