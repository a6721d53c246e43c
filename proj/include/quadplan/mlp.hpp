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

#ifndef QUADPLAN_MLP_HPP_
#define QUADPLAN_MLP_HPP_

#include <cstdint>
#include <utility>
#include <vector>

#include <Eigen/Dense>

#include "quadplan/rng.hpp"

namespace quadplan {

enum class Activation : std::uint8_t { kSoftsign = 0, kRelu = 1, kLinear = 2 };

double activate(Activation a, double z);
double activate_grad(Activation a, double z);

// Fully connected network with per-layer activations and Adam state carried
// alongside the parameters so training can resume from a saved model.
struct Mlp {
  std::vector<int> shape;            // layer widths, input first
  std::vector<Activation> acts;      // one per weight layer
  std::vector<Eigen::MatrixXd> W;    // W[l] maps layer l to l+1
  std::vector<Eigen::VectorXd> b;
  std::vector<Eigen::MatrixXd> mW, vW;  // Adam moments
  std::vector<Eigen::VectorXd> mb, vb;
  std::int64_t adam_steps = 0;

  int input_dim() const { return shape.front(); }
  int output_dim() const { return shape.back(); }
  int num_layers() const { return static_cast<int>(W.size()); }

  /// Uniform init with limit sqrt(6 / (fan_in + fan_out)); zero biases.
  static Mlp make(const std::vector<int>& shape, const std::vector<Activation>& acts, Rng& rng);

  /// in -> 32 -> 128 -> 128 -> 15 with softsign, softsign, relu, linear.
  static Mlp centroidal_default(int in_dim, Rng& rng);
};

/// Forward pass, one sample per column.
Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& x);
Eigen::VectorXd mlp_forward(const Mlp& net, const Eigen::VectorXd& x);

// Disjoint [offset, offset+len) output spans; the loss is the sum over spans
// of the mean absolute error within the span.
struct LossGroups {
  std::vector<std::pair<int, int>> spans;
  static LossGroups single(int dim) { return {{{0, dim}}}; }
};

/// Per-span mean absolute error, averaged over batch columns.
std::vector<double> group_l1(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target,
                             const LossGroups& groups);
double group_l1_total(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target,
                      const LossGroups& groups);

struct MlpGrad {
  std::vector<Eigen::MatrixXd> dW;
  std::vector<Eigen::VectorXd> db;
  double loss = 0.0;
};

/// Exact subgradient of the group L1 loss, averaged over batch columns;
/// sign(0) = 0.
MlpGrad mlp_backward(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& target,
                     const LossGroups& groups);

struct AdamSettings {
  double lr = 1e-4;
  double weight_decay = 1e-4;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

/// One optimizer step; weight decay is decoupled (applied to the parameters
/// directly), so a zero gradient shrinks them by exactly 1 - lr * decay.
void adam_step(Mlp& net, const MlpGrad& grad, const AdamSettings& s);

}  // namespace quadplan

#endif  // QUADPLAN_MLP_HPP_
