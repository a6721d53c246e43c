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

#include "quadplan/mlp.hpp"

#include <cmath>
#include <stdexcept>

namespace quadplan {

double activate(Activation a, double z) {
  switch (a) {
    case Activation::kSoftsign: return z / (1.0 + std::abs(z));
    case Activation::kRelu: return z > 0.0 ? z : 0.0;
    case Activation::kLinear: return z;
  }
  return z;
}

double activate_grad(Activation a, double z) {
  switch (a) {
    case Activation::kSoftsign: {
      const double d = 1.0 + std::abs(z);
      return 1.0 / (d * d);
    }
    case Activation::kRelu: return z > 0.0 ? 1.0 : 0.0;
    case Activation::kLinear: return 1.0;
  }
  return 1.0;
}

namespace {

Eigen::MatrixXd apply_activation(Activation a, const Eigen::MatrixXd& z) {
  return z.unaryExpr([a](double v) { return activate(a, v); });
}

Eigen::MatrixXd apply_activation_grad(Activation a, const Eigen::MatrixXd& z) {
  return z.unaryExpr([a](double v) { return activate_grad(a, v); });
}

double sign0(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

}  // namespace

Mlp Mlp::make(const std::vector<int>& shape, const std::vector<Activation>& acts, Rng& rng) {
  if (shape.size() < 2) throw std::invalid_argument("mlp: need at least input and output layer");
  if (acts.size() != shape.size() - 1)
    throw std::invalid_argument("mlp: one activation per weight layer required");
  Mlp net;
  net.shape = shape;
  net.acts = acts;
  const int L = static_cast<int>(shape.size()) - 1;
  for (int l = 0; l < L; ++l) {
    const int fan_in = shape[static_cast<std::size_t>(l)];
    const int fan_out = shape[static_cast<std::size_t>(l) + 1];
    const double limit = std::sqrt(6.0 / (fan_in + fan_out));
    Eigen::MatrixXd w(fan_out, fan_in);
    for (int j = 0; j < fan_in; ++j)
      for (int i = 0; i < fan_out; ++i) w(i, j) = rng.uniform(-limit, limit);
    net.W.push_back(w);
    net.b.push_back(Eigen::VectorXd::Zero(fan_out));
    net.mW.push_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    net.vW.push_back(Eigen::MatrixXd::Zero(fan_out, fan_in));
    net.mb.push_back(Eigen::VectorXd::Zero(fan_out));
    net.vb.push_back(Eigen::VectorXd::Zero(fan_out));
  }
  return net;
}

Mlp Mlp::centroidal_default(int in_dim, Rng& rng) {
  return make({in_dim, 32, 128, 128, 15},
              {Activation::kSoftsign, Activation::kSoftsign, Activation::kRelu,
               Activation::kLinear},
              rng);
}

Eigen::MatrixXd mlp_forward(const Mlp& net, const Eigen::MatrixXd& x) {
  Eigen::MatrixXd a = x;
  for (int l = 0; l < net.num_layers(); ++l) {
    const Eigen::MatrixXd z =
        (net.W[static_cast<std::size_t>(l)] * a).colwise() + net.b[static_cast<std::size_t>(l)];
    a = apply_activation(net.acts[static_cast<std::size_t>(l)], z);
  }
  return a;
}

Eigen::VectorXd mlp_forward(const Mlp& net, const Eigen::VectorXd& x) {
  return Eigen::VectorXd(mlp_forward(net, Eigen::MatrixXd(x)));
}

std::vector<double> group_l1(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target,
                             const LossGroups& groups) {
  if (y.rows() != target.rows() || y.cols() != target.cols())
    throw std::invalid_argument("group_l1: shape mismatch");
  std::vector<double> out;
  out.reserve(groups.spans.size());
  const double cols = static_cast<double>(y.cols());
  for (const auto& [off, len] : groups.spans)
    out.push_back((y.middleRows(off, len) - target.middleRows(off, len)).cwiseAbs().sum() /
                  (len * cols));
  return out;
}

double group_l1_total(const Eigen::MatrixXd& y, const Eigen::MatrixXd& target,
                      const LossGroups& groups) {
  double total = 0.0;
  for (double g : group_l1(y, target, groups)) total += g;
  return total;
}

MlpGrad mlp_backward(const Mlp& net, const Eigen::MatrixXd& x, const Eigen::MatrixXd& target,
                     const LossGroups& groups) {
  const int L = net.num_layers();
  const int B = static_cast<int>(x.cols());
  std::vector<Eigen::MatrixXd> zs(static_cast<std::size_t>(L));
  std::vector<Eigen::MatrixXd> as(static_cast<std::size_t>(L) + 1);
  as[0] = x;
  for (int l = 0; l < L; ++l) {
    zs[static_cast<std::size_t>(l)] =
        (net.W[static_cast<std::size_t>(l)] * as[static_cast<std::size_t>(l)]).colwise() +
        net.b[static_cast<std::size_t>(l)];
    as[static_cast<std::size_t>(l) + 1] =
        apply_activation(net.acts[static_cast<std::size_t>(l)], zs[static_cast<std::size_t>(l)]);
  }

  MlpGrad grad;
  grad.loss = group_l1_total(as[static_cast<std::size_t>(L)], target, groups);

  // dL/dy with the per-span 1/len and batch 1/B folded in.
  Eigen::MatrixXd delta = Eigen::MatrixXd::Zero(net.output_dim(), B);
  const Eigen::MatrixXd err = as[static_cast<std::size_t>(L)] - target;
  for (const auto& [off, len] : groups.spans) {
    const double w = 1.0 / (static_cast<double>(len) * B);
    delta.middleRows(off, len) =
        err.middleRows(off, len).unaryExpr([w](double v) { return w * sign0(v); });
  }

  grad.dW.resize(static_cast<std::size_t>(L));
  grad.db.resize(static_cast<std::size_t>(L));
  for (int l = L - 1; l >= 0; --l) {
    delta = delta.cwiseProduct(
        apply_activation_grad(net.acts[static_cast<std::size_t>(l)], zs[static_cast<std::size_t>(l)]));
    grad.dW[static_cast<std::size_t>(l)] = delta * as[static_cast<std::size_t>(l)].transpose();
    grad.db[static_cast<std::size_t>(l)] = delta.rowwise().sum();
    if (l > 0) delta = net.W[static_cast<std::size_t>(l)].transpose() * delta;
  }
  return grad;
}

void adam_step(Mlp& net, const MlpGrad& grad, const AdamSettings& s) {
  ++net.adam_steps;
  const double t = static_cast<double>(net.adam_steps);
  const double bc1 = 1.0 - std::pow(s.beta1, t);
  const double bc2 = 1.0 - std::pow(s.beta2, t);
  for (int l = 0; l < net.num_layers(); ++l) {
    const std::size_t i = static_cast<std::size_t>(l);
    auto update = [&](auto& param, auto& m, auto& v, const auto& g) {
      m = s.beta1 * m + (1.0 - s.beta1) * g;
      v = s.beta2 * v + (1.0 - s.beta2) * g.cwiseProduct(g);
      param.array() -= s.lr * (m.array() / bc1) / ((v.array() / bc2).sqrt() + s.eps);
      param *= 1.0 - s.lr * s.weight_decay;
    };
    update(net.W[i], net.mW[i], net.vW[i], grad.dW[i]);
    update(net.b[i], net.mb[i], net.vb[i], grad.db[i]);
  }
}

}  // namespace quadplan
