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

#include "quadplan/surrogate.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <mutex>
#include <numeric>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "quadplan/rotation.hpp"

namespace quadplan {

LossGroups centroidal_groups() { return {{{0, 3}, {3, 3}, {6, 3}, {9, 6}}}; }

namespace {

// Generalized position and velocity of one state in the pattern frame.
void local_gen_state(const WholeBodyState& q, const MotionPattern& frame,
                     Eigen::Ref<Eigen::VectorXd> pos, Eigen::Ref<Eigen::VectorXd> vel) {
  pos.segment<3>(0) = pattern_to_local_point(frame, q.base_pos);
  const Eigen::Quaterniond q_local =
      Eigen::Quaterniond(Eigen::AngleAxisd(-frame.yaw, Eigen::Vector3d::UnitZ())) * q.base_quat;
  pos.segment<3>(3) = rpy_from_quat(q_local);
  pos.segment<kNumJoints>(6) = q.joint_pos;
  vel.segment<3>(0) = pattern_to_local_vector(frame, q.base_lin_vel);
  vel.segment<3>(3) = pattern_to_local_vector(frame, q.base_ang_vel);
  vel.segment<kNumJoints>(6) = q.joint_vel;
}

// Stance position (current or upcoming) and seconds until next touchdown for
// one effector at time t; in stance means touchdown is now.
void contact_entry(const ContactPlan& plan, int effector, double t, Eigen::Vector3d* location,
                   double* duration) {
  const double tc = std::clamp(t, 0.0, plan.duration);
  const ContactPhase& ph = phase_at(plan, effector, tc);
  *location = ph.stance_pos;  // swing phases carry the landing target
  *duration = ph.in_stance ? 0.0 : ph.t_end - tc;
}

}  // namespace

Eigen::VectorXd encode_features(const std::vector<WholeBodyState>& history,
                                const MotionDescription& d, int step,
                                const FeatureLayout& layout) {
  if (step < 0 || step >= d.horizon)
    throw std::out_of_range("encode_features: step outside description");
  if (history.empty()) throw std::invalid_argument("encode_features: empty history");
  if (layout.gen_pos_dim != 18)
    throw std::invalid_argument("encode_features: unsupported layout");

  const double t = step * d.dt;
  const MotionPattern& frame = pattern_at(d, t);
  Eigen::VectorXd f(layout.feature_dim());

  const int H = layout.history_steps;
  const int gp = layout.gen_pos_dim;
  for (int h = 0; h < H; ++h) {
    // Oldest first; histories shorter than H repeat their oldest entry.
    const int idx = std::max(0, static_cast<int>(history.size()) - H + h);
    const WholeBodyState& q = history[static_cast<std::size_t>(idx)];
    local_gen_state(q, frame, f.segment(h * 2 * gp, gp), f.segment(h * 2 * gp + gp, gp));
  }

  const int half = (layout.window_steps - 1) / 2;
  int off = layout.history_block();
  for (int w = -half; w <= half; ++w) {
    const double tw = (step + w) * d.dt;
    for (int e = 0; e < kNumLegs; ++e) {
      Eigen::Vector3d loc;
      double dur = 0.0;
      contact_entry(d.plan, e, tw, &loc, &dur);
      f.segment<3>(off) = pattern_to_local_point(frame, loc);
      f[off + 3] = dur;
      off += 4;
    }
  }
  f[off] = frame.is_last ? layout.last_flag : 0.0;
  return f;
}

Eigen::VectorXd encode_target(const CentroidalState& next_state,
                              const Eigen::Matrix<double, 6, 1>& wrench,
                              const MotionDescription& d, int step) {
  const MotionPattern& frame = pattern_at(d, step * d.dt);
  Eigen::VectorXd t(15);
  t.segment<3>(0) = pattern_to_local_point(frame, next_state.com);
  t.segment<3>(3) = pattern_to_local_vector(frame, next_state.lin_momentum);
  t.segment<3>(6) = pattern_to_local_vector(frame, next_state.ang_momentum);
  t.segment<3>(9) = pattern_to_local_vector(frame, wrench.head<3>());
  t.segment<3>(12) = pattern_to_local_vector(frame, wrench.tail<3>());
  return t;
}

void Dataset::compute_stats() {
  const double n = std::max(1, rows());
  feat_mean = features.rowwise().mean();
  targ_mean = targets.rowwise().mean();
  feat_std = ((features.colwise() - feat_mean).array().square().rowwise().sum() / n)
                 .sqrt()
                 .max(1e-8)
                 .matrix();
  targ_std = ((targets.colwise() - targ_mean).array().square().rowwise().sum() / n)
                 .sqrt()
                 .max(1e-8)
                 .matrix();
}

Dataset gen_dataset(const RobotModel& model, const std::vector<MotionDescription>& descriptions,
                    const DatasetGenSettings& settings) {
  Dataset ds;
  ds.layout = settings.layout;
  if (descriptions.empty()) throw std::invalid_argument("gen_dataset: no descriptions");
  ds.dt = descriptions.front().dt;

  int total = 0;
  for (const auto& d : descriptions) {
    ds.description_ranges.emplace_back(total, total + d.horizon);
    total += d.horizon;
  }
  ds.features.resize(settings.layout.feature_dim(), total);
  ds.targets.resize(settings.layout.target_dim, total);

  std::atomic<int> next{0};
  std::atomic<bool> failed{false};
  std::string error;
  std::mutex error_mu;

  auto worker = [&]() {
    for (;;) {
      const int i = next.fetch_add(1);
      if (i >= static_cast<int>(descriptions.size()) || failed.load()) return;
      try {
        const MotionDescription& d = descriptions[static_cast<std::size_t>(i)];
        const CentroidalTrajectory traj = solve_centroidal(d, model, settings.opt);
        TrajectorySource source(traj);
        const WholeBodyPlan plan = rollout(d, source, model, settings.ik);
        const int begin = ds.description_ranges[static_cast<std::size_t>(i)].first;
        std::vector<WholeBodyState> history;
        for (int t = 0; t < d.horizon; ++t) {
          history.assign(plan.states.begin() + std::max(0, t - settings.layout.history_steps + 1),
                         plan.states.begin() + t + 1);
          ds.features.col(begin + t) = encode_features(history, d, t, settings.layout);
          ds.targets.col(begin + t) = encode_target(
              plan.cent_refs[static_cast<std::size_t>(t) + 1],
              plan.wrench_refs[static_cast<std::size_t>(t)], d, t);
        }
        if (settings.verbose)
          std::printf("  dataset: description %d/%zu done (%d rows)\n", i + 1,
                      descriptions.size(), d.horizon);
      } catch (const std::exception& ex) {
        std::lock_guard<std::mutex> lock(error_mu);
        error = ex.what();
        failed.store(true);
        return;
      }
    }
  };

  const int n_threads = std::max(1, std::min<int>(settings.threads,
                                                  static_cast<int>(descriptions.size())));
  if (n_threads == 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (int k = 0; k < n_threads; ++k) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }
  if (failed.load()) throw std::runtime_error("gen_dataset: " + error);

  ds.compute_stats();
  return ds;
}

namespace {

struct Standardizer {
  const Eigen::VectorXd &mean, &std;
  Eigen::MatrixXd apply(const Eigen::MatrixXd& raw) const {
    return (raw.colwise() - mean).array().colwise() / std.array();
  }
};

}  // namespace

TrainResult train_surrogate(const Dataset& ds, const TrainHyper& hyper) {
  if (ds.rows() == 0) throw std::invalid_argument("train: empty dataset");
  if (ds.feat_mean.size() != ds.layout.feature_dim())
    throw std::invalid_argument("train: dataset is missing normalization stats");
  Rng rng(hyper.seed);
  const LossGroups groups = centroidal_groups();

  // Validation split by description so no motion leaks across the split.
  const int n_desc = static_cast<int>(ds.description_ranges.size());
  std::vector<int> order(static_cast<std::size_t>(n_desc));
  std::iota(order.begin(), order.end(), 0);
  for (int i = n_desc - 1; i > 0; --i)
    std::swap(order[static_cast<std::size_t>(i)],
              order[static_cast<std::size_t>(rng.uniform_int(i + 1))]);
  const int n_val_desc =
      n_desc > 1 ? std::max(1, static_cast<int>(std::lround(hyper.val_fraction * n_desc))) : 0;
  std::vector<int> train_rows, val_rows;
  for (int k = 0; k < n_desc; ++k) {
    const auto [begin, end] = ds.description_ranges[static_cast<std::size_t>(order[
        static_cast<std::size_t>(k)])];
    auto& dst = k < n_val_desc ? val_rows : train_rows;
    for (int r = begin; r < end; ++r) dst.push_back(r);
  }
  if (train_rows.empty()) throw std::invalid_argument("train: no training rows after split");

  const Standardizer fs{ds.feat_mean, ds.feat_std};
  const Standardizer ts{ds.targ_mean, ds.targ_std};

  auto gather = [&](const std::vector<int>& idx) {
    Eigen::MatrixXd X(ds.layout.feature_dim(), idx.size());
    Eigen::MatrixXd T(ds.layout.target_dim, idx.size());
    for (std::size_t c = 0; c < idx.size(); ++c) {
      X.col(static_cast<Eigen::Index>(c)) = ds.features.col(idx[c]);
      T.col(static_cast<Eigen::Index>(c)) = ds.targets.col(idx[c]);
    }
    return std::make_pair(std::move(X), std::move(T));
  };
  const auto [val_X_raw, val_T_raw] = gather(val_rows.empty() ? train_rows : val_rows);
  const Eigen::MatrixXd val_X = fs.apply(val_X_raw);
  const Eigen::MatrixXd val_T = ts.apply(val_T_raw);

  TrainResult res;
  res.model.layout = ds.layout;
  res.model.feat_mean = ds.feat_mean;
  res.model.feat_std = ds.feat_std;
  res.model.targ_mean = ds.targ_mean;
  res.model.targ_std = ds.targ_std;
  res.model.config_hash = ds.config_hash;
  res.model.seed = hyper.seed;
  res.model.net = Mlp::centroidal_default(ds.layout.feature_dim(), rng);

  auto val_eval = [&](const Mlp& net, std::array<double, 4>* per_group) {
    const Eigen::MatrixXd y = mlp_forward(net, val_X);
    const std::vector<double> g = group_l1(y, val_T, groups);
    if (per_group != nullptr)
      for (int k = 0; k < 4; ++k) (*per_group)[static_cast<std::size_t>(k)] = g[
          static_cast<std::size_t>(k)];
    return std::accumulate(g.begin(), g.end(), 0.0);
  };

  res.init_val_loss = val_eval(res.model.net, nullptr);
  res.best_val_loss = res.init_val_loss;
  res.best_val_net = res.model.net;

  const AdamSettings adam{hyper.lr, hyper.weight_decay, 0.9, 0.999, 1e-8};
  const int gp = ds.layout.gen_pos_dim;
  std::vector<int> perm = train_rows;

  for (int epoch = 0; epoch < hyper.epochs; ++epoch) {
    for (int i = static_cast<int>(perm.size()) - 1; i > 0; --i)
      std::swap(perm[static_cast<std::size_t>(i)],
                perm[static_cast<std::size_t>(rng.uniform_int(i + 1))]);

    double epoch_loss = 0.0;
    int n_batches = 0;
    for (std::size_t start = 0; start < perm.size(); start += static_cast<std::size_t>(hyper.batch)) {
      const std::size_t stop = std::min(perm.size(), start + static_cast<std::size_t>(hyper.batch));
      const std::vector<int> idx(perm.begin() + static_cast<std::ptrdiff_t>(start),
                                 perm.begin() + static_cast<std::ptrdiff_t>(stop));
      auto [X, T] = gather(idx);
      // Fresh noise on the raw state-history block only.
      for (Eigen::Index c = 0; c < X.cols(); ++c) {
        for (int h = 0; h < ds.layout.history_steps; ++h) {
          for (int k = 0; k < gp; ++k) {
            X(h * 2 * gp + k, c) += hyper.noise_pos * rng.normal();
            X(h * 2 * gp + gp + k, c) += hyper.noise_vel * rng.normal();
          }
        }
      }
      const Eigen::MatrixXd Xn = fs.apply(X);
      const Eigen::MatrixXd Tn = ts.apply(T);
      const MlpGrad grad = mlp_backward(res.model.net, Xn, Tn, groups);
      if (!std::isfinite(grad.loss)) {
        std::ostringstream msg;
        msg << "train: non-finite loss in epoch " << epoch << ", batch " << n_batches;
        throw std::runtime_error(msg.str());
      }
      adam_step(res.model.net, grad, adam);
      epoch_loss += grad.loss;
      ++n_batches;
    }
    res.train_loss.push_back(epoch_loss / std::max(1, n_batches));

    std::array<double, 4> vg{};
    const double vl = val_eval(res.model.net, &vg);
    res.val_loss.push_back(vl);
    res.val_groups.push_back(vg);
    if (vl < res.best_val_loss) {
      res.best_val_loss = vl;
      res.best_val_net = res.model.net;
    }
    if (hyper.verbose)
      std::printf("  epoch %3d: train %.6f  val %.6f\n", epoch, res.train_loss.back(), vl);
  }
  return res;
}

CentroidalPrediction predict_step(const SurrogateModel& m,
                                  const std::vector<WholeBodyState>& history,
                                  const MotionDescription& d, int step) {
  const Eigen::VectorXd raw = encode_features(history, d, step, m.layout);
  const Eigen::VectorXd x = (raw - m.feat_mean).cwiseQuotient(m.feat_std);
  const Eigen::VectorXd yn = mlp_forward(m.net, x);
  const Eigen::VectorXd y = yn.cwiseProduct(m.targ_std) + m.targ_mean;

  const MotionPattern& frame = pattern_at(d, step * d.dt);
  CentroidalPrediction out;
  out.state.com = pattern_to_world_point(frame, y.segment<3>(0));
  out.state.lin_momentum = pattern_to_world_vector(frame, y.segment<3>(3));
  out.state.ang_momentum = pattern_to_world_vector(frame, y.segment<3>(6));
  out.wrench.head<3>() = pattern_to_world_vector(frame, y.segment<3>(9));
  out.wrench.tail<3>() = pattern_to_world_vector(frame, y.segment<3>(12));
  return out;
}

NetworkSource::NetworkSource(const SurrogateModel& model, const MotionDescription& d)
    : model_(model), d_(d) {}

void NetworkSource::query(int step, const WholeBodyState& q, CentroidalState* state_next,
                          Eigen::Matrix<double, 6, 1>* wrench) {
  history_.push_back(q);
  const int H = model_.layout.history_steps;
  if (static_cast<int>(history_.size()) > H)
    history_.erase(history_.begin(), history_.end() - H);
  const CentroidalPrediction pred = predict_step(model_, history_, d_, step);
  *state_next = pred.state;
  *wrench = pred.wrench;
}

}  // namespace quadplan
