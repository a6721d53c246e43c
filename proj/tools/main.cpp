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

#include <cstdio>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "quadplan/bench.hpp"
#include "quadplan/centopt.hpp"
#include "quadplan/io.hpp"
#include "quadplan/rng.hpp"
#include "quadplan/sim.hpp"
#include "quadplan/surrogate.hpp"
#include "quadplan/svg.hpp"

namespace {

using namespace quadplan;

constexpr int kExitOk = 0;
constexpr int kExitValidation = 2;
constexpr int kExitSolver = 3;
constexpr int kExitFall = 4;

int env_threads() {
  const char* v = std::getenv("QUADPLAN_THREADS");
  if (v == nullptr) return 1;
  const int n = std::atoi(v);
  return n > 0 ? n : 1;
}

struct CommonArgs {
  std::string config_path;
  std::string out;
  std::string task = "walk";
  std::uint64_t seed = 0;
  int n = -1;  // task size; -1 means per-command default
  bool verbose = false;
};

void add_common(CLI::App* cmd, CommonArgs* a, bool needs_out) {
  cmd->add_option("--config", a->config_path, "config file (defaults baked in when omitted)");
  auto* out = cmd->add_option("--out", a->out, "output path");
  if (needs_out) out->required();
  cmd->add_option("--seed", a->seed, "seed for every random choice")->capture_default_str();
  cmd->add_option("--task", a->task, "motion task: walk, jump or marathon")
      ->capture_default_str();
  cmd->add_option("--n", a->n, "task size (descriptions, cycles or jumps)");
  cmd->add_flag("--verbose", a->verbose, "progress output");
}

Config load_or_default(const CommonArgs& a) {
  Config cfg = a.config_path.empty() ? Config{} : load_config(a.config_path);
  cfg.model.validate();
  cfg.gains.validate();
  return cfg;
}

std::string with_suffix(const std::string& path, const std::string& suffix) {
  const std::size_t dot = path.find_last_of('.');
  const std::size_t slash = path.find_last_of('/');
  const bool has_ext = dot != std::string::npos && (slash == std::string::npos || dot > slash);
  return (has_ext ? path.substr(0, dot) : path) + suffix;
}

// One motion description per task; walks and marathons count cycles, jumps
// count jumps.
MotionDescription make_description(const Config& cfg, const std::string& task, int n,
                                   Rng& rng) {
  if (task == "walk") {
    std::vector<Eigen::Vector2d> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(rng.disk(cfg.walk.max_step_len));
    return gen_static_walk(cfg.model, n, dirs, cfg.walk);
  }
  if (task == "jump") {
    const double ballistic =
        cfg.jump.ballistic_bound * cfg.model.gravity * cfg.jump.t_flight * cfg.jump.t_flight;
    const double radius = std::min(cfg.jump.max_jump_len, 0.99 * ballistic);
    std::vector<Eigen::Vector2d> dirs;
    for (int i = 0; i < n; ++i) dirs.push_back(rng.disk(radius));
    return gen_jump(cfg.model, n, dirs, cfg.jump);
  }
  if (task == "marathon") return gen_marathon(cfg.model, n, rng, WalkTiming::steady());
  throw std::invalid_argument("unknown task '" + task + "'");
}

int cmd_gen_data(const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  const std::uint64_t hash = config_hash(cfg);
  const int n_desc = a.n > 0 ? a.n : 60;
  const int size = 3;  // cycles per walk description, jumps per jump sequence

  Rng master(a.seed);
  std::vector<MotionDescription> descriptions;
  for (int i = 0; i < n_desc; ++i) {
    Rng fork(master.fork());
    descriptions.push_back(make_description(cfg, a.task, size, fork));
  }

  DatasetGenSettings settings;
  settings.opt = cfg.opt;
  settings.ik = cfg.ik;
  settings.threads = env_threads();
  settings.verbose = a.verbose;
  Dataset ds = gen_dataset(cfg.model, descriptions, settings);
  ds.config_hash = hash;
  ds.seed = a.seed;
  save_dataset(ds, a.out);
  std::printf("dataset: %d descriptions, %d rows -> %s\n", n_desc, ds.rows(), a.out.c_str());
  return kExitOk;
}

int cmd_train(const std::string& dataset_path, const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  const Dataset ds = load_dataset(dataset_path);
  TrainHyper hyper = cfg.train;
  hyper.seed = a.seed;
  hyper.verbose = a.verbose;
  TrainResult res = train_surrogate(ds, hyper);
  res.model.net = res.best_val_net;  // persist the best validation epoch
  save_model(res.model, a.out);

  std::ostringstream csv;
  csv << "epoch,train_loss,val_loss,val_com,val_lmom,val_amom,val_wrench\n";
  char b[200];
  for (std::size_t e = 0; e < res.val_loss.size(); ++e) {
    std::snprintf(b, sizeof b, "%zu,%.17g,%.17g,%.17g,%.17g,%.17g,%.17g\n", e, res.train_loss[e],
                  res.val_loss[e], res.val_groups[e][0], res.val_groups[e][1],
                  res.val_groups[e][2], res.val_groups[e][3]);
    csv << b;
  }
  write_text_file(with_suffix(a.out, ".loss.csv"), csv.str());
  std::printf("train: val loss %.6f -> %.6f (%.1fx) -> %s\n", res.init_val_loss,
              res.best_val_loss, res.init_val_loss / std::max(1e-12, res.best_val_loss),
              a.out.c_str());
  return kExitOk;
}

int cmd_plan(const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  const std::uint64_t hash = config_hash(cfg);
  const int n = a.n > 0 ? a.n : (a.task == "jump" ? 3 : 3);
  Rng rng(a.seed);
  const MotionDescription d = make_description(cfg, a.task, n, rng);

  OptSettings opt = cfg.opt;
  opt.verbose = a.verbose;
  CentroidalTrajectory traj;
  const double solve_s = wall_seconds([&]() { traj = solve_centroidal(d, cfg.model, opt); });
  if (a.verbose) {
    const ConstraintReport rep = check_constraints(traj, cfg.model);
    std::printf("  constraints: %s\n", rep.to_string().c_str());
  }
  TrajectorySource source(traj);
  WholeBodyPlan plan;
  const double ik_s = wall_seconds([&]() { plan = rollout(d, source, cfg.model, cfg.ik); });
  save_plan(plan, hash, a.seed, a.out);
  save_motion(d, hash, a.seed, with_suffix(a.out, ".motion"));
  std::printf("plan: %s %.2f s motion, optimize %.2f s + ik %.2f s -> %s\n", a.task.c_str(),
              d.duration(), solve_s, ik_s, a.out.c_str());
  return kExitOk;
}

int cmd_predict(const std::string& model_path, const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  const std::uint64_t hash = config_hash(cfg);
  const int n = a.n > 0 ? a.n : (a.task == "jump" ? 3 : 3);
  Rng rng(a.seed);
  const MotionDescription d = make_description(cfg, a.task, n, rng);
  const SurrogateModel net = load_model(model_path);

  WholeBodyPlan plan;
  const double net_s = wall_seconds([&]() {
    NetworkSource source(net, d);
    plan = rollout(d, source, cfg.model, cfg.ik);
  });
  save_plan(plan, hash, a.seed, a.out);
  save_motion(d, hash, a.seed, with_suffix(a.out, ".motion"));
  std::printf("predict: %s %.2f s motion, network rollout %.3f s -> %s\n", a.task.c_str(),
              d.duration(), net_s, a.out.c_str());
  return kExitOk;
}

int cmd_track(const std::string& plan_path, const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  const PlanArtifact art = load_plan(plan_path);
  Disturbance dist;
  dist.force_std = cfg.disturbance_std;
  dist.seed = a.seed;
  const TrackingLog log = run_tracking(art.plan, cfg.model, cfg.gains, dist);
  if (!a.out.empty()) save_tracking(log, art.config_hash, a.seed, a.out);
  const TrackingMetrics m = tracking_metrics(log);
  std::printf("track: %zu steps%s, com err mean %.4f m max %.4f m, ori err mean %.4f rad max "
              "%.4f rad\n",
              log.steps.size(), log.fell ? " FELL" : "", m.com_err_mean, m.com_err_max,
              m.ori_err_mean, m.ori_err_max);
  return log.fell ? kExitFall : kExitOk;
}

int cmd_bench(const std::string& model_path, const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  SurrogateModel net;
  if (!model_path.empty()) {
    net = load_model(model_path);
  } else {
    // No model given: train a small one on quick walks so timing is self
    // contained. Benchmark timing only depends on network shape.
    if (a.verbose) std::printf("bench: no model given, training a small one\n");
    Rng master(a.seed);
    std::vector<MotionDescription> descriptions;
    for (int i = 0; i < 8; ++i) {
      Rng fork(master.fork());
      descriptions.push_back(make_description(cfg, "walk", 3, fork));
    }
    DatasetGenSettings gen;
    gen.opt = cfg.opt;
    gen.ik = cfg.ik;
    gen.threads = env_threads();
    Dataset ds = gen_dataset(cfg.model, descriptions, gen);
    ds.config_hash = config_hash(cfg);
    ds.seed = a.seed;
    TrainHyper hyper = cfg.train;
    hyper.epochs = 8;
    hyper.seed = a.seed;
    net = train_surrogate(ds, hyper).model;
  }

  std::vector<std::string> tasks;
  if (a.task == "all")
    tasks = {"walk", "marathon", "jump"};
  else
    tasks = {a.task};
  const BenchReport report = run_bench(cfg, net, tasks, a.seed);
  const std::string table = report.table();
  std::fputs(table.c_str(), stdout);
  if (!a.out.empty()) write_text_file(a.out, table);
  return kExitOk;
}

void plan_subplots(const PlanArtifact& art, const std::string& label, bool dashed,
                   const std::string& color, std::vector<Subplot>* subplots) {
  static const char* kNames[9] = {"CoM x [m]",      "CoM y [m]",      "CoM z [m]",
                                  "lin mom x",      "lin mom y",      "lin mom z",
                                  "ang mom x",      "ang mom y",      "ang mom z"};
  if (subplots->empty()) {
    subplots->resize(9);
    for (int k = 0; k < 9; ++k) {
      (*subplots)[static_cast<std::size_t>(k)].title = kNames[k];
      (*subplots)[static_cast<std::size_t>(k)].y_label = kNames[k];
    }
  }
  for (int k = 0; k < 9; ++k) {
    PlotSeries s;
    s.label = label;
    s.dashed = dashed;
    s.color = color;
    for (std::size_t t = 0; t < art.plan.cent_refs.size(); ++t) {
      s.t.push_back(static_cast<double>(t) * art.plan.dt);
      const CentroidalState& cs = art.plan.cent_refs[t];
      const double v = k < 3 ? cs.com[k] : (k < 6 ? cs.lin_momentum[k - 3] : cs.ang_momentum[k - 6]);
      s.y.push_back(v);
    }
    (*subplots)[static_cast<std::size_t>(k)].series.push_back(std::move(s));
  }
}

int cmd_plot(const std::vector<std::string>& inputs, const CommonArgs& a) {
  if (inputs.empty()) throw std::invalid_argument("plot: no inputs");
  const std::string kind = artifact_kind(inputs.front());

  if (kind == "quadplan-plan") {
    std::vector<Subplot> subplots;
    static const char* kColors[2] = {"#555555", "#d62728"};
    for (std::size_t i = 0; i < inputs.size(); ++i) {
      if (artifact_kind(inputs[i]) != "quadplan-plan")
        throw std::invalid_argument("plot: cannot mix artifact kinds");
      const PlanArtifact art = load_plan(inputs[i]);
      const bool reference = i == 0 && inputs.size() > 1;
      plan_subplots(art, reference ? "plan" : (inputs.size() > 1 ? "network" : "plan"),
                    reference, kColors[i % 2], &subplots);
    }
    write_text_file(a.out, render_time_series("Centroidal trajectories", subplots));
    write_text_file(with_suffix(a.out, ".csv"), series_csv(subplots));
  } else if (kind == "quadplan-tracking") {
    std::vector<ErrorBarGroup> groups;
    for (const std::string& path : inputs) {
      if (artifact_kind(path) != "quadplan-tracking")
        throw std::invalid_argument("plot: cannot mix artifact kinds");
      const TrackingArtifact art = load_tracking(path);
      const TrackingMetrics m = tracking_metrics(art.log);
      const std::string base = path.substr(path.find_last_of('/') + 1);
      groups.push_back({base + " com [m]", m.com_err_mean, m.com_err_max});
      groups.push_back({base + " ori [rad]", m.ori_err_mean, m.ori_err_max});
    }
    write_text_file(a.out, render_error_summary("Tracking error", "error", groups));
    write_text_file(with_suffix(a.out, ".csv"), error_csv(groups));
  } else {
    throw std::invalid_argument("plot: unsupported artifact kind '" + kind + "'");
  }
  std::printf("plot: %zu input(s) -> %s\n", inputs.size(), a.out.c_str());
  return kExitOk;
}

int cmd_config(const CommonArgs& a) {
  const Config cfg = load_or_default(a);
  save_config(cfg, a.out);
  std::printf("config: wrote defaults%s -> %s\n",
              a.config_path.empty() ? "" : " (merged over file)", a.out.c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Centroidal trajectory optimization, a learned step predictor and a "
               "closed-loop tracking evaluator for a desk-scale quadruped."};
  app.require_subcommand(1);

  CommonArgs gen_args, train_args, plan_args, predict_args, track_args, bench_args, plot_args;
  std::string dataset_path, model_path, plan_path, bench_model;
  std::vector<std::string> plot_inputs;

  CLI::App* gen = app.add_subcommand("gen-data", "solve motions and record training rows");
  add_common(gen, &gen_args, true);

  CLI::App* train = app.add_subcommand("train", "fit the step predictor on a dataset");
  train->add_option("dataset", dataset_path, "dataset file")->required();
  add_common(train, &train_args, true);

  CLI::App* plan = app.add_subcommand("plan", "optimize one motion and emit a whole-body plan");
  add_common(plan, &plan_args, true);

  CLI::App* predict = app.add_subcommand("predict", "roll the network through one motion");
  predict->add_option("model", model_path, "trained model file")->required();
  add_common(predict, &predict_args, true);

  CLI::App* track = app.add_subcommand("track", "run the closed-loop tracker over a plan");
  track->add_option("plan", plan_path, "plan file")->required();
  add_common(track, &track_args, false);

  CLI::App* bench = app.add_subcommand("bench", "time optimizer vs network on one task");
  bench->add_option("--model", bench_model, "trained model (else a small one is trained)");
  add_common(bench, &bench_args, false);

  CLI::App* plot = app.add_subcommand("plot", "render plan or tracking artifacts to SVG + CSV");
  plot->add_option("inputs", plot_inputs, "plan or tracking files")->required();
  add_common(plot, &plot_args, true);

  CommonArgs config_args;
  CLI::App* config = app.add_subcommand("config", "write the effective configuration to a file");
  add_common(config, &config_args, true);

  CLI11_PARSE(app, argc, argv);

  try {
    if (gen->parsed()) return cmd_gen_data(gen_args);
    if (train->parsed()) return cmd_train(dataset_path, train_args);
    if (plan->parsed()) return cmd_plan(plan_args);
    if (predict->parsed()) return cmd_predict(model_path, predict_args);
    if (track->parsed()) return cmd_track(plan_path, track_args);
    if (bench->parsed()) return cmd_bench(bench_model, bench_args);
    if (plot->parsed()) return cmd_plot(plot_inputs, plot_args);
    if (config->parsed()) return cmd_config(config_args);
  } catch (const std::invalid_argument& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitValidation;
  } catch (const std::exception& ex) {
    std::fprintf(stderr, "error: %s\n", ex.what());
    return kExitSolver;
  }
  return kExitOk;
}
