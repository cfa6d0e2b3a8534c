// Copyright 2026 The pourgen Authors
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
#include <exception>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "pourgen/dataset.hpp"
#include "pourgen/evaluate.hpp"
#include "pourgen/generate.hpp"
#include "pourgen/network.hpp"
#include "pourgen/optimizer.hpp"
#include "pourgen/textio.hpp"

namespace fs = std::filesystem;
using namespace pourgen;

namespace {

int cmd_synth(const std::string& spec_path, std::uint64_t seed,
              const std::string& out_dir) {
  GeneratorSpec spec = spec_path.empty()
                           ? GeneratorSpec::defaults()
                           : GeneratorSpec::from_json_file(spec_path);
  const Corpus corpus = synthesize_corpus(spec, seed);
  save_corpus(corpus, out_dir);
  std::printf("wrote %zu trials to %s (T_max=%zu)\n", corpus.trials.size(),
              out_dir.c_str(), corpus.t_max());
  return 0;
}

int cmd_train(const std::string& kind_name, const std::string& corpus_dir,
              const TrainConfig& cfg, const std::string& out_dir) {
  const NetKind kind = kind_from_string(kind_name);
  const Corpus corpus = load_corpus(corpus_dir);
  const SequenceBatch batch = make_batch(corpus, kind);
  fs::create_directories(out_dir);
  const SnapshotHook snapshot = [&](const NetworkBundle& net,
                                    std::size_t epoch) {
    char name[64];
    std::snprintf(name, sizeof(name), "%s.epoch%06zu.ckpt.json",
                  kind_name.c_str(), epoch);
    save_checkpoint(net, (fs::path(out_dir) / name).string());
  };
  const TrainResult result = train(kind, batch, cfg, snapshot);

  const std::string ckpt =
      (fs::path(out_dir) / (kind_name + ".ckpt.json")).string();
  const std::string log =
      (fs::path(out_dir) / (kind_name + "_train_log.csv")).string();
  save_checkpoint(result.net, ckpt);
  save_train_log(result.history, kind, log);

  if (kind == NetKind::Stp)
    std::printf("trained %s for %zu epochs: loss %.6g accuracy %.4f\n",
                kind_name.c_str(), result.net.epochs_trained,
                result.net.final_loss, result.net.final_accuracy);
  else
    std::printf("trained %s for %zu epochs: loss %.6g\n", kind_name.c_str(),
                result.net.epochs_trained, result.net.final_loss);
  std::printf("checkpoint: %s\nlog: %s\n", ckpt.c_str(), log.c_str());
  return 0;
}

struct GenerateArgs {
  std::string frc_path, vel_path, stp_path;
  std::string corpus_dir;
  std::string trial_id;
  std::optional<double> theta1;
  std::vector<double> z_values;
  std::size_t t_max = 0;
  std::string out_dir;
};

int cmd_generate(const GenerateArgs& args) {
  const NetworkBundle frc = load_checkpoint(args.frc_path);
  const NetworkBundle vel = load_checkpoint(args.vel_path);
  const NetworkBundle stp = load_checkpoint(args.stp_path);
  if (frc.kind != NetKind::Frc || vel.kind != NetKind::Vel ||
      stp.kind != NetKind::Stp)
    throw std::runtime_error(
        "checkpoint kinds do not match --frc/--vel/--stp roles");

  double theta1 = 0.0;
  StaticContext z;
  std::size_t t_max = args.t_max;

  if (!args.trial_id.empty()) {
    if (args.corpus_dir.empty())
      throw std::runtime_error("--trial needs --corpus");
    const Corpus corpus = load_corpus(args.corpus_dir);
    const TrialRecord* found = nullptr;
    for (const auto& tr : corpus.trials)
      if (tr.id == args.trial_id) {
        found = &tr;
        break;
      }
    if (!found)
      throw std::runtime_error("trial " + args.trial_id + " not in corpus");
    theta1 = found->theta.front();
    z = found->ctx;
    if (t_max == 0) t_max = corpus.t_max();
  } else {
    if (!args.theta1 || args.z_values.size() != 8)
      throw std::runtime_error(
          "without --trial, provide --theta1 and --z with 8 values "
          "(f_init,f_empty,f_final,d_cup,h_cup,d_ctn,h_ctn,rho)");
    theta1 = *args.theta1;
    const auto& v = args.z_values;
    z = StaticContext{v[0], v[1], v[2], v[3], v[4], v[5], v[6], v[7]};
    if (t_max == 0 && !args.corpus_dir.empty())
      t_max = load_corpus(args.corpus_dir).t_max();
    if (t_max == 0)
      throw std::runtime_error("provide --t-max (or --corpus to infer it)");
  }

  const GeneratedTrajectory traj =
      generate_simulated(frc, vel, stp, theta1, z, t_max);

  fs::create_directories(args.out_dir);
  const std::string path =
      (fs::path(args.out_dir) / "trajectory.csv").string();
  save_trajectory_csv(traj, path);
  std::printf("generated %zu steps (%s), final angle %.2f deg\n", traj.steps(),
              to_string(traj.termination), traj.theta.back());
  std::printf("trajectory: %s\n", path.c_str());
  return 0;
}

int cmd_evaluate(const std::string& corpus_dir, const std::string& cases_arg,
                 const EvalConfig& cfg, const std::string& out_dir) {
  const Corpus corpus = load_corpus(corpus_dir);

  std::vector<int> cases;
  if (cases_arg == "all") {
    cases = {1, 2, 3, 4, 5, 6, 7};
  } else {
    for (const auto& field : split_csv_line(cases_arg)) {
      const std::size_t c = parse_count(field, "--cases");
      if (c < 1 || c > 7)
        throw std::runtime_error("--cases entries must be 1..7");
      cases.push_back(static_cast<int>(c));
    }
    if (cases.empty()) throw std::runtime_error("--cases lists no cases");
  }

  fs::create_directories(out_dir);
  bool hard_failure = false;
  for (int case_id : cases) {
    try {
      const CaseReport report = run_case(corpus, case_id, cfg);
      write_case_report(report, out_dir);
      std::string unseen;
      for (const auto& u : report.unseen) unseen += (unseen.empty() ? "" : " ") + u;
      std::printf("case %d (%s): m=%zu train=%zu similarity=%.4f %s%s\n",
                  case_id, unseen.c_str(), report.test_size, report.train_size,
                  report.score, report.pass ? "PASS" : "FAIL",
                  report.test_size < 4 ? "  [small test set]" : "");
    } catch (const std::exception& e) {
      hard_failure = true;
      std::fprintf(stderr, "case %d: error: %s\n", case_id, e.what());
    }
    std::fflush(stdout);
  }
  return hard_failure ? 2 : 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"force-feedback pouring: synthesize demonstrations, train the "
               "frc/vel/stp networks, generate trajectories, evaluate "
               "generalization"};
  app.require_subcommand(1);

  // synth
  auto* synth = app.add_subcommand("synth", "write a synthetic corpus");
  std::string synth_spec, synth_out = "corpus";
  std::uint64_t synth_seed = 7;
  synth->add_option("--spec", synth_spec, "generator spec JSON (default: built-in)");
  synth->add_option("--seed", synth_seed, "random seed");
  synth->add_option("--out", synth_out, "output directory")->required();

  // train
  auto* tr = app.add_subcommand("train", "train one network on a corpus");
  std::string tr_kind, tr_corpus, tr_out = "run";
  TrainConfig tr_cfg;
  tr_cfg.log_every = 100;
  tr->add_option("--kind", tr_kind, "frc, vel or stp")->required();
  tr->add_option("--corpus", tr_corpus, "corpus directory")->required();
  tr->add_option("--out", tr_out, "output directory")->required();
  tr->add_option("--seed", tr_cfg.seed, "random seed");
  tr->add_option("--epochs", tr_cfg.epochs,
                 "epochs (default 4000 vel, 2000 stp/frc)");
  tr->add_option("--lr", tr_cfg.learning_rate, "learning rate (default 0.01)");
  tr->add_option("--hidden", tr_cfg.hidden_size, "LSTM units (default 16)");
  tr->add_option("--clip", tr_cfg.clip_norm, "gradient clip norm (default 5)");
  tr->add_option("--log-every", tr_cfg.log_every, "console cadence (0=quiet)");
  tr->add_option("--threads", tr_cfg.threads, "worker threads (0=auto)");
  tr->add_option("--snapshot-every", tr_cfg.snapshot_every,
                 "also write a checkpoint every K epochs (0=off)");

  // generate
  auto* gen = app.add_subcommand("generate",
                                 "closed-loop rollout with the frc feedback");
  GenerateArgs gen_args;
  gen_args.out_dir = "run";
  double gen_theta1 = 0.0;
  bool gen_theta1_set = false;
  gen->add_option("--frc", gen_args.frc_path, "frc checkpoint")->required();
  gen->add_option("--vel", gen_args.vel_path, "vel checkpoint")->required();
  gen->add_option("--stp", gen_args.stp_path, "stp checkpoint")->required();
  gen->add_option("--corpus", gen_args.corpus_dir, "corpus directory");
  gen->add_option("--trial", gen_args.trial_id,
                  "take theta_1 and z from this corpus trial");
  auto* theta_opt =
      gen->add_option("--theta1", gen_theta1, "start angle (degrees)");
  gen->add_option("--z", gen_args.z_values,
                  "static context, 8 values: f_init f_empty f_final d_cup "
                  "h_cup d_ctn h_ctn rho")
      ->expected(8);
  gen->add_option("--t-max", gen_args.t_max, "step bound (default: corpus T_max)");
  gen->add_option("--out", gen_args.out_dir, "output directory")->required();
  gen->callback([&] { gen_theta1_set = theta_opt->count() > 0; });

  // evaluate
  auto* ev = app.add_subcommand("evaluate", "run the seven-case holdout battery");
  std::string ev_corpus, ev_cases = "all", ev_out = "eval";
  EvalConfig ev_cfg;
  ev->add_option("--corpus", ev_corpus, "corpus directory")->required();
  ev->add_option("--cases", ev_cases, "\"all\" or comma list, e.g. 1,3,7");
  ev->add_option("--out", ev_out, "output directory")->required();
  ev->add_option("--seed", ev_cfg.seed, "random seed");
  ev->add_option("--hidden", ev_cfg.hidden_size, "LSTM units (default 16)");
  ev->add_option("--lr", ev_cfg.learning_rate, "learning rate (default 0.01)");
  ev->add_option("--epochs-vel", ev_cfg.epochs_vel, "vel epochs (default 4000)");
  ev->add_option("--epochs-stp", ev_cfg.epochs_stp, "stp epochs (default 2000)");
  ev->add_option("--epochs-frc", ev_cfg.epochs_frc, "frc epochs (default 2000)");
  ev->add_option("--threshold", ev_cfg.pass_threshold,
                 "similarity pass threshold (default 0.6)");
  ev->add_option("--bins", ev_cfg.bins, "histogram bins (default 30)");
  ev->add_option("--unseen-cup", ev_cfg.unseen.cup_id, "held-out cup id");
  ev->add_option("--unseen-container", ev_cfg.unseen.container_id,
                 "held-out container id");
  ev->add_option("--unseen-material", ev_cfg.unseen.material_id,
                 "held-out material id");
  ev->add_option("--threads", ev_cfg.threads, "worker threads (0=auto)");
  ev->add_option("--log-every", ev_cfg.log_every, "training console cadence");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 1;  // --help exits cleanly, bad usage is 1
  }

  try {
    if (synth->parsed()) return cmd_synth(synth_spec, synth_seed, synth_out);
    if (tr->parsed()) return cmd_train(tr_kind, tr_corpus, tr_cfg, tr_out);
    if (gen->parsed()) {
      if (gen_theta1_set) gen_args.theta1 = gen_theta1;
      return cmd_generate(gen_args);
    }
    if (ev->parsed()) return cmd_evaluate(ev_corpus, ev_cases, ev_cfg, ev_out);
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return 2;
  }
  return 1;
}
