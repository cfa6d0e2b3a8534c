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

#pragma once

#include <string>
#include <vector>

#include "pourgen/dataset.hpp"
#include "pourgen/linalg.hpp"
#include "pourgen/lstm.hpp"

namespace pourgen {

/// The three task networks: force estimator, velocity generator, stop
/// classifier. Each is one LSTM layer with a learned initial state and a
/// fully connected head.
enum class NetKind { Frc, Vel, Stp };

const char* to_string(NetKind kind);
NetKind kind_from_string(const std::string& name);

/// frc consumes [theta, z] (9), vel/stp consume [theta, f, z] (10).
std::size_t input_size_for(NetKind kind);
/// Head width: scalar for frc/vel, two logits for stp.
std::size_t output_size_for(NetKind kind);

/// Per-feature z-score constants fitted on the training set, plus the
/// matching constants for the scalar regression target, so the network
/// trains in normalized space and reports unitless losses.
struct FeatureScaler {
  Vec mean, stddev;
  double target_mean = 0.0;
  double target_stddev = 1.0;

  void scale_into(const Vec& raw, Vec& out) const;
  double scale_target(double raw) const {
    return (raw - target_mean) / target_stddev;
  }
  double unscale_target(double scaled) const {
    return scaled * target_stddev + target_mean;
  }
};

/// Every trainable tensor of one network.
struct ParamSet {
  LstmParams lstm;
  InitParams init;
  Mat head_w;
  Vec head_b;
};

ParamSet make_param_set(NetKind kind, std::size_t hidden);
ParamSet zeros_like(const ParamSet& shape);
void set_zero(ParamSet& p);

/// Visit the tensors in a fixed order (gate weights, gate biases, init head,
/// output head); the order also fixes the random-init draw sequence.
void for_each_tensor(ParamSet& p,
                     const std::function<void(const char*, Vec&)>& fn);
void for_each_tensor(const ParamSet& p,
                     const std::function<void(const char*, const Vec&)>& fn);

std::size_t param_count(const ParamSet& p);
Vec flatten(const ParamSet& p);
void unflatten(const Vec& flat, ParamSet& p);

struct NetworkBundle {
  NetKind kind = NetKind::Vel;
  ParamSet params;
  FeatureScaler scaler;
  // training metadata carried into checkpoints
  std::size_t epochs_trained = 0;
  double final_loss = 0.0;
  double final_accuracy = -1.0;  // stp only; negative = not applicable

  std::size_t hidden_size() const { return params.lstm.hidden_size; }
  std::size_t input_size() const { return params.lstm.input_size; }
};

NetworkBundle make_bundle(NetKind kind, std::size_t hidden);

/// Padded training view of a set of trials for one network kind.
/// vel/frc pad with zeros and mask the padding out of the loss; stp pads by
/// repeating the final frame and its loss runs over the full padded length,
/// while the mask still marks the real frames for accuracy.
struct SequenceBatch {
  NetKind kind = NetKind::Vel;
  std::size_t t_max = 0;
  std::vector<std::size_t> lengths;            // T_i
  std::vector<std::vector<Vec>> features;      // [trial][t], raw units
  std::vector<Vec> targets;                    // vel/frc, raw units, padded
  std::vector<std::vector<int>> labels;        // stp: 0 continue, 1 stop
  std::vector<std::vector<char>> mask;         // target validity, t < eff len

  std::size_t size() const { return lengths.size(); }
  /// Frames the forward pass runs for trial i: T_i - 1 for vel, T_i for frc,
  /// the full padded length for stp.
  std::size_t steps_for_trial(std::size_t i) const;
};

/// omega_t = theta_{t+1} - theta_t; length T-1. Rejects length < 2.
Vec velocity_targets(const Vec& theta);

/// Project the 10-vector a_t onto a network's input ([theta, z] for frc).
Vec input_from_frame(NetKind kind, const Vec& a10);

SequenceBatch make_batch(const Corpus& corpus,
                         const std::vector<std::size_t>& indices,
                         NetKind kind);
SequenceBatch make_batch(const Corpus& corpus, NetKind kind);

/// Input statistics over real frames, target statistics over valid target
/// steps. Degenerate (constant) features get stddev 1 so scaling stays
/// well-defined.
FeatureScaler fit_scaler(const SequenceBatch& batch);

/// Reusable per-trial unroll buffers.
struct TrialTape {
  Vec x1, h0, c0;
  std::vector<StepCache> caches;
  std::vector<Vec> h;      // h_t per step
  std::vector<Vec> out;    // head outputs (normalized space; stp: logits)
  std::vector<Vec> probs;  // stp softmax outputs
};

/// Forward (and, when `grads` is non-null, backward) pass over one trial.
/// Returns the trial's loss contribution: mean squared residual over valid
/// steps for vel/frc (normalized-target space; `inv_trials` is folded into
/// the gradients), or the unnormalized cross-entropy sum over the padded
/// length for stp. For stp, per-step argmax hits over masked steps are added
/// to correct/total when provided.
double trial_loss_and_grad(const NetworkBundle& net, const SequenceBatch& batch,
                           std::size_t trial, double inv_trials,
                           TrialTape& tape, ParamSet* grads,
                           std::size_t* correct = nullptr,
                           std::size_t* total = nullptr);

/// Full-batch loss exactly as the training loop computes it:
/// mean over trials of per-step means for vel/frc (normalized targets),
/// plain double sum of cross-entropy for stp.
double batch_loss(const NetworkBundle& net, const SequenceBatch& batch);

/// Loss over caller-supplied predictions in the same units as the batch
/// targets (probability pairs for stp). Follows the printed formulas:
/// double mean for vel/frc, unnormalized cross-entropy sum (probabilities
/// clamped at 1e-12) for stp.
double sequence_loss(const SequenceBatch& batch,
                     const std::vector<std::vector<Vec>>& predictions);

/// Streaming one-step interface used by closed-loop generation. Raw frames
/// in, raw outputs out (velocities and forces are un-normalized, stp yields
/// the class probabilities).
class NetRunner {
 public:
  explicit NetRunner(const NetworkBundle& net);

  /// Learned-initial-state computation from the first frame.
  void start(const Vec& raw_first_frame);
  Vec step(const Vec& raw_frame);
  bool started() const { return started_; }
  NetKind kind() const { return net_.kind; }

 private:
  const NetworkBundle& net_;
  Vec h_, c_, x_, head_;
  Vec h_next_, c_next_;
  StepCache scratch_;
  bool started_ = false;
};

/// Kind-checked one-step helpers matching each network's input contract.
double vel_step(NetRunner& runner, double theta, double force,
                const StaticContext& z);
Vec stp_step(NetRunner& runner, double theta, double force,
             const StaticContext& z);
double frc_step(NetRunner& runner, double theta, const StaticContext& z);

/// Sequence-mode forward: init from the first frame, then one step per
/// frame. Same outputs as repeated NetRunner::step calls.
std::vector<Vec> forward_sequence(const NetworkBundle& net,
                                  const std::vector<Vec>& raw_frames);

/// Self-describing JSON checkpoint; save -> load is value-exact.
void save_checkpoint(const NetworkBundle& net, const std::string& path);
NetworkBundle load_checkpoint(const std::string& path);

}  // namespace pourgen
