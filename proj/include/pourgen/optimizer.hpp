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

#include <cstdint>
#include <string>
#include <vector>

#include "pourgen/network.hpp"

namespace pourgen {

/// Adam with bias correction:
///   m <- b1 m + (1-b1) g,  v <- b2 v + (1-b2) g^2,
///   p <- p - lr * m_hat / (sqrt(v_hat) + eps).
struct AdamState {
  ParamSet m, v;
  std::size_t step = 0;
  double lr = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
};

AdamState make_adam(const ParamSet& shape, double lr);

/// One update. A non-finite gradient rejects the step and names the tensor.
void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads);

/// Scales all gradients by max_norm/norm when the global L2 norm exceeds
/// max_norm (direction preserved). Returns the pre-clip norm.
double clip_global_norm(ParamSet& grads, double max_norm);

enum class BatchMode { Full };

struct TrainConfig {
  double learning_rate = 0.01;
  std::size_t epochs = 0;  // 0 = kind default (vel 4000, stp 2000, frc 2000)
  BatchMode batch_mode = BatchMode::Full;
  std::uint64_t seed = 1;
  double clip_norm = 5.0;
  std::size_t hidden_size = 16;
  std::size_t log_every = 0;       // progress lines to stdout; 0 = silent
  std::size_t threads = 0;         // 0 = hardware concurrency
  std::size_t snapshot_every = 0;  // fire the snapshot hook every K epochs
};

std::size_t default_epochs(NetKind kind);

struct EpochRecord {
  std::size_t epoch = 0;  // 1-based
  double loss = 0.0;
  double accuracy = -1.0;  // stp only
};

struct TrainResult {
  NetworkBundle net;
  std::vector<EpochRecord> history;
};

using SnapshotHook =
    std::function<void(const NetworkBundle& net, std::size_t epoch)>;

/// Full-batch BPTT for cfg.epochs. Weights start uniform in [-0.08, 0.08]
/// from the seed; per-trial gradients are always reduced in trial order, so
/// the run is bit-reproducible for a fixed seed at any thread count.
/// Throws if the loss turns non-finite, reporting the epoch. When
/// cfg.snapshot_every is set, `snapshot` sees the in-progress network every
/// K epochs (the caller decides where intermediate checkpoints go).
TrainResult train(NetKind kind, const SequenceBatch& batch,
                  const TrainConfig& cfg, const SnapshotHook& snapshot = {});

/// Micro-averaged per-step argmax accuracy over the valid (unpadded) steps.
double classifier_accuracy(const NetworkBundle& net,
                           const SequenceBatch& batch);

/// CSV: epoch,loss[,accuracy]. Timing stays on the console so the file is
/// identical between reruns.
void save_train_log(const std::vector<EpochRecord>& history, NetKind kind,
                    const std::string& path);

}  // namespace pourgen
