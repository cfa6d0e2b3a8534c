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

#include "pourgen/optimizer.hpp"

#include <chrono>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <thread>

#include "pourgen/rng.hpp"
#include "pourgen/textio.hpp"

namespace pourgen {

AdamState make_adam(const ParamSet& shape, double lr) {
  AdamState state;
  state.m = zeros_like(shape);
  state.v = zeros_like(shape);
  state.lr = lr;
  return state;
}

void adam_step(AdamState& state, ParamSet& params, const ParamSet& grads) {
  for_each_tensor(grads, [](const char* name, const Vec& g) {
    for (double v : g)
      if (!std::isfinite(v)) {
        std::ostringstream ss;
        ss << "adam_step: non-finite gradient in " << name;
        throw std::runtime_error(ss.str());
      }
  });

  ++state.step;
  const double bc1 = 1.0 - std::pow(state.beta1, state.step);
  const double bc2 = 1.0 - std::pow(state.beta2, state.step);

  // Walk the three sets in lockstep; for_each_tensor fixes the order.
  std::vector<Vec*> pm, pv, pp;
  std::vector<const Vec*> pg;
  for_each_tensor(state.m, [&](const char*, Vec& v) { pm.push_back(&v); });
  for_each_tensor(state.v, [&](const char*, Vec& v) { pv.push_back(&v); });
  for_each_tensor(params, [&](const char*, Vec& v) { pp.push_back(&v); });
  for_each_tensor(grads, [&](const char*, const Vec& v) { pg.push_back(&v); });

  for (std::size_t k = 0; k < pp.size(); ++k) {
    Vec& m = *pm[k];
    Vec& v = *pv[k];
    Vec& p = *pp[k];
    const Vec& g = *pg[k];
    if (p.size() != g.size())
      throw std::invalid_argument("adam_step: parameter/gradient shape mismatch");
    for (std::size_t i = 0; i < p.size(); ++i) {
      m[i] = state.beta1 * m[i] + (1.0 - state.beta1) * g[i];
      v[i] = state.beta2 * v[i] + (1.0 - state.beta2) * g[i] * g[i];
      const double m_hat = m[i] / bc1;
      const double v_hat = v[i] / bc2;
      p[i] -= state.lr * m_hat / (std::sqrt(v_hat) + state.eps);
    }
  }
}

double clip_global_norm(ParamSet& grads, double max_norm) {
  double sq = 0.0;
  for_each_tensor(grads, [&](const char*, const Vec& v) {
    for (double g : v) sq += g * g;
  });
  const double norm = std::sqrt(sq);
  if (norm > max_norm && norm > 0.0) {
    const double scale = max_norm / norm;
    for_each_tensor(grads,
                    [&](const char*, Vec& v) { for (double& g : v) g *= scale; });
  }
  return norm;
}

std::size_t default_epochs(NetKind kind) {
  return kind == NetKind::Vel ? 4000 : 2000;
}

namespace {

void add_into(ParamSet& acc, const ParamSet& inc) {
  std::vector<Vec*> pa;
  std::vector<const Vec*> pi;
  for_each_tensor(acc, [&](const char*, Vec& v) { pa.push_back(&v); });
  for_each_tensor(inc, [&](const char*, const Vec& v) { pi.push_back(&v); });
  for (std::size_t k = 0; k < pa.size(); ++k) {
    Vec& a = *pa[k];
    const Vec& b = *pi[k];
    for (std::size_t i = 0; i < a.size(); ++i) a[i] += b[i];
  }
}

}  // namespace

TrainResult train(NetKind kind, const SequenceBatch& batch,
                  const TrainConfig& cfg, const SnapshotHook& snapshot) {
  if (batch.size() == 0) throw std::invalid_argument("train: empty batch");
  if (batch.kind != kind)
    throw std::invalid_argument("train: batch was built for another kind");

  const std::size_t epochs = cfg.epochs ? cfg.epochs : default_epochs(kind);
  const std::size_t n = batch.size();
  std::size_t workers = cfg.threads ? cfg.threads
                                    : std::thread::hardware_concurrency();
  if (workers == 0) workers = 1;
  workers = std::min(workers, n);

  NetworkBundle net = make_bundle(kind, cfg.hidden_size);
  net.scaler = fit_scaler(batch);
  {
    Rng rng(cfg.seed);
    for_each_tensor(net.params, [&](const char*, Vec& v) {
      for (double& w : v) w = rng.uniform(-0.08, 0.08);
    });
  }

  AdamState adam = make_adam(net.params, cfg.learning_rate);

  // Per-trial buffers; reducing them in trial order keeps the run
  // bit-reproducible no matter how trials land on workers.
  std::vector<ParamSet> trial_grads(n, zeros_like(net.params));
  std::vector<double> trial_loss(n, 0.0);
  std::vector<std::size_t> trial_correct(n, 0), trial_total(n, 0);
  std::vector<TrialTape> tapes(workers);

  const double inv_trials =
      kind == NetKind::Stp ? 1.0 : 1.0 / static_cast<double>(n);
  const bool is_stp = kind == NetKind::Stp;

  TrainResult result;
  result.history.reserve(epochs);
  const auto t_start = std::chrono::steady_clock::now();

  for (std::size_t epoch = 1; epoch <= epochs; ++epoch) {
    auto run_range = [&](std::size_t worker, std::size_t lo, std::size_t hi) {
      for (std::size_t i = lo; i < hi; ++i) {
        set_zero(trial_grads[i]);
        trial_correct[i] = 0;
        trial_total[i] = 0;
        trial_loss[i] = trial_loss_and_grad(
            net, batch, i, inv_trials, tapes[worker], &trial_grads[i],
            is_stp ? &trial_correct[i] : nullptr,
            is_stp ? &trial_total[i] : nullptr);
      }
    };

    if (workers == 1) {
      run_range(0, 0, n);
    } else {
      std::vector<std::thread> pool;
      const std::size_t chunk = (n + workers - 1) / workers;
      for (std::size_t w = 0; w < workers; ++w) {
        const std::size_t lo = w * chunk;
        const std::size_t hi = std::min(n, lo + chunk);
        if (lo >= hi) break;
        pool.emplace_back(run_range, w, lo, hi);
      }
      for (auto& th : pool) th.join();
    }

    ParamSet grads = zeros_like(net.params);
    double loss = 0.0;
    std::size_t correct = 0, total = 0;
    for (std::size_t i = 0; i < n; ++i) {
      add_into(grads, trial_grads[i]);
      loss += trial_loss[i];
      correct += trial_correct[i];
      total += trial_total[i];
    }
    if (!is_stp) loss *= inv_trials;

    if (!std::isfinite(loss)) {
      std::ostringstream ss;
      ss << "train " << to_string(kind) << ": diverged at epoch " << epoch
         << " (loss is not finite)";
      throw std::runtime_error(ss.str());
    }

    clip_global_norm(grads, cfg.clip_norm);
    adam_step(adam, net.params, grads);

    EpochRecord rec;
    rec.epoch = epoch;
    rec.loss = loss;
    if (is_stp)
      rec.accuracy = static_cast<double>(correct) / static_cast<double>(total);
    result.history.push_back(rec);

    if (snapshot && cfg.snapshot_every && epoch % cfg.snapshot_every == 0 &&
        epoch != epochs) {
      net.epochs_trained = epoch;
      net.final_loss = rec.loss;
      net.final_accuracy = rec.accuracy;
      snapshot(net, epoch);
    }

    if (cfg.log_every && (epoch % cfg.log_every == 0 || epoch == epochs)) {
      const double secs =
          std::chrono::duration<double>(std::chrono::steady_clock::now() -
                                        t_start)
              .count();
      if (is_stp)
        std::printf("[train %s] epoch %zu/%zu loss %.6g acc %.4f (%.1fs)\n",
                    to_string(kind), epoch, epochs, rec.loss, rec.accuracy,
                    secs);
      else
        std::printf("[train %s] epoch %zu/%zu loss %.6g (%.1fs)\n",
                    to_string(kind), epoch, epochs, rec.loss, secs);
      std::fflush(stdout);
    }
  }

  net.epochs_trained = epochs;
  net.final_loss = result.history.back().loss;
  net.final_accuracy = result.history.back().accuracy;
  result.net = std::move(net);
  return result;
}

double classifier_accuracy(const NetworkBundle& net,
                           const SequenceBatch& batch) {
  if (net.kind != NetKind::Stp)
    throw std::invalid_argument("classifier_accuracy: needs a stp network");
  if (batch.size() == 0)
    throw std::invalid_argument("classifier_accuracy: empty batch");
  TrialTape tape;
  std::size_t correct = 0, total = 0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    trial_loss_and_grad(net, batch, i, 1.0, tape, nullptr, &correct, &total);
  return static_cast<double>(correct) / static_cast<double>(total);
}

void save_train_log(const std::vector<EpochRecord>& history, NetKind kind,
                    const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("save_train_log: cannot write " + path);
  const bool with_acc = kind == NetKind::Stp;
  out << (with_acc ? "epoch,loss,accuracy\n" : "epoch,loss\n");
  for (const auto& rec : history) {
    out << rec.epoch << ',' << fmt_g17(rec.loss);
    if (with_acc) out << ',' << fmt_g17(rec.accuracy);
    out << "\n";
  }
}

}  // namespace pourgen
