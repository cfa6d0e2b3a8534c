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

#include "pourgen/network.hpp"

#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>

#include "json.hpp"

namespace pourgen {

namespace {
constexpr double kProbClamp = 1e-12;
}

const char* to_string(NetKind kind) {
  switch (kind) {
    case NetKind::Frc: return "frc";
    case NetKind::Vel: return "vel";
    case NetKind::Stp: return "stp";
  }
  return "?";
}

NetKind kind_from_string(const std::string& name) {
  if (name == "frc") return NetKind::Frc;
  if (name == "vel") return NetKind::Vel;
  if (name == "stp") return NetKind::Stp;
  throw std::invalid_argument("unknown network kind \"" + name +
                              "\" (expected frc, vel or stp)");
}

std::size_t input_size_for(NetKind kind) {
  return kind == NetKind::Frc ? 9 : 10;
}

std::size_t output_size_for(NetKind kind) {
  return kind == NetKind::Stp ? 2 : 1;
}

void FeatureScaler::scale_into(const Vec& raw, Vec& out) const {
  if (raw.size() != mean.size())
    throw std::invalid_argument("scaler: frame width mismatch");
  out.resize(raw.size());
  for (std::size_t i = 0; i < raw.size(); ++i)
    out[i] = (raw[i] - mean[i]) / stddev[i];
}

ParamSet make_param_set(NetKind kind, std::size_t hidden) {
  ParamSet p;
  const std::size_t input = input_size_for(kind);
  p.lstm = make_lstm_params(hidden, input);
  p.init.w = Mat(hidden, input);
  p.init.b.assign(hidden, 0.0);
  p.head_w = Mat(output_size_for(kind), hidden);
  p.head_b.assign(output_size_for(kind), 0.0);
  return p;
}

ParamSet zeros_like(const ParamSet& shape) {
  ParamSet z = shape;
  set_zero(z);
  return z;
}

void set_zero(ParamSet& p) {
  for_each_tensor(p, [](const char*, Vec& v) { std::fill(v.begin(), v.end(), 0.0); });
}

void for_each_tensor(ParamSet& p,
                     const std::function<void(const char*, Vec&)>& fn) {
  fn("lstm.w_i", p.lstm.w_i.data);
  fn("lstm.w_o", p.lstm.w_o.data);
  fn("lstm.w_f", p.lstm.w_f.data);
  fn("lstm.w_g", p.lstm.w_g.data);
  fn("lstm.b_i", p.lstm.b_i);
  fn("lstm.b_o", p.lstm.b_o);
  fn("lstm.b_f", p.lstm.b_f);
  fn("lstm.b_g", p.lstm.b_g);
  fn("init.w", p.init.w.data);
  fn("init.b", p.init.b);
  fn("head.w", p.head_w.data);
  fn("head.b", p.head_b);
}

void for_each_tensor(const ParamSet& p,
                     const std::function<void(const char*, const Vec&)>& fn) {
  for_each_tensor(const_cast<ParamSet&>(p),
                  [&](const char* name, Vec& v) { fn(name, v); });
}

std::size_t param_count(const ParamSet& p) {
  std::size_t n = 0;
  for_each_tensor(p, [&](const char*, const Vec& v) { n += v.size(); });
  return n;
}

Vec flatten(const ParamSet& p) {
  Vec flat;
  flat.reserve(param_count(p));
  for_each_tensor(p, [&](const char*, const Vec& v) {
    flat.insert(flat.end(), v.begin(), v.end());
  });
  return flat;
}

void unflatten(const Vec& flat, ParamSet& p) {
  std::size_t offset = 0;
  for_each_tensor(p, [&](const char*, Vec& v) {
    if (offset + v.size() > flat.size())
      throw std::invalid_argument("unflatten: vector too short");
    std::copy(flat.begin() + offset, flat.begin() + offset + v.size(),
              v.begin());
    offset += v.size();
  });
  if (offset != flat.size())
    throw std::invalid_argument("unflatten: vector length mismatch");
}

NetworkBundle make_bundle(NetKind kind, std::size_t hidden) {
  NetworkBundle net;
  net.kind = kind;
  net.params = make_param_set(kind, hidden);
  net.scaler.mean.assign(input_size_for(kind), 0.0);
  net.scaler.stddev.assign(input_size_for(kind), 1.0);
  return net;
}

std::size_t SequenceBatch::steps_for_trial(std::size_t i) const {
  switch (kind) {
    case NetKind::Vel: return lengths[i] - 1;
    case NetKind::Frc: return lengths[i];
    case NetKind::Stp: return t_max;
  }
  return 0;
}

Vec velocity_targets(const Vec& theta) {
  if (theta.size() < 2)
    throw std::invalid_argument(
        "velocity_targets: need at least two angles");
  Vec omega(theta.size() - 1);
  for (std::size_t t = 0; t + 1 < theta.size(); ++t)
    omega[t] = theta[t + 1] - theta[t];
  return omega;
}

Vec input_from_frame(NetKind kind, const Vec& a10) {
  if (a10.size() != 10)
    throw std::invalid_argument("input_from_frame: expected a 10-vector");
  if (kind != NetKind::Frc) return a10;
  Vec x;
  x.reserve(9);
  x.push_back(a10[0]);  // theta; the force component is dropped
  x.insert(x.end(), a10.begin() + 2, a10.end());
  return x;
}

SequenceBatch make_batch(const Corpus& corpus,
                         const std::vector<std::size_t>& indices,
                         NetKind kind) {
  if (indices.empty())
    throw std::invalid_argument("make_batch: no trials selected");
  SequenceBatch batch;
  batch.kind = kind;
  for (std::size_t idx : indices)
    batch.t_max = std::max(batch.t_max, corpus.trials[idx].length());

  const PadMode mode =
      kind == NetKind::Stp ? PadMode::EndValue : PadMode::Zero;
  for (std::size_t idx : indices) {
    const TrialRecord& tr = corpus.trials[idx];
    const std::size_t len = tr.length();
    batch.lengths.push_back(len);

    std::vector<Vec> frames(batch.t_max);
    for (std::size_t t = 0; t < len; ++t)
      frames[t] = input_from_frame(kind, assemble_features(tr, t));
    for (std::size_t t = len; t < batch.t_max; ++t)
      frames[t] = mode == PadMode::Zero ? Vec(input_size_for(kind), 0.0)
                                        : frames[len - 1];
    batch.features.push_back(std::move(frames));

    if (kind == NetKind::Stp) {
      std::vector<int> lab(batch.t_max, 0);
      for (std::size_t t = len - 1; t < batch.t_max; ++t) lab[t] = 1;
      batch.labels.push_back(std::move(lab));
    } else {
      Vec target = kind == NetKind::Vel ? velocity_targets(tr.theta)
                                        : tr.force;
      batch.targets.push_back(pad(target, batch.t_max, PadMode::Zero));
    }

    const std::size_t eff = kind == NetKind::Vel ? len - 1 : len;
    std::vector<char> m(batch.t_max, 0);
    std::fill(m.begin(), m.begin() + eff, 1);
    batch.mask.push_back(std::move(m));
  }
  return batch;
}

SequenceBatch make_batch(const Corpus& corpus, NetKind kind) {
  std::vector<std::size_t> all(corpus.trials.size());
  for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
  return make_batch(corpus, all, kind);
}

FeatureScaler fit_scaler(const SequenceBatch& batch) {
  const std::size_t dim = batch.features.front().front().size();
  FeatureScaler s;
  s.mean.assign(dim, 0.0);
  s.stddev.assign(dim, 0.0);

  std::size_t count = 0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t t = 0; t < batch.lengths[i]; ++t) {
      const Vec& x = batch.features[i][t];
      for (std::size_t k = 0; k < dim; ++k) s.mean[k] += x[k];
      ++count;
    }
  for (double& m : s.mean) m /= static_cast<double>(count);
  for (std::size_t i = 0; i < batch.size(); ++i)
    for (std::size_t t = 0; t < batch.lengths[i]; ++t) {
      const Vec& x = batch.features[i][t];
      for (std::size_t k = 0; k < dim; ++k) {
        const double d = x[k] - s.mean[k];
        s.stddev[k] += d * d;
      }
    }
  for (double& v : s.stddev) {
    v = std::sqrt(v / static_cast<double>(count));
    if (v < 1e-12) v = 1.0;
  }

  if (batch.kind != NetKind::Stp) {
    double mean = 0.0, var = 0.0;
    std::size_t n = 0;
    for (std::size_t i = 0; i < batch.size(); ++i)
      for (std::size_t t = 0; t < batch.t_max; ++t)
        if (batch.mask[i][t]) {
          mean += batch.targets[i][t];
          ++n;
        }
    mean /= static_cast<double>(n);
    for (std::size_t i = 0; i < batch.size(); ++i)
      for (std::size_t t = 0; t < batch.t_max; ++t)
        if (batch.mask[i][t]) {
          const double d = batch.targets[i][t] - mean;
          var += d * d;
        }
    s.target_mean = mean;
    s.target_stddev = std::sqrt(var / static_cast<double>(n));
    if (s.target_stddev < 1e-12) s.target_stddev = 1.0;
  }
  return s;
}

// ---------------------------------------------------------------------------
// Unrolled forward/backward
// ---------------------------------------------------------------------------

namespace {

void head_forward(const ParamSet& p, const Vec& h, Vec& out) {
  affine_into(p.head_w, p.head_b, h, out);
}

}  // namespace

double trial_loss_and_grad(const NetworkBundle& net, const SequenceBatch& batch,
                           std::size_t trial, double inv_trials,
                           TrialTape& tape, ParamSet* grads,
                           std::size_t* correct, std::size_t* total) {
  if (net.kind != batch.kind)
    throw std::invalid_argument("trial_loss_and_grad: batch kind mismatch");
  const ParamSet& p = net.params;
  const std::size_t n_steps = batch.steps_for_trial(trial);
  const std::size_t hidden = net.hidden_size();
  const bool is_stp = net.kind == NetKind::Stp;

  tape.caches.resize(n_steps);
  tape.h.resize(n_steps);
  tape.out.resize(n_steps);
  if (is_stp) tape.probs.resize(n_steps);

  // Forward.
  net.scaler.scale_into(batch.features[trial][0], tape.x1);
  init_state(p.init, tape.x1, tape.h0, tape.c0);
  Vec h = tape.h0, c = tape.c0;
  Vec x;
  double loss = 0.0;
  const std::size_t eff =
      net.kind == NetKind::Vel ? batch.lengths[trial] - 1 : batch.lengths[trial];
  for (std::size_t t = 0; t < n_steps; ++t) {
    net.scaler.scale_into(batch.features[trial][t], x);
    lstm_step(p.lstm, x, h, c, tape.h[t], c, tape.caches[t]);
    h = tape.h[t];
    head_forward(p, h, tape.out[t]);
    if (is_stp) {
      tape.probs[t] = softmax(tape.out[t]);
      const int label = batch.labels[trial][t];
      const double prob = std::max(tape.probs[t][label], kProbClamp);
      loss -= std::log(prob);
      if (correct && t < eff) {
        const int pred = tape.probs[t][1] > tape.probs[t][0] ? 1 : 0;
        if (pred == label) ++*correct;
        ++*total;
      }
    } else if (batch.mask[trial][t]) {
      const double target = net.scaler.scale_target(batch.targets[trial][t]);
      const double r = tape.out[t][0] - target;
      loss += r * r;
    }
  }
  if (!is_stp) loss /= static_cast<double>(eff);
  if (!grads) return loss;

  // Backward.
  Vec dh(hidden, 0.0), dc(hidden, 0.0);
  Vec dh_prev, dc_prev, dx, dout;
  for (std::size_t t = n_steps; t-- > 0;) {
    if (is_stp) {
      dout = tape.probs[t];
      dout[batch.labels[trial][t]] -= 1.0;
    } else {
      dout.assign(1, 0.0);
      if (batch.mask[trial][t]) {
        const double target = net.scaler.scale_target(batch.targets[trial][t]);
        dout[0] = 2.0 * (tape.out[t][0] - target) * inv_trials /
                  static_cast<double>(eff);
      }
    }
    // Output head.
    for (std::size_t r = 0; r < grads->head_w.rows; ++r) {
      double* gw = grads->head_w.row(r);
      const double* w = p.head_w.row(r);
      const double d = dout[r];
      for (std::size_t k = 0; k < hidden; ++k) {
        gw[k] += d * tape.h[t][k];
        dh[k] += w[k] * d;
      }
      grads->head_b[r] += d;
    }
    lstm_step_backward(p.lstm, tape.caches[t], dh, dc, grads->lstm, dh_prev,
                       dc_prev, dx);
    dh = dh_prev;
    dc = dc_prev;
  }

  // Initial-state head: c0 = W x1 + b, h0 = tanh(c0).
  for (std::size_t k = 0; k < hidden; ++k)
    dc[k] += dh[k] * (1.0 - tape.h0[k] * tape.h0[k]);
  for (std::size_t r = 0; r < hidden; ++r) {
    double* gw = grads->init.w.row(r);
    for (std::size_t cidx = 0; cidx < tape.x1.size(); ++cidx)
      gw[cidx] += dc[r] * tape.x1[cidx];
    grads->init.b[r] += dc[r];
  }
  return loss;
}

double batch_loss(const NetworkBundle& net, const SequenceBatch& batch) {
  if (batch.size() == 0) throw std::invalid_argument("batch_loss: empty batch");
  TrialTape tape;
  double total = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i)
    total += trial_loss_and_grad(net, batch, i, 1.0, tape, nullptr);
  if (net.kind != NetKind::Stp) total /= static_cast<double>(batch.size());
  return total;
}

double sequence_loss(const SequenceBatch& batch,
                     const std::vector<std::vector<Vec>>& predictions) {
  if (batch.size() == 0)
    throw std::invalid_argument("sequence_loss: empty batch");
  if (predictions.size() != batch.size())
    throw std::invalid_argument("sequence_loss: prediction count mismatch");

  if (batch.kind == NetKind::Stp) {
    double loss = 0.0;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      if (predictions[i].size() < batch.t_max)
        throw std::invalid_argument("sequence_loss: short stp prediction");
      for (std::size_t t = 0; t < batch.t_max; ++t) {
        const double prob =
            std::max(predictions[i][t][batch.labels[i][t]], kProbClamp);
        loss -= std::log(prob);
      }
    }
    return loss;
  }

  double loss = 0.0;
  for (std::size_t i = 0; i < batch.size(); ++i) {
    double trial = 0.0;
    std::size_t eff = 0;
    for (std::size_t t = 0; t < batch.t_max; ++t)
      if (batch.mask[i][t]) {
        const double r = batch.targets[i][t] - predictions[i][t][0];
        trial += r * r;
        ++eff;
      }
    loss += trial / static_cast<double>(eff);
  }
  return loss / static_cast<double>(batch.size());
}

// ---------------------------------------------------------------------------
// Streaming interface
// ---------------------------------------------------------------------------

NetRunner::NetRunner(const NetworkBundle& net) : net_(net) {}

void NetRunner::start(const Vec& raw_first_frame) {
  net_.scaler.scale_into(raw_first_frame, x_);
  init_state(net_.params.init, x_, h_, c_);
  started_ = true;
}

Vec NetRunner::step(const Vec& raw_frame) {
  if (!started_)
    throw std::logic_error("NetRunner: step before start");
  net_.scaler.scale_into(raw_frame, x_);
  lstm_step(net_.params.lstm, x_, h_, c_, h_next_, c_next_, scratch_);
  h_ = h_next_;
  c_ = c_next_;
  affine_into(net_.params.head_w, net_.params.head_b, h_, head_);
  if (net_.kind == NetKind::Stp) return softmax(head_);
  return {net_.scaler.unscale_target(head_[0])};
}

namespace {

Vec frame_for(NetKind kind, double theta, double force,
              const StaticContext& z) {
  Vec a;
  a.reserve(10);
  a.push_back(theta);
  a.push_back(force);
  const Vec zs = z.as_vector();
  a.insert(a.end(), zs.begin(), zs.end());
  return input_from_frame(kind, a);
}

void expect_kind(const NetRunner& runner, NetKind kind) {
  if (runner.kind() != kind) {
    std::ostringstream ss;
    ss << "network kind mismatch: wanted " << to_string(kind) << ", runner is "
       << to_string(runner.kind());
    throw std::invalid_argument(ss.str());
  }
}

}  // namespace

double vel_step(NetRunner& runner, double theta, double force,
                const StaticContext& z) {
  expect_kind(runner, NetKind::Vel);
  return runner.step(frame_for(NetKind::Vel, theta, force, z))[0];
}

Vec stp_step(NetRunner& runner, double theta, double force,
             const StaticContext& z) {
  expect_kind(runner, NetKind::Stp);
  return runner.step(frame_for(NetKind::Stp, theta, force, z));
}

double frc_step(NetRunner& runner, double theta, const StaticContext& z) {
  expect_kind(runner, NetKind::Frc);
  return runner.step(frame_for(NetKind::Frc, theta, 0.0, z))[0];
}

std::vector<Vec> forward_sequence(const NetworkBundle& net,
                                  const std::vector<Vec>& raw_frames) {
  if (raw_frames.empty())
    throw std::invalid_argument("forward_sequence: no frames");
  NetRunner runner(net);
  runner.start(raw_frames.front());
  std::vector<Vec> outputs;
  outputs.reserve(raw_frames.size());
  for (const Vec& frame : raw_frames) outputs.push_back(runner.step(frame));
  return outputs;
}

// ---------------------------------------------------------------------------
// Checkpoints
// ---------------------------------------------------------------------------

namespace {

using nlohmann::json;

json mat_to_json(const Mat& m) {
  return json{{"rows", m.rows}, {"cols", m.cols}, {"data", m.data}};
}

Mat mat_from_json(const json& j, const std::string& name) {
  Mat m(j.at("rows").get<std::size_t>(), j.at("cols").get<std::size_t>());
  const auto data = j.at("data").get<Vec>();
  if (data.size() != m.rows * m.cols)
    throw std::runtime_error("checkpoint: " + name +
                             " data length does not match its shape");
  m.data = data;
  return m;
}

json finite_or_null(double v) {
  if (std::isfinite(v)) return v;
  return nullptr;
}

double double_or_nan(const json& j) {
  if (j.is_null()) return std::numeric_limits<double>::quiet_NaN();
  return j.get<double>();
}

}  // namespace

void save_checkpoint(const NetworkBundle& net, const std::string& path) {
  json j;
  j["format"] = "pourgen-checkpoint";
  j["version"] = 1;
  j["kind"] = to_string(net.kind);
  j["hidden_size"] = net.hidden_size();
  j["input_size"] = net.input_size();
  j["output_size"] = output_size_for(net.kind);
  j["lstm"] = {{"w_i", mat_to_json(net.params.lstm.w_i)},
               {"w_o", mat_to_json(net.params.lstm.w_o)},
               {"w_f", mat_to_json(net.params.lstm.w_f)},
               {"w_g", mat_to_json(net.params.lstm.w_g)},
               {"b_i", net.params.lstm.b_i},
               {"b_o", net.params.lstm.b_o},
               {"b_f", net.params.lstm.b_f},
               {"b_g", net.params.lstm.b_g}};
  j["init"] = {{"w", mat_to_json(net.params.init.w)},
               {"b", net.params.init.b}};
  j["head"] = {{"w", mat_to_json(net.params.head_w)}, {"b", net.params.head_b}};
  j["scaler"] = {{"mean", net.scaler.mean},
                 {"stddev", net.scaler.stddev},
                 {"target_mean", net.scaler.target_mean},
                 {"target_stddev", net.scaler.target_stddev}};
  j["training"] = {{"epochs", net.epochs_trained},
                   {"final_loss", finite_or_null(net.final_loss)},
                   {"final_accuracy", net.final_accuracy >= 0.0
                                          ? json(net.final_accuracy)
                                          : json(nullptr)}};

  std::ofstream out(path);
  if (!out)
    throw std::runtime_error("save_checkpoint: cannot write " + path);
  out << j.dump(2) << "\n";
}

NetworkBundle load_checkpoint(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("load_checkpoint: cannot open " + path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw std::runtime_error("load_checkpoint: " + path + ": " + e.what());
  }
  if (j.value("format", "") != "pourgen-checkpoint")
    throw std::runtime_error("load_checkpoint: " + path +
                             " is not a pourgen checkpoint");

  NetworkBundle net;
  net.kind = kind_from_string(j.at("kind").get<std::string>());
  const std::size_t hidden = j.at("hidden_size").get<std::size_t>();
  net.params = make_param_set(net.kind, hidden);
  const json& l = j.at("lstm");
  net.params.lstm.w_i = mat_from_json(l.at("w_i"), "lstm.w_i");
  net.params.lstm.w_o = mat_from_json(l.at("w_o"), "lstm.w_o");
  net.params.lstm.w_f = mat_from_json(l.at("w_f"), "lstm.w_f");
  net.params.lstm.w_g = mat_from_json(l.at("w_g"), "lstm.w_g");
  net.params.lstm.b_i = l.at("b_i").get<Vec>();
  net.params.lstm.b_o = l.at("b_o").get<Vec>();
  net.params.lstm.b_f = l.at("b_f").get<Vec>();
  net.params.lstm.b_g = l.at("b_g").get<Vec>();
  net.params.init.w = mat_from_json(j.at("init").at("w"), "init.w");
  net.params.init.b = j.at("init").at("b").get<Vec>();
  net.params.head_w = mat_from_json(j.at("head").at("w"), "head.w");
  net.params.head_b = j.at("head").at("b").get<Vec>();
  net.scaler.mean = j.at("scaler").at("mean").get<Vec>();
  net.scaler.stddev = j.at("scaler").at("stddev").get<Vec>();
  net.scaler.target_mean = j.at("scaler").at("target_mean").get<double>();
  net.scaler.target_stddev = j.at("scaler").at("target_stddev").get<double>();
  net.epochs_trained = j.at("training").at("epochs").get<std::size_t>();
  net.final_loss = double_or_nan(j.at("training").at("final_loss"));
  const json& acc = j.at("training").at("final_accuracy");
  net.final_accuracy = acc.is_null() ? -1.0 : acc.get<double>();

  if (net.params.lstm.w_i.cols != hidden + net.params.lstm.input_size ||
      net.scaler.mean.size() != input_size_for(net.kind))
    throw std::runtime_error("load_checkpoint: " + path +
                             ": inconsistent shapes");
  return net;
}

}  // namespace pourgen
