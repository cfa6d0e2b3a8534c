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

#include "pourgen/linalg.hpp"

namespace pourgen {

/// Gate parameters of one LSTM layer. Each matrix is
/// hidden x (hidden + input) and multiplies the concatenation [h_prev, x_t],
/// hidden part first. The gates are kept as four separate matrices.
struct LstmParams {
  std::size_t hidden_size = 0;
  std::size_t input_size = 0;
  Mat w_i, w_o, w_f, w_g;
  Vec b_i, b_o, b_f, b_g;
};

LstmParams make_lstm_params(std::size_t hidden, std::size_t input);

/// Learned initial-state head: c_0 = w * x_1 + b, h_0 = tanh(c_0).
struct InitParams {
  Mat w;  // hidden x input
  Vec b;  // hidden
};

/// Everything the backward pass needs from one forward step.
struct StepCache {
  Vec hx;      // [h_prev, x_t]
  Vec c_prev;
  Vec i, o, f, g;
  Vec c, tanh_c;
};

/// One forward step:
///   i,o,f = sigm(W_*[h_prev, x] + b_*),  g = tanh(W_g[h_prev, x] + b_g),
///   c_t = f . c_prev + i . g,            h_t = o . tanh(c_t).
/// h_out/c_out are resized; cache buffers are reused when already sized.
void lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev,
               const Vec& c_prev, Vec& h_out, Vec& c_out, StepCache& cache);

/// Exact derivatives of one step. dh/dc are the upstream gradients of h_t and
/// c_t; gate-parameter gradients are accumulated into `acc` (same shapes as
/// the parameters), dh_prev/dc_prev/dx come back for the chain. Summing over
/// a sequence, newest step first, yields full BPTT gradients.
void lstm_step_backward(const LstmParams& p, const StepCache& cache,
                        const Vec& dh, const Vec& dc, LstmParams& acc,
                        Vec& dh_prev, Vec& dc_prev, Vec& dx);

void init_state(const InitParams& ip, const Vec& x1, Vec& h0, Vec& c0);

/// Plain tanh RNN step, kept as a reference baseline only; the pipeline
/// itself always uses the LSTM.
struct RnnParams {
  Mat w;  // hidden x (hidden + input), [h_prev, x] order
  Vec b;
};

Vec rnn_step(const RnnParams& p, const Vec& x, const Vec& h_prev);

}  // namespace pourgen
