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

#include "pourgen/lstm.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pourgen {

LstmParams make_lstm_params(std::size_t hidden, std::size_t input) {
  if (hidden == 0 || input == 0)
    throw std::invalid_argument("make_lstm_params: sizes must be positive");
  LstmParams p;
  p.hidden_size = hidden;
  p.input_size = input;
  const std::size_t cols = hidden + input;
  p.w_i = Mat(hidden, cols);
  p.w_o = Mat(hidden, cols);
  p.w_f = Mat(hidden, cols);
  p.w_g = Mat(hidden, cols);
  p.b_i.assign(hidden, 0.0);
  p.b_o.assign(hidden, 0.0);
  p.b_f.assign(hidden, 0.0);
  p.b_g.assign(hidden, 0.0);
  return p;
}

namespace {

void check_step_dims(const LstmParams& p, const Vec& x, const Vec& h_prev,
                     const Vec& c_prev) {
  if (x.size() != p.input_size || h_prev.size() != p.hidden_size ||
      c_prev.size() != p.hidden_size ||
      p.w_i.cols != p.hidden_size + p.input_size) {
    std::ostringstream ss;
    ss << "lstm_step: dimension mismatch: hidden=" << p.hidden_size
       << " input=" << p.input_size << " |x|=" << x.size()
       << " |h_prev|=" << h_prev.size() << " |c_prev|=" << c_prev.size();
    throw std::invalid_argument(ss.str());
  }
}

// pre = W . hx + b, one gate.
void gate_pre(const Mat& w, const Vec& b, const Vec& hx, Vec& pre) {
  pre.resize(w.rows);
  const std::size_t n = w.cols;
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* wr = w.row(r);
    double acc = b[r];
    for (std::size_t c = 0; c < n; ++c) acc += wr[c] * hx[c];
    pre[r] = acc;
  }
}

}  // namespace

void lstm_step(const LstmParams& p, const Vec& x, const Vec& h_prev,
               const Vec& c_prev, Vec& h_out, Vec& c_out, StepCache& cache) {
  check_step_dims(p, x, h_prev, c_prev);
  const std::size_t h = p.hidden_size;

  cache.hx.resize(h + p.input_size);
  for (std::size_t k = 0; k < h; ++k) cache.hx[k] = h_prev[k];
  for (std::size_t k = 0; k < p.input_size; ++k) cache.hx[h + k] = x[k];
  cache.c_prev = c_prev;

  gate_pre(p.w_i, p.b_i, cache.hx, cache.i);
  gate_pre(p.w_o, p.b_o, cache.hx, cache.o);
  gate_pre(p.w_f, p.b_f, cache.hx, cache.f);
  gate_pre(p.w_g, p.b_g, cache.hx, cache.g);

  cache.c.resize(h);
  cache.tanh_c.resize(h);
  h_out.resize(h);
  c_out.resize(h);
  // Read c_prev through the cache copy: c_out may alias c_prev.
  for (std::size_t k = 0; k < h; ++k) {
    cache.i[k] = sigmoid(cache.i[k]);
    cache.o[k] = sigmoid(cache.o[k]);
    cache.f[k] = sigmoid(cache.f[k]);
    cache.g[k] = std::tanh(cache.g[k]);
    cache.c[k] = cache.f[k] * cache.c_prev[k] + cache.i[k] * cache.g[k];
    cache.tanh_c[k] = std::tanh(cache.c[k]);
    h_out[k] = cache.o[k] * cache.tanh_c[k];
    c_out[k] = cache.c[k];
  }
}

void lstm_step_backward(const LstmParams& p, const StepCache& cache,
                        const Vec& dh, const Vec& dc, LstmParams& acc,
                        Vec& dh_prev, Vec& dc_prev, Vec& dx) {
  const std::size_t h = p.hidden_size;
  const std::size_t cols = h + p.input_size;
  if (cache.hx.size() != cols || dh.size() != h || dc.size() != h ||
      acc.hidden_size != h || acc.input_size != p.input_size) {
    throw std::invalid_argument(
        "lstm_step_backward: cache/params/gradient shape mismatch");
  }

  // Per-unit gate gradients, pre-activation.
  Vec dzi(h), dzo(h), dzf(h), dzg(h);
  dc_prev.resize(h);
  for (std::size_t k = 0; k < h; ++k) {
    const double i = cache.i[k], o = cache.o[k], f = cache.f[k],
                 g = cache.g[k];
    const double tc = cache.tanh_c[k];
    const double d_o = dh[k] * tc;
    const double d_c = dc[k] + dh[k] * o * (1.0 - tc * tc);
    const double d_f = d_c * cache.c_prev[k];
    const double d_i = d_c * g;
    const double d_g = d_c * i;
    dc_prev[k] = d_c * f;
    dzi[k] = d_i * i * (1.0 - i);
    dzo[k] = d_o * o * (1.0 - o);
    dzf[k] = d_f * f * (1.0 - f);
    dzg[k] = d_g * (1.0 - g * g);
  }

  // Weight/bias accumulation and the [h_prev, x] gradient.
  Vec dhx(cols, 0.0);
  const struct {
    const Vec* dz;
    const Mat* w;
    Mat* dw;
    Vec* db;
  } gates[4] = {{&dzi, &p.w_i, &acc.w_i, &acc.b_i},
                {&dzo, &p.w_o, &acc.w_o, &acc.b_o},
                {&dzf, &p.w_f, &acc.w_f, &acc.b_f},
                {&dzg, &p.w_g, &acc.w_g, &acc.b_g}};
  for (const auto& gate : gates) {
    for (std::size_t r = 0; r < h; ++r) {
      const double dz = (*gate.dz)[r];
      double* dwr = gate.dw->row(r);
      const double* wr = gate.w->row(r);
      for (std::size_t c = 0; c < cols; ++c) {
        dwr[c] += dz * cache.hx[c];
        dhx[c] += wr[c] * dz;
      }
      (*gate.db)[r] += dz;
    }
  }

  dh_prev.assign(dhx.begin(), dhx.begin() + h);
  dx.assign(dhx.begin() + h, dhx.end());
}

void init_state(const InitParams& ip, const Vec& x1, Vec& h0, Vec& c0) {
  affine_into(ip.w, ip.b, x1, c0);
  h0.resize(c0.size());
  for (std::size_t k = 0; k < c0.size(); ++k) h0[k] = std::tanh(c0[k]);
}

Vec rnn_step(const RnnParams& p, const Vec& x, const Vec& h_prev) {
  if (p.w.cols != x.size() + h_prev.size())
    throw std::invalid_argument("rnn_step: dimension mismatch");
  Vec hx(h_prev);
  hx.insert(hx.end(), x.begin(), x.end());
  Vec h = affine(p.w, p.b, hx);
  for (double& v : h) v = std::tanh(v);
  return h;
}

}  // namespace pourgen
