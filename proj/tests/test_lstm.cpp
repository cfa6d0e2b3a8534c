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

#include <cmath>

#include "doctest.h"
#include "pourgen/lstm.hpp"
#include "pourgen/rng.hpp"
#include "test_util.hpp"

using namespace pourgen;
using testutil::close;

namespace {

// Unrolled loss sum(h_T) over a short sequence, as a pure function of the
// flattened gate parameters; the finite-difference side of the oracle.
double unrolled_sum_h(const Vec& flat, LstmParams shape,
                      const std::vector<Vec>& xs, const Vec& h0,
                      const Vec& c0) {
  testutil::lstm_unflatten(flat, shape);
  Vec h = h0, c = c0;
  StepCache cache;
  for (const Vec& x : xs) lstm_step(shape, x, h, c, h, c, cache);
  double total = 0.0;
  for (double v : h) total += v;
  return total;
}

}  // namespace

TEST_CASE("zero parameters give the half-open gate fixed point") {
  LstmParams p = make_lstm_params(3, 2);
  Vec h, c;
  StepCache cache;
  lstm_step(p, {0.7, -1.2}, Vec(3, 0.0), Vec(3, 0.0), h, c, cache);
  for (int k = 0; k < 3; ++k) {
    CHECK(cache.i[k] == 0.5);
    CHECK(cache.o[k] == 0.5);
    CHECK(cache.f[k] == 0.5);
    CHECK(cache.g[k] == 0.0);
    CHECK(c[k] == 0.0);
    CHECK(h[k] == 0.0);
  }
}

TEST_CASE("zero parameters with unit cell state") {
  LstmParams p = make_lstm_params(2, 2);
  Vec h, c;
  StepCache cache;
  lstm_step(p, {0.3, 0.1}, Vec(2, 0.0), Vec(2, 1.0), h, c, cache);
  const double expect_h = 0.5 * std::tanh(0.5);
  for (int k = 0; k < 2; ++k) {
    CHECK(std::abs(c[k] - 0.5) <= 1e-12);
    CHECK(std::abs(h[k] - expect_h) <= 1e-12);
  }
}

TEST_CASE("saturated forget gate carries the cell through") {
  LstmParams p = make_lstm_params(3, 2);
  std::fill(p.b_f.begin(), p.b_f.end(), 20.0);
  const Vec c_prev = {0.8, -0.4, 1.1};
  Vec h, c;
  StepCache cache;
  lstm_step(p, {0.5, -0.5}, Vec(3, 0.0), c_prev, h, c, cache);
  for (int k = 0; k < 3; ++k) CHECK(std::abs(c[k] - c_prev[k]) <= 1e-8);
}

TEST_CASE("dimension mismatches are rejected") {
  LstmParams p = make_lstm_params(3, 2);
  Vec h, c;
  StepCache cache;
  CHECK_THROWS_AS(lstm_step(p, {1.0}, Vec(3, 0.0), Vec(3, 0.0), h, c, cache),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      lstm_step(p, {1.0, 2.0}, Vec(2, 0.0), Vec(3, 0.0), h, c, cache),
      std::invalid_argument);
}

TEST_CASE("zero upstream gradient yields zero parameter gradients") {
  Rng rng(21);
  LstmParams p = testutil::random_lstm(3, 2, rng);
  Vec h, c;
  StepCache cache;
  lstm_step(p, {0.4, -0.2}, Vec(3, 0.1), Vec(3, -0.3), h, c, cache);

  LstmParams grads = make_lstm_params(3, 2);
  Vec dh_prev, dc_prev, dx;
  lstm_step_backward(p, cache, Vec(3, 0.0), Vec(3, 0.0), grads, dh_prev,
                     dc_prev, dx);
  for (double g : testutil::lstm_flatten(grads)) CHECK(g == 0.0);
  for (double g : dh_prev) CHECK(g == 0.0);
  for (double g : dc_prev) CHECK(g == 0.0);
  for (double g : dx) CHECK(g == 0.0);
}

TEST_CASE("single-step gradients match finite differences") {
  Rng rng(33);
  LstmParams p = testutil::random_lstm(3, 2, rng);
  const std::vector<Vec> xs = {{0.8, -0.4}};
  Vec h0(3), c0(3);
  testutil::randomize(h0, rng);
  testutil::randomize(c0, rng);

  Vec h, c;
  StepCache cache;
  lstm_step(p, xs[0], h0, c0, h, c, cache);
  LstmParams grads = make_lstm_params(3, 2);
  Vec dh_prev, dc_prev, dx;
  lstm_step_backward(p, cache, Vec(3, 1.0), Vec(3, 0.0), grads, dh_prev,
                     dc_prev, dx);

  const Vec numeric = finite_diff_grad(
      [&](const Vec& flat) { return unrolled_sum_h(flat, p, xs, h0, c0); },
      testutil::lstm_flatten(p), 1e-5);
  const Vec analytic = testutil::lstm_flatten(grads);
  REQUIRE(numeric.size() == analytic.size());
  for (std::size_t k = 0; k < numeric.size(); ++k)
    CHECK(close(analytic[k], numeric[k], 1e-8, 1e-5));

  // dx and the state gradients against perturbations of the inputs
  const Vec dx_num = finite_diff_grad(
      [&](const Vec& x) { return unrolled_sum_h(testutil::lstm_flatten(p), p,
                                                {x}, h0, c0); },
      xs[0], 1e-5);
  for (std::size_t k = 0; k < dx.size(); ++k)
    CHECK(close(dx[k], dx_num[k], 1e-8, 1e-5));
}

TEST_CASE("two chained steps propagate state gradients") {
  Rng rng(55);
  LstmParams p = testutil::random_lstm(4, 3, rng);
  std::vector<Vec> xs(2, Vec(3));
  testutil::randomize(xs[0], rng);
  testutil::randomize(xs[1], rng);
  Vec h0(4), c0(4);
  testutil::randomize(h0, rng);
  testutil::randomize(c0, rng);

  // forward both steps keeping caches
  Vec h = h0, c = c0;
  StepCache cache1, cache2;
  Vec h1, c1;
  lstm_step(p, xs[0], h, c, h1, c1, cache1);
  Vec h2, c2;
  lstm_step(p, xs[1], h1, c1, h2, c2, cache2);

  // backward: loss = sum(h2)
  LstmParams grads = make_lstm_params(4, 3);
  Vec dh_prev, dc_prev, dx;
  lstm_step_backward(p, cache2, Vec(4, 1.0), Vec(4, 0.0), grads, dh_prev,
                     dc_prev, dx);
  Vec dh0, dc0;
  lstm_step_backward(p, cache1, dh_prev, dc_prev, grads, dh0, dc0, dx);

  const Vec grads_num = finite_diff_grad(
      [&](const Vec& flat) { return unrolled_sum_h(flat, p, xs, h0, c0); },
      testutil::lstm_flatten(p), 1e-5);
  const Vec grads_ana = testutil::lstm_flatten(grads);
  for (std::size_t k = 0; k < grads_num.size(); ++k)
    CHECK(close(grads_ana[k], grads_num[k], 1e-8, 1e-5));

  const Vec dh0_num = finite_diff_grad(
      [&](const Vec& h_init) {
        return unrolled_sum_h(testutil::lstm_flatten(p), p, xs, h_init, c0);
      },
      h0, 1e-5);
  const Vec dc0_num = finite_diff_grad(
      [&](const Vec& c_init) {
        return unrolled_sum_h(testutil::lstm_flatten(p), p, xs, h0, c_init);
      },
      c0, 1e-5);
  for (std::size_t k = 0; k < 4; ++k) {
    CHECK(close(dh0[k], dh0_num[k], 1e-8, 1e-5));
    CHECK(close(dc0[k], dc0_num[k], 1e-8, 1e-5));
  }
}

TEST_CASE("BPTT gradients over short random sequences (property)") {
  Rng rng(77);
  for (int rep = 0; rep < 10; ++rep) {
    const std::size_t hidden = 2 + rng.below(3);  // <= 4
    const std::size_t input = 1 + rng.below(3);
    const std::size_t steps = 1 + rng.below(5);  // <= 5
    LstmParams p = testutil::random_lstm(hidden, input, rng);
    std::vector<Vec> xs(steps, Vec(input));
    for (auto& x : xs) testutil::randomize(x, rng, -1.0, 1.0);
    Vec h0(hidden), c0(hidden);
    testutil::randomize(h0, rng);
    testutil::randomize(c0, rng);

    std::vector<StepCache> caches(steps);
    Vec h = h0, c = c0;
    std::vector<Vec> hs(steps);
    for (std::size_t t = 0; t < steps; ++t) {
      lstm_step(p, xs[t], h, c, hs[t], c, caches[t]);
      h = hs[t];
    }
    LstmParams grads = make_lstm_params(hidden, input);
    Vec dh(hidden, 1.0), dc(hidden, 0.0), dh_prev, dc_prev, dx;
    for (std::size_t t = steps; t-- > 0;) {
      lstm_step_backward(p, caches[t], dh, dc, grads, dh_prev, dc_prev, dx);
      dh = dh_prev;
      dc = dc_prev;
    }

    const Vec numeric = finite_diff_grad(
        [&](const Vec& flat) { return unrolled_sum_h(flat, p, xs, h0, c0); },
        testutil::lstm_flatten(p), 1e-5);
    const Vec analytic = testutil::lstm_flatten(grads);
    for (std::size_t k = 0; k < numeric.size(); ++k)
      CHECK(close(analytic[k], numeric[k], 1e-7, 1e-4));
  }
}

TEST_CASE("cell growth bound and h range (property)") {
  Rng rng(91);
  for (int rep = 0; rep < 50; ++rep) {
    LstmParams p = testutil::random_lstm(4, 3, rng);
    Vec x(3), h_prev(4), c_prev(4);
    testutil::randomize(x, rng, -3.0, 3.0);
    testutil::randomize(h_prev, rng, -1.0, 1.0);
    testutil::randomize(c_prev, rng, -2.0, 2.0);
    Vec h, c;
    StepCache cache;
    lstm_step(p, x, h_prev, c_prev, h, c, cache);
    for (int k = 0; k < 4; ++k) {
      CHECK(std::abs(c[k]) <= std::abs(c_prev[k]) + 1.0);
      CHECK(h[k] > -1.0);
      CHECK(h[k] < 1.0);
    }
  }
}

TEST_CASE("lstm_step is deterministic") {
  Rng rng(13);
  LstmParams p = testutil::random_lstm(4, 3, rng);
  Vec x(3), h_prev(4), c_prev(4);
  testutil::randomize(x, rng);
  testutil::randomize(h_prev, rng);
  testutil::randomize(c_prev, rng);
  Vec h1, c1, h2, c2;
  StepCache cache;
  lstm_step(p, x, h_prev, c_prev, h1, c1, cache);
  lstm_step(p, x, h_prev, c_prev, h2, c2, cache);
  CHECK(h1 == h2);
  CHECK(c1 == c2);
}

TEST_CASE("learned initial state") {
  InitParams ip;
  ip.w = Mat(2, 3);
  ip.b = {0.0, 0.0};
  Vec h0, c0;
  init_state(ip, {0.5, -0.5, 2.0}, h0, c0);
  CHECK(h0 == Vec{0.0, 0.0});
  CHECK(c0 == Vec{0.0, 0.0});

  InitParams unit;
  unit.w = Mat(1, 1);
  unit.b = {1.0};
  init_state(unit, {0.0}, h0, c0);
  CHECK(c0[0] == 1.0);
  CHECK(std::abs(h0[0] - std::tanh(1.0)) <= 1e-12);

  Rng rng(17);
  for (int rep = 0; rep < 30; ++rep) {
    InitParams rp;
    rp.w = Mat(3, 4);
    testutil::randomize(rp.w.data, rng, -2.0, 2.0);
    rp.b.resize(3);
    testutil::randomize(rp.b, rng, -2.0, 2.0);
    Vec x(4);
    testutil::randomize(x, rng, -1.0, 1.0);
    init_state(rp, x, h0, c0);
    for (double v : h0) {
      CHECK(v > -1.0);
      CHECK(v < 1.0);
    }
  }
}

TEST_CASE("baseline rnn step") {
  RnnParams p;
  p.w = Mat(1, 2);
  p.w.data = {0.5, -1.0};
  p.b = {0.25};
  const Vec h = rnn_step(p, {0.4}, {0.2});
  CHECK(std::abs(h[0] - std::tanh(0.5 * 0.2 - 1.0 * 0.4 + 0.25)) <= 1e-15);
  CHECK_THROWS_AS(rnn_step(p, {0.4, 0.1}, {0.2}), std::invalid_argument);
}
