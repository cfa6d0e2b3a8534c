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
#include <limits>

#include "doctest.h"
#include "pourgen/linalg.hpp"
#include "pourgen/rng.hpp"
#include "test_util.hpp"

using namespace pourgen;

TEST_CASE("affine basics") {
  Mat eye(2, 2);
  eye.at(0, 0) = 1.0;
  eye.at(1, 1) = 1.0;
  CHECK(affine(eye, {0.0, 0.0}, {3.0, -1.0}) == Vec{3.0, -1.0});

  Mat w(2, 2);
  w.data = {1.0, 2.0, 3.0, 4.0};
  CHECK(affine(w, {1.0, 1.0}, {1.0, 1.0}) == Vec{4.0, 8.0});

  Mat zeros(1, 3);
  CHECK(affine(zeros, {5.0}, {9.0, 9.0, 9.0}) == Vec{5.0});

  CHECK_THROWS_AS(affine(w, {1.0, 1.0}, {1.0, 1.0, 1.0}),
                  std::invalid_argument);
  CHECK_THROWS_AS(affine(w, {1.0}, {1.0, 1.0}), std::invalid_argument);
}

TEST_CASE("affine is linear") {
  Rng rng(42);
  for (int rep = 0; rep < 50; ++rep) {
    Mat w(3, 4);
    testutil::randomize(w.data, rng, -2.0, 2.0);
    Vec b(3), x(4), y(4);
    testutil::randomize(b, rng, -2.0, 2.0);
    testutil::randomize(x, rng, -2.0, 2.0);
    testutil::randomize(y, rng, -2.0, 2.0);
    const double alpha = rng.uniform(-3.0, 3.0);
    const double beta = rng.uniform(-3.0, 3.0);

    Vec mix(4);
    for (int k = 0; k < 4; ++k) mix[k] = alpha * x[k] + beta * y[k];
    const Vec lhs = affine(w, b, mix);
    const Vec fx = affine(w, Vec(3, 0.0), x);
    const Vec fy = affine(w, Vec(3, 0.0), y);
    for (int k = 0; k < 3; ++k)
      CHECK(std::abs(lhs[k] - (alpha * fx[k] + beta * fy[k] + b[k])) <= 1e-10);
  }
}

TEST_CASE("activations at the anchors") {
  CHECK(activate(Activation::Sigmoid, {0.0}) == Vec{0.5});
  CHECK(activate(Activation::Tanh, {0.0}) == Vec{0.0});
  const Vec s = activate(Activation::Softmax, {0.0, 0.0});
  CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-14));
  CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-14));

  CHECK_THROWS_AS(activate(Activation::Sigmoid, {}), std::invalid_argument);
  CHECK_THROWS_AS(
      activate(Activation::Tanh, {std::numeric_limits<double>::infinity()}),
      std::invalid_argument);
  CHECK_THROWS_AS(
      activate(Activation::Softmax,
               {std::numeric_limits<double>::quiet_NaN(), 0.0}),
      std::invalid_argument);
}

TEST_CASE("softmax properties") {
  Rng rng(7);
  for (int rep = 0; rep < 200; ++rep) {
    const std::size_t n = 1 + rng.below(6);
    Vec x(n);
    // logits large enough to overflow a naive exp, but with spans small
    // enough that exp(min - max) stays above the double underflow floor
    testutil::randomize(x, rng, -350.0, 350.0);
    const Vec p = softmax(x);
    double total = 0.0;
    for (double v : p) {
      CHECK(v > 0.0);
      CHECK(v < 1.0 + 1e-12);
      total += v;
    }
    CHECK(std::abs(total - 1.0) <= 1e-12);

    const double shift = rng.uniform(-50.0, 50.0);
    Vec xs = x;
    for (double& v : xs) v += shift;
    const Vec ps = softmax(xs);
    for (std::size_t k = 0; k < n; ++k)
      CHECK(std::abs(p[k] - ps[k]) <= 1e-12);
  }
}

TEST_CASE("sigmoid symmetry") {
  Rng rng(9);
  for (int rep = 0; rep < 200; ++rep) {
    const double x = rng.uniform(-40.0, 40.0);
    CHECK(std::abs(sigmoid(x) + sigmoid(-x) - 1.0) <= 1e-12);
  }
}

TEST_CASE("finite differences recover known gradients") {
  const auto square = [](const Vec& x) { return x[0] * x[0]; };
  const Vec g1 = finite_diff_grad(square, {3.0}, 1e-5);
  CHECK(std::abs(g1[0] - 6.0) <= 1e-6);

  const auto constant = [](const Vec&) { return 4.25; };
  for (double g : finite_diff_grad(constant, {1.0, -2.0, 0.5}, 1e-5))
    CHECK(g == 0.0);

  const auto product = [](const Vec& x) { return x[0] * x[1]; };
  const Vec g2 = finite_diff_grad(product, {2.0, 5.0}, 1e-5);
  CHECK(std::abs(g2[0] - 5.0) <= 1e-6);
  CHECK(std::abs(g2[1] - 2.0) <= 1e-6);

  CHECK_THROWS_AS(finite_diff_grad(square, {1.0}, 0.0), std::invalid_argument);
  const auto bad = [](const Vec&) {
    return std::numeric_limits<double>::quiet_NaN();
  };
  CHECK_THROWS_AS(finite_diff_grad(bad, {1.0}, 1e-5), std::runtime_error);
}
