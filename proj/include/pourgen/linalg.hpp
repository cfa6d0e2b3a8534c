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

#include <cstddef>
#include <functional>
#include <vector>

namespace pourgen {

using Vec = std::vector<double>;

/// Dense row-major matrix with explicit dimensions.
struct Mat {
  std::size_t rows = 0;
  std::size_t cols = 0;
  Vec data;  // rows * cols entries, row-major

  Mat() = default;
  Mat(std::size_t r, std::size_t c, double fill = 0.0)
      : rows(r), cols(c), data(r * c, fill) {}

  double& at(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double at(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
  const double* row(std::size_t r) const { return data.data() + r * cols; }
  double* row(std::size_t r) { return data.data() + r * cols; }
};

enum class Activation { Sigmoid, Tanh, Softmax };

/// w * x + b. Throws std::invalid_argument on dimension mismatch.
Vec affine(const Mat& w, const Vec& b, const Vec& x);

/// out = w * x + b without allocating; out is resized to w.rows.
void affine_into(const Mat& w, const Vec& b, const Vec& x, Vec& out);

double sigmoid(double x);

Vec sigmoid_vec(const Vec& x);
Vec tanh_vec(const Vec& x);

/// Probability vector; logits are shifted by their maximum before
/// exponentiation so large values cannot overflow.
Vec softmax(const Vec& x);

/// Element-wise sigmoid/tanh or softmax. Rejects empty or non-finite input.
Vec activate(Activation kind, const Vec& x);

/// Central-difference gradient: component i is
/// (f(x + eps*e_i) - f(x - eps*e_i)) / (2*eps).
/// Rejects eps <= 0 and non-finite function values.
Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double eps);

}  // namespace pourgen
