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

#include "pourgen/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pourgen {

void affine_into(const Mat& w, const Vec& b, const Vec& x, Vec& out) {
  if (w.cols != x.size() || w.rows != b.size()) {
    std::ostringstream ss;
    ss << "affine: dimension mismatch: w is " << w.rows << "x" << w.cols
       << ", b has length " << b.size() << ", x has length " << x.size();
    throw std::invalid_argument(ss.str());
  }
  out.resize(w.rows);
  const std::size_t n = w.cols;
  for (std::size_t r = 0; r < w.rows; ++r) {
    const double* wr = w.row(r);
    double acc = b[r];
    for (std::size_t c = 0; c < n; ++c) acc += wr[c] * x[c];
    out[r] = acc;
  }
}

Vec affine(const Mat& w, const Vec& b, const Vec& x) {
  Vec out;
  affine_into(w, b, x, out);
  return out;
}

double sigmoid(double x) { return 1.0 / (1.0 + std::exp(-x)); }

Vec sigmoid_vec(const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = sigmoid(x[i]);
  return y;
}

Vec tanh_vec(const Vec& x) {
  Vec y(x.size());
  for (std::size_t i = 0; i < x.size(); ++i) y[i] = std::tanh(x[i]);
  return y;
}

Vec softmax(const Vec& x) {
  const double hi = *std::max_element(x.begin(), x.end());
  Vec y(x.size());
  double total = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    y[i] = std::exp(x[i] - hi);
    total += y[i];
  }
  for (double& v : y) v /= total;
  return y;
}

Vec activate(Activation kind, const Vec& x) {
  if (x.empty()) throw std::invalid_argument("activate: empty input");
  for (double v : x) {
    if (!std::isfinite(v))
      throw std::invalid_argument("activate: non-finite input value");
  }
  switch (kind) {
    case Activation::Sigmoid:
      return sigmoid_vec(x);
    case Activation::Tanh:
      return tanh_vec(x);
    case Activation::Softmax:
      return softmax(x);
  }
  throw std::invalid_argument("activate: unknown activation kind");
}

Vec finite_diff_grad(const std::function<double(const Vec&)>& f, const Vec& x,
                     double eps) {
  if (!(eps > 0.0))
    throw std::invalid_argument("finite_diff_grad: eps must be positive");
  Vec grad(x.size());
  Vec probe = x;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double saved = probe[i];
    probe[i] = saved + eps;
    const double hi = f(probe);
    probe[i] = saved - eps;
    const double lo = f(probe);
    probe[i] = saved;
    if (!std::isfinite(hi) || !std::isfinite(lo))
      throw std::runtime_error("finite_diff_grad: non-finite function value");
    grad[i] = (hi - lo) / (2.0 * eps);
  }
  return grad;
}

}  // namespace pourgen
