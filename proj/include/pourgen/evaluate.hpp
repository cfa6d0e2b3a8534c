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

#include "pourgen/dataset.hpp"
#include "pourgen/network.hpp"

namespace pourgen {

/// Normalized dynamic time warping: symmetric match/insert/delete steps,
/// local cost |a_i - b_j|, total path cost divided by (len(a) + len(b)).
double dtw_distance(const Vec& a, const Vec& b);

/// All ordered pairs i != j among the test sequences (m(m-1) values).
std::vector<double> pairwise_distances(const std::vector<Vec>& tests);

/// All generated x test cross distances (|gen| * |tests| values).
std::vector<double> cross_distances(const std::vector<Vec>& generated,
                                    const std::vector<Vec>& tests);

/// h1/h2 over shared equal-width bins spanning [0, max distance in either
/// set]; each histogram's masses sum to 1.
struct HistogramPair {
  Vec edges;  // bins + 1
  Vec h1, h2;
  std::size_t n1 = 0, n2 = 0;  // sample counts
};

HistogramPair make_histogram_pair(const std::vector<double>& d1,
                                  const std::vector<double>& d2,
                                  std::size_t bins = 30);

/// Histogram intersection sum_k min(h1_k, h2_k), in [0, 1].
double similarity(const HistogramPair& pair);

struct EvalConfig {
  std::uint64_t seed = 1;
  std::size_t hidden_size = 16;
  double learning_rate = 0.01;
  std::size_t epochs_vel = 0;  // 0 = defaults (4000 / 2000 / 2000)
  std::size_t epochs_stp = 0;
  std::size_t epochs_frc = 0;
  double pass_threshold = 0.6;
  std::size_t bins = 30;
  UnseenIds unseen;
  std::size_t threads = 0;
  std::size_t log_every = 0;
};

struct CaseReport {
  int case_id = 0;
  std::vector<std::string> unseen;
  std::size_t train_size = 0;
  std::size_t test_size = 0;
  double score = 0.0;
  bool pass = false;
  double threshold = 0.6;
  HistogramPair hist;
  double loss_vel = 0.0, loss_stp = 0.0, loss_frc = 0.0;
  double stp_accuracy = 0.0;
  std::size_t t_max = 0;
  std::uint64_t seed = 0;
};

/// One generalization case: split, train the three networks on the train
/// side, roll out one simulated trajectory per test trial from its
/// (theta_1, z), and score h1 against h2.
CaseReport run_case(const Corpus& corpus, int case_id, const EvalConfig& cfg);

/// case<N>_report.json + case<N>_h1.csv / _h2.csv + case<N>_hist.svg.
void write_case_report(const CaseReport& report, const std::string& out_dir);

std::string render_histogram_svg(const HistogramPair& pair,
                                 const std::string& title, double score);

}  // namespace pourgen
