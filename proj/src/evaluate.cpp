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

#include "pourgen/evaluate.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <stdexcept>

#include "json.hpp"
#include "pourgen/generate.hpp"
#include "pourgen/optimizer.hpp"
#include "pourgen/rng.hpp"
#include "pourgen/textio.hpp"

namespace pourgen {

double dtw_distance(const Vec& a, const Vec& b) {
  if (a.empty() || b.empty())
    throw std::invalid_argument("dtw_distance: empty sequence");
  const std::size_t n = a.size(), m = b.size();
  Vec prev(m), cur(m);

  prev[0] = std::abs(a[0] - b[0]);
  for (std::size_t j = 1; j < m; ++j)
    prev[j] = prev[j - 1] + std::abs(a[0] - b[j]);
  for (std::size_t i = 1; i < n; ++i) {
    cur[0] = prev[0] + std::abs(a[i] - b[0]);
    for (std::size_t j = 1; j < m; ++j) {
      const double best = std::min({prev[j], prev[j - 1], cur[j - 1]});
      cur[j] = best + std::abs(a[i] - b[j]);
    }
    std::swap(prev, cur);
  }
  return prev[m - 1] / static_cast<double>(n + m);
}

std::vector<double> pairwise_distances(const std::vector<Vec>& tests) {
  if (tests.size() < 2)
    throw std::invalid_argument(
        "pairwise_distances: need at least two sequences");
  std::vector<double> d;
  d.reserve(tests.size() * (tests.size() - 1));
  for (std::size_t i = 0; i < tests.size(); ++i)
    for (std::size_t j = 0; j < tests.size(); ++j)
      if (i != j) d.push_back(dtw_distance(tests[i], tests[j]));
  return d;
}

std::vector<double> cross_distances(const std::vector<Vec>& generated,
                                    const std::vector<Vec>& tests) {
  if (generated.empty() || tests.empty())
    throw std::invalid_argument("cross_distances: empty sequence set");
  std::vector<double> d;
  d.reserve(generated.size() * tests.size());
  for (const Vec& g : generated)
    for (const Vec& t : tests) d.push_back(dtw_distance(g, t));
  return d;
}

HistogramPair make_histogram_pair(const std::vector<double>& d1,
                                  const std::vector<double>& d2,
                                  std::size_t bins) {
  if (d1.empty() || d2.empty())
    throw std::invalid_argument("make_histogram_pair: empty distance set");
  if (bins == 0)
    throw std::invalid_argument("make_histogram_pair: zero bins");

  double hi = 0.0;
  for (double v : d1) hi = std::max(hi, v);
  for (double v : d2) hi = std::max(hi, v);
  if (hi <= 0.0) hi = 1.0;  // all distances zero; everything lands in bin 0

  HistogramPair pair;
  pair.edges.resize(bins + 1);
  for (std::size_t k = 0; k <= bins; ++k)
    pair.edges[k] = hi * static_cast<double>(k) / static_cast<double>(bins);
  pair.h1.assign(bins, 0.0);
  pair.h2.assign(bins, 0.0);
  pair.n1 = d1.size();
  pair.n2 = d2.size();

  const auto bin_of = [&](double v) {
    const std::size_t k =
        static_cast<std::size_t>(v / hi * static_cast<double>(bins));
    return std::min(k, bins - 1);  // the top edge is inclusive
  };
  for (double v : d1) pair.h1[bin_of(v)] += 1.0;
  for (double v : d2) pair.h2[bin_of(v)] += 1.0;
  for (double& v : pair.h1) v /= static_cast<double>(pair.n1);
  for (double& v : pair.h2) v /= static_cast<double>(pair.n2);
  return pair;
}

double similarity(const HistogramPair& pair) {
  if (pair.h1.size() != pair.h2.size())
    throw std::invalid_argument("similarity: histogram binning mismatch");
  double score = 0.0;
  for (std::size_t k = 0; k < pair.h1.size(); ++k)
    score += std::min(pair.h1[k], pair.h2[k]);
  return score;
}

CaseReport run_case(const Corpus& corpus, int case_id, const EvalConfig& cfg) {
  const Split split = holdout_split(corpus, case_id, cfg.unseen);
  const std::size_t t_max = corpus.t_max();

  const auto train_one = [&](NetKind kind, std::size_t epochs,
                             std::uint64_t salt) {
    TrainConfig tc;
    tc.learning_rate = cfg.learning_rate;
    tc.epochs = epochs;
    tc.hidden_size = cfg.hidden_size;
    tc.seed = Rng::mix(cfg.seed ^ salt);
    tc.threads = cfg.threads;
    tc.log_every = cfg.log_every;
    const SequenceBatch batch = make_batch(corpus, split.train, kind);
    return train(kind, batch, tc);
  };

  const std::uint64_t base = static_cast<std::uint64_t>(case_id) * 0x100;
  const TrainResult frc = train_one(NetKind::Frc, cfg.epochs_frc, base + 1);
  const TrainResult vel = train_one(NetKind::Vel, cfg.epochs_vel, base + 2);
  const TrainResult stp = train_one(NetKind::Stp, cfg.epochs_stp, base + 3);

  std::vector<Vec> test_thetas, generated_thetas;
  test_thetas.reserve(split.test.size());
  generated_thetas.reserve(split.test.size());
  for (std::size_t idx : split.test) {
    const TrialRecord& trial = corpus.trials[idx];
    test_thetas.push_back(trial.theta);
    const GeneratedTrajectory traj = generate_simulated(
        frc.net, vel.net, stp.net, trial.theta.front(), trial.ctx, t_max);
    generated_thetas.push_back(traj.theta);
  }

  const std::vector<double> d1 = pairwise_distances(test_thetas);
  const std::vector<double> d2 = cross_distances(generated_thetas, test_thetas);

  CaseReport report;
  report.case_id = case_id;
  report.unseen = unseen_elements(case_id, cfg.unseen);
  report.train_size = split.train.size();
  report.test_size = split.test.size();
  report.hist = make_histogram_pair(d1, d2, cfg.bins);
  report.score = similarity(report.hist);
  report.threshold = cfg.pass_threshold;
  report.pass = report.score >= cfg.pass_threshold;
  report.loss_vel = vel.net.final_loss;
  report.loss_stp = stp.net.final_loss;
  report.loss_frc = frc.net.final_loss;
  report.stp_accuracy = stp.net.final_accuracy;
  report.t_max = t_max;
  report.seed = cfg.seed;
  return report;
}

namespace {

void write_histogram_csv(const HistogramPair& pair, const Vec& mass,
                         const std::string& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot write histogram " + path);
  out << "bin_left,bin_right,density\n";
  for (std::size_t k = 0; k < mass.size(); ++k)
    out << fmt_g17(pair.edges[k]) << ',' << fmt_g17(pair.edges[k + 1]) << ','
        << fmt_g17(mass[k]) << "\n";
}

}  // namespace

void write_case_report(const CaseReport& report, const std::string& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir);
  const std::string stem =
      (fs::path(out_dir) / ("case" + std::to_string(report.case_id))).string();

  nlohmann::json j;
  j["case"] = report.case_id;
  j["unseen"] = report.unseen;
  j["train_trials"] = report.train_size;
  j["test_trials"] = report.test_size;
  j["similarity"] = report.score;
  j["threshold"] = report.threshold;
  j["pass"] = report.pass;
  j["bins"] = report.hist.h1.size();
  j["bin_edges"] = report.hist.edges;
  j["h1"] = report.hist.h1;
  j["h2"] = report.hist.h2;
  j["h1_samples"] = report.hist.n1;
  j["h2_samples"] = report.hist.n2;
  j["final_loss"] = {{"vel", report.loss_vel},
                     {"stp", report.loss_stp},
                     {"frc", report.loss_frc}};
  j["stp_accuracy"] = report.stp_accuracy;
  j["t_max"] = report.t_max;
  j["seed"] = report.seed;
  std::ofstream out(stem + "_report.json");
  if (!out)
    throw std::runtime_error("cannot write report " + stem + "_report.json");
  out << j.dump(2) << "\n";

  write_histogram_csv(report.hist, report.hist.h1, stem + "_h1.csv");
  write_histogram_csv(report.hist, report.hist.h2, stem + "_h2.csv");

  std::string title = "case " + std::to_string(report.case_id) + ": unseen";
  for (const auto& u : report.unseen) title += " " + u;
  std::ofstream svg(stem + "_hist.svg");
  if (!svg)
    throw std::runtime_error("cannot write plot " + stem + "_hist.svg");
  svg << render_histogram_svg(report.hist, title, report.score);
}

namespace {

std::string fmt6(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.6g", v);
  return buf;
}

}  // namespace

std::string render_histogram_svg(const HistogramPair& pair,
                                 const std::string& title, double score) {
  const double width = 560.0, height = 360.0;
  const double left = 56.0, right = 16.0, top = 34.0, bottom = 44.0;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const std::size_t bins = pair.h1.size();

  double y_max = 0.0;
  for (std::size_t k = 0; k < bins; ++k)
    y_max = std::max({y_max, pair.h1[k], pair.h2[k]});
  if (y_max <= 0.0) y_max = 1.0;
  y_max *= 1.08;

  const double x_lo = pair.edges.front();
  const double x_hi = pair.edges.back();
  const auto x_of = [&](double v) {
    return left + (v - x_lo) / (x_hi - x_lo) * plot_w;
  };
  const auto y_of = [&](double v) { return top + plot_h * (1.0 - v / y_max); };

  std::string s;
  s += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt6(width) +
       "\" height=\"" + fmt6(height) + "\" viewBox=\"0 0 " + fmt6(width) +
       " " + fmt6(height) + "\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt6(left) + "\" y=\"20\" font-family=\"sans-serif\" "
       "font-size=\"13\">" + title + "</text>\n";

  const char* colors[2] = {"#4878a8", "#c44e52"};
  const Vec* hists[2] = {&pair.h1, &pair.h2};
  for (int h = 0; h < 2; ++h) {
    for (std::size_t k = 0; k < bins; ++k) {
      const double v = (*hists[h])[k];
      if (v <= 0.0) continue;
      const double x0 = x_of(pair.edges[k]);
      const double x1 = x_of(pair.edges[k + 1]);
      const double y = y_of(v);
      s += "<rect x=\"" + fmt6(x0) + "\" y=\"" + fmt6(y) + "\" width=\"" +
           fmt6(x1 - x0) + "\" height=\"" + fmt6(top + plot_h - y) +
           "\" fill=\"" + colors[h] + "\" fill-opacity=\"0.55\"/>\n";
    }
  }

  // axes
  s += "<line x1=\"" + fmt6(left) + "\" y1=\"" + fmt6(top + plot_h) +
       "\" x2=\"" + fmt6(left + plot_w) + "\" y2=\"" + fmt6(top + plot_h) +
       "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt6(left) + "\" y1=\"" + fmt6(top) + "\" x2=\"" +
       fmt6(left) + "\" y2=\"" + fmt6(top + plot_h) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double vx = x_lo + (x_hi - x_lo) * k / 4.0;
    const double px = x_of(vx);
    s += "<line x1=\"" + fmt6(px) + "\" y1=\"" + fmt6(top + plot_h) +
         "\" x2=\"" + fmt6(px) + "\" y2=\"" + fmt6(top + plot_h + 4) +
         "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt6(px) + "\" y=\"" + fmt6(top + plot_h + 18) +
         "\" font-family=\"sans-serif\" font-size=\"10\" "
         "text-anchor=\"middle\">" + fmt6(vx) + "</text>\n";
    const double vy = y_max * k / 4.0;
    const double py = y_of(vy);
    s += "<line x1=\"" + fmt6(left - 4) + "\" y1=\"" + fmt6(py) + "\" x2=\"" +
         fmt6(left) + "\" y2=\"" + fmt6(py) + "\" stroke=\"black\"/>\n";
    s += "<text x=\"" + fmt6(left - 7) + "\" y=\"" + fmt6(py + 3) +
         "\" font-family=\"sans-serif\" font-size=\"10\" "
         "text-anchor=\"end\">" + fmt6(vy) + "</text>\n";
  }
  s += "<text x=\"" + fmt6(left + plot_w / 2) + "\" y=\"" + fmt6(height - 8) +
       "\" font-family=\"sans-serif\" font-size=\"11\" "
       "text-anchor=\"middle\">normalized DTW distance</text>\n";

  // legend + score
  const double lx = left + plot_w - 170.0, ly = top + 10.0;
  s += "<rect x=\"" + fmt6(lx) + "\" y=\"" + fmt6(ly) +
       "\" width=\"12\" height=\"12\" fill=\"#4878a8\" "
       "fill-opacity=\"0.55\"/>\n";
  s += "<text x=\"" + fmt6(lx + 17) + "\" y=\"" + fmt6(ly + 10) +
       "\" font-family=\"sans-serif\" font-size=\"11\">h1 demo vs demo</text>\n";
  s += "<rect x=\"" + fmt6(lx) + "\" y=\"" + fmt6(ly + 18) +
       "\" width=\"12\" height=\"12\" fill=\"#c44e52\" "
       "fill-opacity=\"0.55\"/>\n";
  s += "<text x=\"" + fmt6(lx + 17) + "\" y=\"" + fmt6(ly + 28) +
       "\" font-family=\"sans-serif\" font-size=\"11\">h2 generated vs "
       "demo</text>\n";
  s += "<text x=\"" + fmt6(lx) + "\" y=\"" + fmt6(ly + 46) +
       "\" font-family=\"sans-serif\" font-size=\"11\">intersection " +
       fmt6(score) + "</text>\n";
  s += "</svg>\n";
  return s;
}

}  // namespace pourgen
