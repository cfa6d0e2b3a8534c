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
#include <filesystem>

#include "doctest.h"
#include "pourgen/network.hpp"
#include "pourgen/rng.hpp"
#include "test_util.hpp"

using namespace pourgen;
using testutil::close;

TEST_CASE("velocity targets") {
  CHECK(velocity_targets({0.0, 1.0, 3.0}) == Vec{1.0, 2.0});
  CHECK(velocity_targets({4.0, 4.0, 4.0, 4.0}) == Vec{0.0, 0.0, 0.0});
  CHECK(velocity_targets({10.0, 8.0}) == Vec{-2.0});
  CHECK_THROWS_AS(velocity_targets({1.0}), std::invalid_argument);
}

TEST_CASE("frc input drops the force component") {
  const Vec a10 = {1.0, 2.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0};
  CHECK(input_from_frame(NetKind::Vel, a10) == a10);
  CHECK(input_from_frame(NetKind::Stp, a10) == a10);
  CHECK(input_from_frame(NetKind::Frc, a10) ==
        Vec{1.0, 3.0, 4.0, 5.0, 6.0, 7.0, 8.0, 9.0, 10.0});
  CHECK_THROWS_AS(input_from_frame(NetKind::Vel, {1.0, 2.0}),
                  std::invalid_argument);
}

TEST_CASE("batch construction: masks, labels, padding") {
  Corpus corpus;
  corpus.trials.push_back(testutil::tiny_trial(3, 1.0, 1));
  corpus.trials.push_back(testutil::tiny_trial(5, 1.0, 2));

  const SequenceBatch vel = make_batch(corpus, NetKind::Vel);
  CHECK(vel.t_max == 5);
  CHECK(vel.lengths == std::vector<std::size_t>{3, 5});
  CHECK(vel.steps_for_trial(0) == 2);
  // zero padding on features and targets
  CHECK(vel.features[0][4] == Vec(10, 0.0));
  CHECK(vel.targets[0][3] == 0.0);
  // mask covers t < T_i - 1
  CHECK(vel.mask[0] == std::vector<char>{1, 1, 0, 0, 0});
  CHECK(vel.mask[1] == std::vector<char>{1, 1, 1, 1, 0});

  const SequenceBatch frc = make_batch(corpus, NetKind::Frc);
  CHECK(frc.steps_for_trial(0) == 3);
  CHECK(frc.mask[0] == std::vector<char>{1, 1, 1, 0, 0});
  CHECK(frc.features[0][0].size() == 9);

  const SequenceBatch stp = make_batch(corpus, NetKind::Stp);
  CHECK(stp.steps_for_trial(0) == 5);
  // end-value padding repeats the final frame
  CHECK(stp.features[0][3] == stp.features[0][2]);
  CHECK(stp.features[0][4] == stp.features[0][2]);
  // stop labels: final real frame and all padding
  CHECK(stp.labels[0] == std::vector<int>{0, 0, 1, 1, 1});
  CHECK(stp.labels[1] == std::vector<int>{0, 0, 0, 0, 1});

  CHECK_THROWS_AS(make_batch(corpus, {}, NetKind::Vel), std::invalid_argument);
}

TEST_CASE("scaler statistics ignore padding and guard constants") {
  Corpus corpus;
  corpus.trials.push_back(testutil::tiny_trial(3, 1.0, 1));
  corpus.trials.push_back(testutil::tiny_trial(6, 1.5, 2));
  const SequenceBatch batch = make_batch(corpus, NetKind::Vel);
  const FeatureScaler scaler = fit_scaler(batch);
  REQUIRE(scaler.mean.size() == 10);
  for (double sd : scaler.stddev) CHECK(sd > 0.0);
  // identical static context in every trial: z features are constant,
  // stddev falls back to 1
  CHECK(scaler.stddev[9] == 1.0);
  CHECK(scaler.target_stddev > 0.0);
}

TEST_CASE("zero-parameter forwards") {
  Corpus corpus;
  corpus.trials.push_back(testutil::tiny_trial(4, 1.0, 3));
  const TrialRecord& tr = corpus.trials[0];

  NetworkBundle vel = make_bundle(NetKind::Vel, 4);
  vel.params.head_b = {0.37};
  std::vector<Vec> frames;
  for (std::size_t t = 0; t < tr.length(); ++t)
    frames.push_back(assemble_features(tr, t));
  for (const Vec& out : forward_sequence(vel, frames))
    CHECK(out[0] == 0.37);  // constant head bias, identity target scaling

  NetworkBundle stp = make_bundle(NetKind::Stp, 4);
  for (const Vec& s : forward_sequence(stp, frames)) {
    CHECK(s[0] == doctest::Approx(0.5).epsilon(1e-14));
    CHECK(s[1] == doctest::Approx(0.5).epsilon(1e-14));
  }

  stp.params.head_b = {0.0, 20.0};
  for (const Vec& s : forward_sequence(stp, frames)) {
    CHECK(s[0] <= 1e-8);
    CHECK(s[1] >= 1.0 - 1e-8);
  }
}

TEST_CASE("sequence mode equals the hand-unrolled composition") {
  Rng rng(101);
  for (NetKind kind : {NetKind::Vel, NetKind::Frc, NetKind::Stp}) {
    NetworkBundle net = make_bundle(kind, 3);
    for_each_tensor(net.params, [&](const char*, Vec& v) {
      testutil::randomize(v, rng, -0.5, 0.5);
    });
    net.scaler.target_mean = 0.2;
    net.scaler.target_stddev = 1.7;

    const std::size_t T = 3;
    std::vector<Vec> frames;
    for (std::size_t t = 0; t < T; ++t) {
      Vec f(input_size_for(kind));
      testutil::randomize(f, rng, -1.0, 1.0);
      frames.push_back(f);
    }

    // hand composition: init from frame 1, then step + head per frame
    Vec h, c;
    init_state(net.params.init, frames[0], h, c);
    std::vector<Vec> expected;
    StepCache cache;
    for (std::size_t t = 0; t < T; ++t) {
      lstm_step(net.params.lstm, frames[t], h, c, h, c, cache);
      Vec out = affine(net.params.head_w, net.params.head_b, h);
      if (kind == NetKind::Stp)
        out = softmax(out);
      else
        out = {net.scaler.unscale_target(out[0])};
      expected.push_back(out);
    }

    const std::vector<Vec> got = forward_sequence(net, frames);
    REQUIRE(got.size() == T);
    for (std::size_t t = 0; t < T; ++t) CHECK(got[t] == expected[t]);

    // one-step streaming equals sequence mode
    NetRunner runner(net);
    runner.start(frames[0]);
    for (std::size_t t = 0; t < T; ++t) CHECK(runner.step(frames[t]) == got[t]);
  }
}

TEST_CASE("kind-checked steps reject the wrong runner") {
  NetworkBundle vel = make_bundle(NetKind::Vel, 2);
  NetRunner runner(vel);
  StaticContext z{0.6, 0.2, 0.3, 70, 100, 120, 90, 1.0};
  runner.start(input_from_frame(NetKind::Vel, assemble_features(
                                                  testutil::tiny_trial(3, 1, 1), 0)));
  CHECK_THROWS_AS(frc_step(runner, 0.0, z), std::invalid_argument);
  CHECK_THROWS_AS(stp_step(runner, 0.0, 0.5, z), std::invalid_argument);
  CHECK_NOTHROW(vel_step(runner, 0.0, 0.5, z));
}

TEST_CASE("loss formulas on hand values") {
  // two trials with residuals {1, 2} and {3}: ((1+4)/2 + 9/1)/2 = 5.75
  SequenceBatch batch;
  batch.kind = NetKind::Vel;
  batch.t_max = 2;
  batch.lengths = {3, 2};
  batch.targets = {{1.0, 2.0}, {3.0, 0.0}};
  batch.mask = {{1, 1}, {1, 0}};
  batch.features = {{Vec(10, 0.0), Vec(10, 0.0)}, {Vec(10, 0.0), Vec(10, 0.0)}};
  const std::vector<std::vector<Vec>> zero_preds = {{{0.0}, {0.0}},
                                                    {{0.0}, {0.0}}};
  CHECK(sequence_loss(batch, zero_preds) == doctest::Approx(5.75).epsilon(1e-12));

  const std::vector<std::vector<Vec>> exact = {{{1.0}, {2.0}}, {{3.0}, {0.0}}};
  CHECK(sequence_loss(batch, exact) == 0.0);

  SequenceBatch stp;
  stp.kind = NetKind::Stp;
  stp.t_max = 2;
  stp.lengths = {2};
  stp.labels = {{0, 1}};
  stp.mask = {{1, 1}};
  stp.features = {{Vec(10, 0.0), Vec(10, 0.0)}};
  const std::vector<std::vector<Vec>> onehot = {{{1.0, 0.0}, {0.0, 1.0}}};
  CHECK(sequence_loss(stp, onehot) <= 1e-10);
  CHECK(sequence_loss(stp, onehot) >= 0.0);
  const std::vector<std::vector<Vec>> half = {{{0.5, 0.5}, {0.5, 0.5}}};
  CHECK(sequence_loss(stp, half) ==
        doctest::Approx(2.0 * std::log(2.0)).epsilon(1e-12));
}

TEST_CASE("appending zero padding never changes masked losses") {
  Corpus corpus;
  corpus.trials.push_back(testutil::tiny_trial(4, 1.0, 7));
  corpus.trials.push_back(testutil::tiny_trial(6, 1.2, 8));
  for (NetKind kind : {NetKind::Vel, NetKind::Frc}) {
    SequenceBatch batch = make_batch(corpus, kind);
    NetworkBundle net = testutil::random_bundle(kind, 3, batch, 5);
    const double before = batch_loss(net, batch);

    // grow the padded region by three zero frames
    batch.t_max += 3;
    for (std::size_t i = 0; i < batch.size(); ++i) {
      batch.features[i].resize(batch.t_max, Vec(input_size_for(kind), 0.0));
      batch.targets[i].resize(batch.t_max, 0.0);
      batch.mask[i].resize(batch.t_max, 0);
    }
    CHECK(std::abs(batch_loss(net, batch) - before) <= 1e-12);
  }
}

TEST_CASE("gradients of every parameter match finite differences") {
  Corpus corpus;
  corpus.trials.push_back(testutil::tiny_trial(4, 1.0, 21));
  corpus.trials.push_back(testutil::tiny_trial(3, 0.8, 22));
  for (NetKind kind : {NetKind::Vel, NetKind::Frc, NetKind::Stp}) {
    const SequenceBatch batch = make_batch(corpus, kind);
    const NetworkBundle net = testutil::random_bundle(kind, 4, batch, 31);
    const auto result =
        testutil::check_bundle_gradients(net, batch, 1e-5, 1e-7, 1e-4);
    CHECK(result.checked > 0);
    CHECK(result.failures == 0);
  }
}

TEST_CASE("checkpoints round-trip exactly") {
  namespace fs = std::filesystem;
  Corpus corpus;
  corpus.trials.push_back(testutil::tiny_trial(4, 1.0, 13));
  corpus.trials.push_back(testutil::tiny_trial(5, 1.3, 14));
  const SequenceBatch batch = make_batch(corpus, NetKind::Stp);
  NetworkBundle net = testutil::random_bundle(NetKind::Stp, 4, batch, 17);
  net.epochs_trained = 123;
  net.final_loss = 0.456;
  net.final_accuracy = 0.91;

  const std::string path =
      (fs::temp_directory_path() / "pourgen_ckpt_test.json").string();
  save_checkpoint(net, path);
  const NetworkBundle loaded = load_checkpoint(path);

  CHECK(loaded.kind == net.kind);
  CHECK(flatten(loaded.params) == flatten(net.params));
  CHECK(loaded.scaler.mean == net.scaler.mean);
  CHECK(loaded.scaler.stddev == net.scaler.stddev);
  CHECK(loaded.scaler.target_mean == net.scaler.target_mean);
  CHECK(loaded.scaler.target_stddev == net.scaler.target_stddev);
  CHECK(loaded.epochs_trained == 123);
  CHECK(loaded.final_loss == 0.456);
  CHECK(loaded.final_accuracy == 0.91);
  fs::remove(path);

  CHECK_THROWS_AS(load_checkpoint("/nonexistent/ckpt.json"),
                  std::runtime_error);
}

TEST_CASE("kind names") {
  CHECK(kind_from_string("vel") == NetKind::Vel);
  CHECK(kind_from_string("stp") == NetKind::Stp);
  CHECK(kind_from_string("frc") == NetKind::Frc);
  CHECK_THROWS_AS(kind_from_string("velocity"), std::invalid_argument);
  CHECK(std::string(to_string(NetKind::Frc)) == "frc");
}
