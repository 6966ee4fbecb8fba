// SPDX-License-Identifier: Apache-2.0

#include <doctest.h>

#include <bit>
#include <cmath>
#include <numeric>

#include "support/oracles.hpp"
#include "unlearn/error.hpp"
#include "unlearn/model.hpp"
#include "unlearn/pass_meter.hpp"

using namespace unlearn;

namespace {

ModelSpec spec_of(std::vector<std::size_t> dims, std::uint64_t seed = 1) {
  ModelSpec s;
  s.layer_dims = std::move(dims);
  s.seed = seed;
  return s;
}

Dataset xor_data() {
  Dataset d;
  d.features = Matrix(4, 2);
  d.features.values = {0, 0, 0, 1, 1, 0, 1, 1};
  d.labels = {0, 1, 1, 0};
  d.num_classes = 2;
  return d;
}

}  // namespace

TEST_CASE("layout and parameter count") {
  const ModelSpec s = spec_of({4, 8, 3});
  CHECK(s.param_count() == 67);
  const auto layout = make_layout(s);
  REQUIRE(layout.size() == 4);
  std::size_t expect = 0;
  for (const auto& seg : layout) {
    CHECK(seg.offset == expect);
    expect += seg.length;
  }
  CHECK(expect == 67);
  CHECK(layout[0].role == TensorRole::weight);
  CHECK(layout[0].length == 32);
  CHECK(layout[1].role == TensorRole::bias);
  CHECK(layout[3].layer == 1);
}

TEST_CASE("init is deterministic, bounded and has zero biases") {
  const ModelSpec s = spec_of({5, 7, 3}, 17);
  const Model a = init_model(s);
  const Model b = init_model(s);
  CHECK(a.params.values == b.params.values);
  CHECK(init_model(spec_of({5, 7, 3}, 18)).params.values != a.params.values);
  for (const auto& seg : a.params.layout) {
    const double fan_in = static_cast<double>(s.layer_dims[seg.layer]);
    for (double v : a.params.segment(seg)) {
      if (seg.role == TensorRole::bias) {
        CHECK(v == 0.0);
      } else {
        CHECK(std::abs(v) <= std::sqrt(6.0 / fan_in));
      }
    }
  }
  CHECK_THROWS_AS(init_model(spec_of({3})), ConfigError);
  CHECK_THROWS_AS(init_model(spec_of({3, 0, 2})), ConfigError);
}

TEST_CASE("forward zero and identity cases") {
  Model m = init_model(spec_of({3, 3}));
  Matrix x(2, 3);
  x.values = {1, -2, 3, 0.5, 0.25, -4};
  std::fill(m.params.values.begin(), m.params.values.end(), 0.0);
  for (double v : forward(m, x).values) CHECK(v == 0.0);
  for (std::size_t i = 0; i < 3; ++i) m.params.values[i * 3 + i] = 1.0;
  CHECK(forward(m, x) == x);
  Matrix wrong(1, 4);
  CHECK_THROWS_AS(forward(m, wrong), ShapeError);
}

TEST_CASE("forward matches the matmul oracle") {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const Model m = oracle::random_model({6, 9, 5, 4}, seed);
    const Dataset d = oracle::random_dataset(10, 6, 4, seed + 100);
    const Matrix z = forward(m, d.features);
    for (std::size_t r = 0; r < d.size(); ++r) {
      const auto ref = oracle::logits(m, d.features.row(r));
      for (std::size_t k = 0; k < 4; ++k) CHECK(z(r, k) == doctest::Approx(ref[k]).epsilon(1e-12));
    }
  }
}

TEST_CASE("uniform logits give ln K") {
  Model m = init_model(spec_of({3, 2}));
  std::fill(m.params.values.begin(), m.params.values.end(), 0.0);
  const Dataset d = oracle::random_dataset(8, 3, 2, 4);
  const LossGrad lg = loss_and_grad(m, d);
  CHECK(lg.mean_nll == doctest::Approx(std::log(2.0)).epsilon(1e-15));
  for (double v : per_sample_nll(m, d)) CHECK(v == doctest::Approx(std::log(2.0)));
}

TEST_CASE("gradient matches central finite differences") {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const Model m = oracle::random_model({4, 8, 6, 3}, seed);  // 85 params
    const Dataset d = oracle::random_dataset(6, 4, 3, 500 + seed);
    if (oracle::min_hidden_margin(m, d) < 1e-3) continue;
    const LossGrad lg = loss_and_grad(m, d);
    CHECK(lg.mean_nll == doctest::Approx(oracle::mean_nll(m, d)).epsilon(1e-12));
    const auto fd = oracle::fd_grad(m, d);
    for (std::size_t i = 0; i < fd.size(); ++i) {
      const double scale = std::max({std::abs(fd[i]), std::abs(lg.grad.values[i]), 1e-6});
      CHECK(std::abs(fd[i] - lg.grad.values[i]) / scale < 1e-4);
    }
  }
}

TEST_CASE("duplicating every sample leaves loss and gradient unchanged") {
  const Model m = oracle::random_model({3, 5, 2}, 3);
  const Dataset d = oracle::random_dataset(7, 3, 2, 8);
  const Dataset dd = concat(d, d, DataRole::derived);
  const LossGrad a = loss_and_grad(m, d);
  const LossGrad b = loss_and_grad(m, dd);
  CHECK(a.mean_nll == doctest::Approx(b.mean_nll).epsilon(1e-14));
  for (std::size_t i = 0; i < a.grad.size(); ++i) {
    CHECK(a.grad.values[i] == doctest::Approx(b.grad.values[i]).epsilon(1e-12).scale(1e-12));
  }
}

TEST_CASE("per-sample squared gradient equals a squared batch of one") {
  const Model m = oracle::random_model({4, 6, 3}, 11);
  const Dataset d = oracle::random_dataset(5, 4, 3, 12);
  for (std::size_t r = 0; r < d.size(); ++r) {
    const auto sq = per_sample_sq_grad(m, d.features.row(r), d.labels[r]);
    const std::size_t idx[] = {r};
    const auto g = loss_and_grad(m, d, idx).grad;
    for (std::size_t i = 0; i < sq.size(); ++i) {
      CHECK(sq.values[i] >= 0.0);
      CHECK(sq.values[i] == doctest::Approx(g.values[i] * g.values[i]).epsilon(1e-12).scale(1e-300));
    }
  }
}

TEST_CASE("dead ReLU units give zero squared gradient on their incoming weights") {
  Model m = oracle::random_model({2, 3, 2}, 2);
  // Unit 0 gets a large negative bias so it never fires.
  m.params.values[6] = -100.0;
  const Dataset d = oracle::random_dataset(1, 2, 2, 3);
  const auto sq = per_sample_sq_grad(m, d.features.row(0), d.labels[0]);
  CHECK(sq.values[0] == 0.0);
  CHECK(sq.values[1] == 0.0);
  CHECK(sq.values[6] == 0.0);
}

TEST_CASE("label out of range is rejected") {
  const Model m = oracle::random_model({2, 2}, 1);
  Dataset d = oracle::random_dataset(2, 2, 2, 1);
  d.labels[1] = 5;
  CHECK_THROWS(loss_and_grad(m, d));
}

TEST_CASE("accuracy") {
  Model m = init_model(spec_of({2, 2}));
  std::fill(m.params.values.begin(), m.params.values.end(), 0.0);
  Dataset d = oracle::random_dataset(10, 2, 2, 6);
  for (std::size_t i = 0; i < d.size(); ++i) d.labels[i] = i % 2;
  // Constant logits: ties go to class 0, half the rows are right.
  CHECK(accuracy(m, d) == 0.5);
  for (auto& y : d.labels) y = 0;
  CHECK(accuracy(m, d) == 1.0);
  CHECK_THROWS_AS(accuracy(m, Dataset{}), ConfigError);

  const Model r = oracle::random_model({3, 4, 3}, 21);
  const Dataset rd = oracle::random_dataset(40, 3, 3, 22);
  std::size_t hits = 0;
  for (std::size_t i = 0; i < rd.size(); ++i) {
    const auto z = oracle::logits(r, rd.features.row(i));
    hits += static_cast<std::size_t>(std::max_element(z.begin(), z.end()) - z.begin()) == rd.labels[i];
  }
  CHECK(accuracy(r, rd) == static_cast<double>(hits) / 40.0);
}

TEST_CASE("training on XOR reaches full accuracy") {
  TrainConfig cfg;
  cfg.epochs = 200;
  cfg.batch_size = 4;
  cfg.learning_rate = 0.05;
  cfg.shuffle_seed = 3;
  const Model m = train(init_model(spec_of({2, 16, 2}, 4)), xor_data(), cfg);
  CHECK(accuracy(m, xor_data()) == 1.0);
}

TEST_CASE("training is deterministic and lr = 0 is a no-op") {
  const Dataset d = oracle::random_dataset(50, 3, 3, 1);
  const Model m0 = init_model(spec_of({3, 8, 3}, 2));
  TrainConfig cfg;
  cfg.epochs = 5;
  cfg.batch_size = 8;
  cfg.shuffle_seed = 77;
  const Model a = train(m0, d, cfg);
  const Model b = train(m0, d, cfg);
  CHECK(a.params.values == b.params.values);
  CHECK(a.params.values != m0.params.values);
  cfg.shuffle_seed = 78;
  CHECK(train(m0, d, cfg).params.values != a.params.values);

  cfg.learning_rate = 0.0;
  const Model z = train(m0, d, cfg);
  for (std::size_t i = 0; i < z.params.size(); ++i) {
    CHECK(std::bit_cast<std::uint64_t>(z.params.values[i]) == std::bit_cast<std::uint64_t>(m0.params.values[i]));
  }
}

TEST_CASE("training records one pass per epoch and a falling loss") {
  Dataset d = oracle::random_dataset(40, 3, 2, 5);
  d.role = DataRole::retain;
  TrainConfig cfg;
  cfg.epochs = 30;
  cfg.learning_rate = 1e-2;
  PassMeter meter;
  TrainTrace trace;
  train(init_model(spec_of({3, 8, 2})), d, cfg, &meter, &trace);
  CHECK(meter.counts() == PassCounts{0, 0, 30});
  REQUIRE(trace.epoch_mean_loss.size() == 30);
  CHECK(trace.epoch_mean_loss.back() < trace.epoch_mean_loss.front());
}

TEST_CASE("train config validation") {
  TrainConfig cfg;
  CHECK_NOTHROW(cfg.validate());
  cfg.epochs = 0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.adam_beta1 = 1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  cfg = {};
  cfg.learning_rate = -1.0;
  CHECK_THROWS_AS(cfg.validate(), ConfigError);
  CHECK_THROWS_AS(train(init_model(spec_of({2, 2})), Dataset{}, TrainConfig{}), ConfigError);
}
