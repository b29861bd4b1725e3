// Copyright 2026 The NBDT Authors.
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
#include <random>

#include "doctest.h"
#include "nbdt/clustering.hpp"
#include "nbdt/error.hpp"
#include "nbdt/inference.hpp"
#include "nbdt/loss.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace nbdt;

namespace {

struct Instance {
  Hierarchy tree;
  Matrix w;
  Matrix x;
  std::vector<int> labels;
};

Instance random_instance(std::mt19937_64& rng) {
  std::uniform_int_distribution<std::size_t> kd(2, 8), dd(1, 8), nd(1, 5);
  const std::size_t k = kd(rng), d = dd(rng), n = nd(rng);
  Instance inst;
  inst.tree = rng() % 2 ? synth::random_binary_tree(k, rng) : synth::random_nary_tree(k, 3, rng);
  inst.w = synth::gaussian_matrix(k, d, rng);
  inst.x = synth::gaussian_matrix(n, d, rng);
  std::uniform_int_distribution<int> label(0, static_cast<int>(k) - 1);
  for (std::size_t i = 0; i < n; ++i) inst.labels.push_back(label(rng));
  return inst;
}

// -ln of the soft path product, recomputed from the enumeration oracle.
double reference_soft_loss(const Hierarchy& topo, const Matrix& w, const Matrix& x, const std::vector<int>& y) {
  const Hierarchy h = attach_weights(topo, w);
  double total = 0;
  for (std::size_t i = 0; i < x.rows(); ++i) {
    const std::vector<double> xi(x.row(i).begin(), x.row(i).end());
    total -= std::log(oracle::enumerate_path_products(h, xi)[static_cast<std::size_t>(y[i])]);
  }
  return total / static_cast<double>(x.rows());
}

}  // namespace

TEST_SUITE_BEGIN("schedule_weights");

TEST_CASE("endpoints and midpoint") {
  const LossConfig cfg = LossConfig::defaults(LossMode::soft, 100);
  CHECK(schedule_weights(0, cfg).omega == 0.0);
  CHECK(schedule_weights(0, cfg).beta == 1.0);
  CHECK(schedule_weights(100, cfg).omega == 0.5);
  CHECK(schedule_weights(100, cfg).beta == 0.0);
  CHECK(schedule_weights(50, cfg).omega == doctest::Approx(0.25));
  CHECK(schedule_weights(50, cfg).beta == doctest::Approx(0.5));
  CHECK(schedule_weights(500, cfg).omega == 0.5);
}

TEST_CASE("custom endpoints are hit exactly") {
  LossConfig cfg;
  cfg.omega_start = 0.3;
  cfg.omega_end = 1.7;
  cfg.beta_start = 0.9;
  cfg.beta_end = 0.2;
  cfg.horizon = 7;
  CHECK(schedule_weights(0, cfg).omega == 0.3);
  CHECK(schedule_weights(0, cfg).beta == 0.9);
  CHECK(schedule_weights(7, cfg).omega == 1.7);
  CHECK(schedule_weights(7, cfg).beta == 0.2);
}

TEST_CASE("hard mode defaults to ten times the soft tree weight") {
  const auto soft = LossConfig::defaults(LossMode::soft, 10, 0.5);
  const auto hard = LossConfig::defaults(LossMode::hard, 10, 0.5);
  CHECK(hard.omega_end == doctest::Approx(kHardLossWeightFactor * soft.omega_end));
  CHECK(hard.omega_end == doctest::Approx(5.0));
  const auto none = LossConfig::defaults(LossMode::none, 10);
  CHECK(schedule_weights(10, none).omega == 0.0);
  CHECK(schedule_weights(10, none).beta == 1.0);
}

TEST_CASE("invalid configs are rejected") {
  LossConfig cfg;
  cfg.horizon = 0;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = LossConfig{};
  cfg.beta_end = 1.5;
  CHECK_THROWS_AS(cfg.validate(), Error);
  cfg = LossConfig{};
  cfg.omega_start = -1;
  try {
    cfg.validate();
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_config);
  }
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("tree_losses");

TEST_CASE("soft loss of a 0.6 x 0.7 path") {
  const Hierarchy topo = hierarchy_from_merges(3, {{0, 1, 0}, {2, 3, 0}});
  const double a = std::log(0.7 / 0.3), b = std::log(0.6 / 0.4);
  const Matrix w = Matrix::from_rows({{a / 2 + b}, {-a / 2 + b}, {0.0}});
  const Matrix x = Matrix::from_rows({{1.0}});
  const std::vector<int> y{0};
  const auto v = soft_tree_loss(topo, w, x, y);
  CHECK(v.total == doctest::Approx(-std::log(0.42)).epsilon(1e-12));
  CHECK(v.total == doctest::Approx(0.8675).epsilon(1e-4));
}

TEST_CASE("hard loss averages the path cross entropies") {
  const Hierarchy topo = hierarchy_from_merges(4, {{0, 1, 0}, {2, 3, 0}, {4, 5, 0}});
  const double l9 = std::log(9.0);
  Matrix eye(4, 4, 0.0);
  for (std::size_t i = 0; i < 4; ++i) eye(i, i) = 1;
  const Matrix x = Matrix::from_rows({{l9 + l9 / 2, l9 - l9 / 2, 0, 0}});
  const std::vector<int> y{0};
  const auto v = hard_tree_loss(topo, eye, x, y);
  CHECK(v.total == doctest::Approx(-(std::log(0.9) + std::log(0.9)) / 2).epsilon(1e-12));
}

TEST_CASE("flat tree reduces both losses to softmax cross entropy") {
  std::mt19937_64 rng(1);
  for (int trial = 0; trial < 20; ++trial) {
    const Matrix w = synth::gaussian_matrix(5, 4, rng);
    const Matrix x = synth::gaussian_matrix(6, 4, rng);
    const std::vector<int> y{0, 1, 2, 3, 4, 2};
    const auto ce = softmax_cross_entropy(w, x, y);
    const auto soft = soft_tree_loss(flat_hierarchy(5), w, x, y);
    const auto hard = hard_tree_loss(flat_hierarchy(5), w, x, y);
    CHECK(std::abs(soft.total - ce.total) <= 1e-9);
    CHECK(std::abs(hard.total - ce.total) <= 1e-9);
    CHECK(oracle::max_relative_error(*soft.gradient, *ce.gradient, 1e-9) <= 1e-9);

    LossConfig cfg;
    cfg.beta_start = cfg.beta_end = 0;
    cfg.omega_start = cfg.omega_end = 1;
    const Hierarchy flat = flat_hierarchy(5);
    const auto comb = combined_loss(&flat, w, x, y, 0, cfg);
    CHECK(std::abs(comb.total - ce.total) <= 1e-9);
    CHECK(oracle::max_relative_error(*comb.gradient, *ce.gradient, 1e-9) <= 1e-9);
  }
}

TEST_CASE("soft loss equals the path-product enumeration") {
  std::mt19937_64 rng(2);
  for (int trial = 0; trial < 30; ++trial) {
    const auto inst = random_instance(rng);
    CHECK(soft_tree_loss(inst.tree, inst.w, inst.x, inst.labels).total ==
          doctest::Approx(reference_soft_loss(inst.tree, inst.w, inst.x, inst.labels)).epsilon(1e-10));
  }
}

TEST_CASE("gradients match central finite differences") {
  std::mt19937_64 rng(3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto inst = random_instance(rng);
    LossConfig cfg = LossConfig::defaults(trial % 2 ? LossMode::hard : LossMode::soft, 10);
    const double t = 4;
    auto check = [&](auto&& fn) {
      const Matrix analytic = *fn(inst.w).gradient;
      const Matrix numeric = oracle::finite_difference([&](const Matrix& w) { return fn(w).total; }, inst.w);
      CHECK(oracle::max_relative_error(analytic, numeric) < 1e-4);
    };
    check([&](const Matrix& w) { return soft_tree_loss(inst.tree, w, inst.x, inst.labels); });
    check([&](const Matrix& w) { return hard_tree_loss(inst.tree, w, inst.x, inst.labels); });
    check([&](const Matrix& w) { return combined_loss(&inst.tree, w, inst.x, inst.labels, t, cfg); });
  }
}

TEST_CASE("combined loss decomposes into its terms") {
  std::mt19937_64 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    const auto inst = random_instance(rng);
    LossConfig cfg;
    cfg.beta_start = cfg.beta_end = 1;
    cfg.omega_start = cfg.omega_end = 1;
    const auto both = combined_loss(&inst.tree, inst.w, inst.x, inst.labels, 0, cfg);
    const double ce = softmax_cross_entropy(inst.w, inst.x, inst.labels, false).total;
    const double tree = soft_tree_loss(inst.tree, inst.w, inst.x, inst.labels, false).total;
    CHECK(std::abs(both.total - (ce + tree)) <= 1e-12 * std::abs(ce + tree));

    cfg.omega_start = cfg.omega_end = 0;
    cfg.beta_start = cfg.beta_end = 0.3;
    CHECK(combined_loss(&inst.tree, inst.w, inst.x, inst.labels, 0, cfg).total == doctest::Approx(0.3 * ce));

    cfg.beta_start = cfg.beta_end = 0;
    cfg.omega_start = cfg.omega_end = 0.7;
    CHECK(combined_loss(&inst.tree, inst.w, inst.x, inst.labels, 0, cfg).total == doctest::Approx(0.7 * tree));

    const auto scheduled = LossConfig::defaults(LossMode::soft, 10);
    const auto v = combined_loss(&inst.tree, inst.w, inst.x, inst.labels, 3, scheduled);
    const auto sw = schedule_weights(3, scheduled);
    CHECK(std::abs(v.total - (sw.beta * v.original_term + sw.omega * v.tree_term)) <= 1e-12 * std::abs(v.total));
  }
}

TEST_CASE("bad labels and a missing tree are rejected") {
  const Matrix w(3, 2, 1.0), x(1, 2, 1.0);
  const std::vector<int> y{3};
  CHECK_THROWS_AS(softmax_cross_entropy(w, x, y), Error);
  CHECK_THROWS_AS(soft_tree_loss(flat_hierarchy(3), w, x, y), Error);
  const std::vector<int> ok{1};
  CHECK_THROWS_AS(combined_loss(nullptr, w, x, ok, 0, LossConfig{}), Error);
  CHECK_NOTHROW(combined_loss(nullptr, w, x, ok, 0, LossConfig::defaults(LossMode::none, 1)));
}

TEST_SUITE_END();
