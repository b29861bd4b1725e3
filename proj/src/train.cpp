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


#include "nbdt/train.hpp"

#include <cmath>
#include <random>
#include <string>

#include "nbdt/error.hpp"
#include "nbdt/inference.hpp"

namespace nbdt {

void TrainConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::invalid_config, msg);
  };
  check(epochs >= 1, "epochs must be >= 1");
  check(batch_size >= 1, "batch_size must be >= 1");
  check(std::isfinite(learning_rate) && learning_rate > 0.0, "learning_rate must be > 0");
  check(momentum >= 0.0 && momentum < 1.0, "momentum must lie in [0, 1)");
  check(weight_decay >= 0.0, "weight_decay must be >= 0");
  check(lr_drop_factor > 0.0, "lr_drop_factor must be > 0");
  for (double p : lr_drop_points) check(p >= 0.0 && p <= 1.0, "lr drop points are fractions in [0, 1]");
  if (hierarchy_update) {
    const auto& u = *hierarchy_update;
    check(0 <= u.start_epoch && u.start_epoch <= u.end_epoch && u.end_epoch <= epochs,
          "hierarchy update needs 0 <= start <= end <= epochs");
    check(u.period >= 1, "hierarchy update period must be >= 1");
  }
}

double TrainConfig::learning_rate_at(int epoch) const {
  double lr = learning_rate;
  for (double p : lr_drop_points)
    if (epoch >= static_cast<int>(std::lround(p * epochs))) lr *= lr_drop_factor;
  return lr;
}

Matrix initial_weights(std::size_t num_classes, std::size_t dim, std::uint64_t seed) {
  std::mt19937_64 rng(seed);
  const double bound = 1.0 / std::sqrt(static_cast<double>(dim));
  std::uniform_real_distribution<double> dist(-bound, bound);
  Matrix w(num_classes, dim);
  for (double& v : w.data()) v = dist(rng);
  return w;
}

double plain_accuracy(const Matrix& weights, const Matrix& features, std::span<const int> labels) {
  require(features.rows() == labels.size() && !labels.empty(), "features and labels differ in count");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto logits = multiply(weights, features.row(i));
    hits += static_cast<int>(argmax(logits)) == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

double nbdt_accuracy(const Hierarchy& tree, const Matrix& weights, const Matrix& features,
                     std::span<const int> labels, bool soft) {
  require(features.rows() == labels.size() && !labels.empty(), "features and labels differ in count");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < features.rows(); ++i) {
    const auto logits = multiply(weights, features.row(i));
    const auto r = soft ? soft_predict_from_logits(tree, logits) : hard_predict_from_logits(tree, logits);
    hits += r.predicted_class == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(labels.size());
}

namespace {

Matrix gather_rows(const Matrix& m, std::span<const std::size_t> idx) {
  Matrix out(idx.size(), m.cols());
  for (std::size_t i = 0; i < idx.size(); ++i) {
    auto src = m.row(idx[i]);
    std::copy(src.begin(), src.end(), out.row(i).begin());
  }
  return out;
}

Hierarchy induce_from(const Matrix& weights, Linkage linkage) {
  return induce_hierarchy(ClassWeights(weights), linkage);
}

}  // namespace

TrainResult train_linear_head(const Matrix& features, std::span<const int> labels,
                              std::size_t num_classes, const TrainConfig& train_cfg,
                              const LossConfig& loss_cfg, const Hierarchy* initial_tree) {
  train_cfg.validate();
  loss_cfg.validate();
  require(num_classes >= 2, "need at least 2 classes");
  require(features.rows() >= 1 && features.cols() >= 1, "empty training set");
  require(features.rows() == labels.size(), "features and labels differ in count");
  require(all_finite(features.data()), "non-finite feature value");
  for (int y : labels)
    require(y >= 0 && static_cast<std::size_t>(y) < num_classes, "label " + std::to_string(y) + " out of range");
  if (loss_cfg.mode != LossMode::none && !initial_tree && !train_cfg.hierarchy_update)
    fail(ErrorKind::invalid_config,
         "a tree loss needs an initial hierarchy or a hierarchy update schedule");

  std::optional<Hierarchy> tree;
  if (initial_tree) {
    require(initial_tree->num_classes() == num_classes, "initial hierarchy has the wrong number of leaves");
    tree = strip_weights(*initial_tree);
  }

  const std::size_t M = features.rows(), K = num_classes, D = features.cols();
  Matrix weights = initial_weights(K, D, train_cfg.seed);
  Matrix velocity(K, D, 0.0);
  std::mt19937_64 rng(train_cfg.seed ^ 0x9e3779b97f4a7c15ULL);
  std::vector<std::size_t> order(M);
  for (std::size_t i = 0; i < M; ++i) order[i] = i;

  TrainResult result;
  for (int epoch = 0; epoch < train_cfg.epochs; ++epoch) {
    if (const auto& u = train_cfg.hierarchy_update;
        u && epoch >= u->start_epoch && epoch <= u->end_epoch && (epoch - u->start_epoch) % u->period == 0) {
      tree = strip_weights(induce_from(weights, train_cfg.linkage));
    }

    // Before the first hierarchy exists only the original term trains.
    LossConfig active = loss_cfg;
    if (!tree) active.mode = LossMode::none;
    const double lr = train_cfg.learning_rate_at(epoch);
    const Hierarchy* tree_ptr = tree ? &*tree : nullptr;

    // Fisher-Yates.
    for (std::size_t i = M; i > 1; --i) {
      std::uniform_int_distribution<std::size_t> pick(0, i - 1);
      std::swap(order[i - 1], order[pick(rng)]);
    }
    for (std::size_t lo = 0; lo < M; lo += train_cfg.batch_size) {
      const std::size_t hi = std::min(M, lo + train_cfg.batch_size);
      const std::span<const std::size_t> idx(order.data() + lo, hi - lo);
      const Matrix xb = gather_rows(features, idx);
      std::vector<int> yb(idx.size());
      for (std::size_t i = 0; i < idx.size(); ++i) yb[i] = labels[idx[i]];
      const LossValue v = combined_loss(tree_ptr, weights, xb, yb, epoch, active);
      if (!std::isfinite(v.total))
        fail(ErrorKind::training_failure, "non-finite loss at epoch " + std::to_string(epoch));
      const auto& g = v.gradient->data();
      auto& w = weights.data();
      auto& vel = velocity.data();
      for (std::size_t i = 0; i < w.size(); ++i) {
        vel[i] = train_cfg.momentum * vel[i] + g[i] + train_cfg.weight_decay * w[i];
        w[i] -= lr * vel[i];
      }
    }
    if (!all_finite(weights.data()))
      fail(ErrorKind::training_failure, "non-finite weights at epoch " + std::to_string(epoch));

    const LossValue full = combined_loss(tree_ptr, weights, features, labels, epoch, active, false);
    if (!std::isfinite(full.total))
      fail(ErrorKind::training_failure, "non-finite loss at epoch " + std::to_string(epoch));
    const auto sw = schedule_weights(epoch, loss_cfg);
    EpochRecord rec;
    rec.epoch = epoch;
    rec.lr = lr;
    rec.beta = sw.beta;
    rec.omega = tree ? sw.omega : 0.0;
    rec.loss_total = full.total;
    rec.loss_original = full.original_term;
    rec.loss_tree = full.tree_term;
    rec.acc_plain = plain_accuracy(weights, features, labels);
    if (tree) {
      rec.acc_nbdt_soft = nbdt_accuracy(*tree, weights, features, labels, true);
      rec.acc_nbdt_hard = nbdt_accuracy(*tree, weights, features, labels, false);
    }
    result.history.push_back(rec);
  }

  result.hierarchy = tree ? attach_weights(*tree, weights) : induce_from(weights, train_cfg.linkage);
  result.weights = std::move(weights);
  return result;
}

}  // namespace nbdt
