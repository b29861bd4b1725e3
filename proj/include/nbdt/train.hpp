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


#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "nbdt/clustering.hpp"
#include "nbdt/hierarchy.hpp"
#include "nbdt/loss.hpp"

namespace nbdt {

// Re-induce the hierarchy from the current weights at epochs
// start, start + period, ... up to end (inclusive).
struct HierarchyUpdate {
  int start_epoch = 0;
  int end_epoch = 0;
  int period = 1;
};

struct TrainConfig {
  int epochs = 200;
  std::size_t batch_size = 512;
  double learning_rate = 0.1;
  double momentum = 0.9;
  double weight_decay = 5e-4;
  std::vector<double> lr_drop_points{3.0 / 7.0, 5.0 / 7.0};  // fractions of training
  double lr_drop_factor = 0.1;
  std::uint64_t seed = 0;
  std::optional<HierarchyUpdate> hierarchy_update;
  Linkage linkage = Linkage::ward;

  void validate() const;
  double learning_rate_at(int epoch) const;
};

struct EpochRecord {
  int epoch = 0;
  double lr = 0.0;
  double beta = 0.0;
  double omega = 0.0;
  double loss_total = 0.0;
  double loss_original = 0.0;
  double loss_tree = 0.0;
  double acc_plain = 0.0;
  // Unset while no hierarchy exists yet.
  std::optional<double> acc_nbdt_soft;
  std::optional<double> acc_nbdt_hard;
};

struct TrainResult {
  Matrix weights;       // K x D
  Hierarchy hierarchy;  // weighted with the final W
  std::vector<EpochRecord> history;
};

// Seeded uniform in [-1/sqrt(D), 1/sqrt(D)].
Matrix initial_weights(std::size_t num_classes, std::size_t dim, std::uint64_t seed);

// Minibatch SGD with momentum and weight decay on a bias-free linear head.
// Epoch t uses the loss schedule at t; history losses and accuracies are
// measured on the full training set after each epoch. Without a tree loss
// and without an initial tree, the returned hierarchy is induced from the
// final weights.
TrainResult train_linear_head(const Matrix& features, std::span<const int> labels,
                              std::size_t num_classes, const TrainConfig& train_cfg,
                              const LossConfig& loss_cfg,
                              const Hierarchy* initial_tree = nullptr);

// Fraction of rows whose argmax logit equals the label.
double plain_accuracy(const Matrix& weights, const Matrix& features, std::span<const int> labels);

// Tree accuracy computed from logits W x with the tree's topology.
double nbdt_accuracy(const Hierarchy& tree, const Matrix& weights, const Matrix& features,
                     std::span<const int> labels, bool soft);

}  // namespace nbdt
