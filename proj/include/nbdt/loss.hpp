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

#include <optional>
#include <span>
#include <string_view>

#include "nbdt/hierarchy.hpp"

namespace nbdt {

enum class LossMode { none, soft, hard };

LossMode parse_loss_mode(std::string_view name);
const char* to_string(LossMode mode);

// Multiplier applied to the tree-loss weight when mode is hard.
inline constexpr double kHardLossWeightFactor = 10.0;

// Linear schedules for the tree term weight (omega) and the original cross
// entropy weight (beta) over `horizon` epochs.
struct LossConfig {
  LossMode mode = LossMode::soft;
  double omega_start = 0.0;
  double omega_end = 0.5;
  double beta_start = 1.0;
  double beta_end = 0.0;
  int horizon = 1;

  // omega grows 0 -> soft_omega_end (x10 for hard mode), beta decays 1 -> 0.
  // Mode none keeps beta at 1 and omega at 0.
  static LossConfig defaults(LossMode mode, int horizon, double soft_omega_end = 0.5);
  void validate() const;
};

struct ScheduledWeights {
  double beta = 1.0;
  double omega = 0.0;
};

// Linear interpolation at epoch t; t outside [0, horizon] clamps.
ScheduledWeights schedule_weights(double t, const LossConfig& cfg);

struct LossValue {
  double total = 0.0;
  double original_term = 0.0;
  double tree_term = 0.0;
  std::optional<Matrix> gradient;  // same shape as W (K x D)
};

// All losses take W as K x D, the batch as M x D and labels in [0, K), and
// average over the batch. Tree losses use only the tree topology: node
// weights are re-derived from W as subtree means, so the gradient flows
// through the averaging.

// Softmax cross entropy on logits W x.
LossValue softmax_cross_entropy(const Matrix& weights, const Matrix& batch,
                                std::span<const int> labels, bool with_gradient = true);

// Cross entropy of the path-probability class distribution.
LossValue soft_tree_loss(const Hierarchy& tree, const Matrix& weights, const Matrix& batch,
                         std::span<const int> labels, bool with_gradient = true);

// Per-node cross entropies along the label's root path, averaged over those
// nodes, then over the batch.
LossValue hard_tree_loss(const Hierarchy& tree, const Matrix& weights, const Matrix& batch,
                         std::span<const int> labels, bool with_gradient = true);

// beta_t * cross entropy + omega_t * tree term. `tree` may be null only when
// mode is none.
LossValue combined_loss(const Hierarchy* tree, const Matrix& weights, const Matrix& batch,
                        std::span<const int> labels, double t, const LossConfig& cfg,
                        bool with_gradient = true);

}  // namespace nbdt
