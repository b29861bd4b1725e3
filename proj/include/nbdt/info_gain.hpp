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

#include <span>
#include <vector>

#include "nbdt/hierarchy.hpp"

namespace nbdt {

// Axis-aligned decision tree grown greedily by information gain.
struct DecisionTree {
  struct Split {
    int feature = -1;  // -1 marks a leaf
    double threshold = 0.0;
    int left = -1;   // x[feature] <= threshold
    int right = -1;
    int majority = 0;
    std::vector<std::size_t> class_counts;
  };

  std::vector<Split> nodes;  // nodes[0] is the root
  std::size_t num_classes = 0;

  int predict(std::span<const double> x) const;
  int depth() const;
};

struct SplitChoice {
  int feature = -1;
  double threshold = 0.0;
  double gain = 0.0;
};

// Entropy in nats of a class histogram.
double class_entropy(std::span<const std::size_t> counts);

// Best split over the listed samples: every feature, every midpoint between
// consecutive distinct sorted values. Ties keep the lowest feature, then the
// lowest threshold.
SplitChoice best_split(const Matrix& features, std::span<const int> labels,
                       std::span<const std::size_t> samples, std::size_t num_classes);

// Grows until a node is pure, max_depth is reached, or the best gain is below
// 1e-12.
DecisionTree grow_info_gain_tree(const Matrix& features, std::span<const int> labels,
                                 std::size_t num_classes, int max_depth);

// Class hierarchy read off the decision tree for comparison experiments.
// Each class is placed at the tree leaf that receives most of its training
// samples (lowest leaf on ties); tree leaves holding several classes become
// flat inner nodes, empty branches are pruned and single-child chains
// collapsed. No weights are attached.
Hierarchy hierarchy_from_decision_tree(const DecisionTree& tree, const Matrix& features,
                                       std::span<const int> labels);

Hierarchy build_info_gain_hierarchy(const Matrix& features, std::span<const int> labels,
                                    int max_depth);

}  // namespace nbdt
