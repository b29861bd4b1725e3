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
#include <string_view>
#include <vector>

#include "nbdt/hierarchy.hpp"

namespace nbdt {

enum class InferenceMode { soft, hard };
enum class InputKind { features, logits };

InferenceMode parse_inference_mode(std::string_view name);

struct NodeDistribution {
  int node_id = 0;
  std::vector<double> probs;  // one per child, in child order
};

struct PathResult {
  int predicted_class = 0;
  std::vector<double> class_probs;  // K entries
  std::vector<int> path;            // root .. leaf
  std::vector<NodeDistribution> per_node;  // one per inner node on path
};

// Max-subtracted softmax and its logarithm.
std::vector<double> softmax(std::span<const double> scores);
std::vector<double> log_softmax(std::span<const double> scores);

// Lowest index among maxima.
std::size_t argmax(std::span<const double> values);

// Inner products <n_j, x> for the children j of an inner node.
std::vector<double> child_scores(const Hierarchy& tree, int node_id, std::span<const double> x);

// Same quantity from logits: the mean of the logits of the classes beneath
// each child. Equal to child_scores when logits = W x and the tree weights
// were attached from W, since the inner product of a mean is the mean of the
// inner products.
std::vector<double> child_scores_from_logits(const Hierarchy& tree, int node_id,
                                             std::span<const double> logits);

NodeDistribution node_child_probs(const Hierarchy& tree, int node_id, std::span<const double> x);

// Path-probability distribution over classes; the prediction is the most
// probable leaf and `path` leads to it.
PathResult soft_class_distribution(const Hierarchy& tree, std::span<const double> x);
int soft_predict(const Hierarchy& tree, std::span<const double> x);

// Greedy descent. class_probs holds the traversed leaf's step product only.
PathResult hard_predict(const Hierarchy& tree, std::span<const double> x);

PathResult soft_predict_from_logits(const Hierarchy& tree, std::span<const double> logits);
PathResult hard_predict_from_logits(const Hierarchy& tree, std::span<const double> logits);

// Row-wise prediction over a batch. Results are independent per sample, so
// any thread count produces identical output. threads = 0 uses
// default_thread_count().
std::vector<PathResult> batch_predict(const Hierarchy& tree, const Matrix& batch, InputKind kind,
                                      InferenceMode mode, std::size_t threads = 0);

}  // namespace nbdt
