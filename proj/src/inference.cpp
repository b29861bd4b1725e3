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


#include "nbdt/inference.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <string>

#include "nbdt/error.hpp"
#include "nbdt/parallel.hpp"

namespace nbdt {

InferenceMode parse_inference_mode(std::string_view name) {
  if (name == "soft") return InferenceMode::soft;
  if (name == "hard") return InferenceMode::hard;
  fail(ErrorKind::invalid_input, "unknown inference mode '" + std::string(name) + "'");
}

std::vector<double> log_softmax(std::span<const double> scores) {
  require(!scores.empty(), "softmax of an empty vector");
  const double m = *std::max_element(scores.begin(), scores.end());
  double sum = 0.0;
  for (double s : scores) sum += std::exp(s - m);
  const double lse = std::log(sum);
  std::vector<double> out(scores.size());
  for (std::size_t j = 0; j < scores.size(); ++j) out[j] = scores[j] - m - lse;
  return out;
}

std::vector<double> softmax(std::span<const double> scores) {
  require(!scores.empty(), "softmax of an empty vector");
  const double m = *std::max_element(scores.begin(), scores.end());
  std::vector<double> out(scores.size());
  double sum = 0.0;
  for (std::size_t j = 0; j < scores.size(); ++j) {
    out[j] = std::exp(scores[j] - m);
    sum += out[j];
  }
  for (double& p : out) p /= sum;
  return out;
}

std::size_t argmax(std::span<const double> values) {
  require(!values.empty(), "argmax of an empty vector");
  std::size_t best = 0;
  for (std::size_t i = 1; i < values.size(); ++i)
    if (values[i] > values[best]) best = i;
  return best;
}

namespace {

using Scorer = std::function<std::vector<double>(int)>;

const Node& inner_node(const Hierarchy& tree, int node_id) {
  const Node& node = tree.node(node_id);
  require(!node.is_leaf(), "node " + std::to_string(node_id) + " is a leaf");
  return node;
}

void check_features(const Hierarchy& tree, std::span<const double> x) {
  require(tree.has_weights(), "hierarchy has no node weights");
  require(x.size() == tree.dimension(), "feature dimension " + std::to_string(x.size()) +
                                            " does not match weight dimension " +
                                            std::to_string(tree.dimension()));
  require(all_finite(x), "non-finite feature value");
}

void check_logits(const Hierarchy& tree, std::span<const double> logits) {
  require(logits.size() == tree.num_classes(),
          "logit count " + std::to_string(logits.size()) + " does not match " +
              std::to_string(tree.num_classes()) + " classes");
  require(all_finite(logits), "non-finite logit");
}

Scorer feature_scorer(const Hierarchy& tree, std::span<const double> x) {
  return [&tree, x](int id) {
    const Node& node = tree.node(id);
    std::vector<double> s;
    s.reserve(node.children.size());
    for (int c : node.children) s.push_back(dot(tree.weight(c), x));
    return s;
  };
}

Scorer logit_scorer(const Hierarchy& tree, std::span<const double> logits) {
  return [&tree, logits](int id) {
    const Node& node = tree.node(id);
    std::vector<double> s;
    s.reserve(node.children.size());
    for (int c : node.children) {
      const auto& leaves = tree.leaves_under(c);
      double sum = 0.0;
      for (int k : leaves) sum += logits[static_cast<std::size_t>(k)];
      s.push_back(sum / static_cast<double>(leaves.size()));
    }
    return s;
  };
}

PathResult soft_with(const Hierarchy& tree, const Scorer& scores) {
  std::vector<double> log_p(tree.size(), 0.0);
  std::vector<std::vector<double>> dist(tree.size());
  for (int id : tree.inner_nodes()) {
    const auto s = scores(id);
    const auto ls = log_softmax(s);
    const Node& node = tree.node(id);
    auto& probs = dist[static_cast<std::size_t>(id)];
    probs.resize(ls.size());
    for (std::size_t j = 0; j < ls.size(); ++j) {
      log_p[static_cast<std::size_t>(node.children[j])] = log_p[static_cast<std::size_t>(id)] + ls[j];
      probs[j] = std::exp(ls[j]);
    }
  }

  PathResult result;
  const std::size_t k = tree.num_classes();
  std::vector<double> leaf_log(k);
  result.class_probs.resize(k);
  for (std::size_t c = 0; c < k; ++c) {
    leaf_log[c] = log_p[static_cast<std::size_t>(tree.leaf_of_class(static_cast<int>(c)))];
    result.class_probs[c] = std::exp(leaf_log[c]);
  }
  result.predicted_class = static_cast<int>(argmax(leaf_log));
  result.path = tree.path_to_class(result.predicted_class);
  for (std::size_t i = 0; i + 1 < result.path.size(); ++i)
    result.per_node.push_back({result.path[i], dist[static_cast<std::size_t>(result.path[i])]});
  return result;
}

PathResult hard_with(const Hierarchy& tree, const Scorer& scores) {
  PathResult result;
  result.class_probs.assign(tree.num_classes(), 0.0);
  int cur = tree.root();
  double log_product = 0.0;
  result.path.push_back(cur);
  while (!tree.node(cur).is_leaf()) {
    const auto s = scores(cur);
    const std::size_t j = argmax(s);
    const auto ls = log_softmax(s);
    log_product += ls[j];
    std::vector<double> probs(ls.size());
    for (std::size_t i = 0; i < ls.size(); ++i) probs[i] = std::exp(ls[i]);
    result.per_node.push_back({cur, std::move(probs)});
    cur = tree.node(cur).children[j];
    result.path.push_back(cur);
  }
  result.predicted_class = *tree.node(cur).class_index;
  result.class_probs[static_cast<std::size_t>(result.predicted_class)] = std::exp(log_product);
  return result;
}

}  // namespace

std::vector<double> child_scores(const Hierarchy& tree, int node_id, std::span<const double> x) {
  inner_node(tree, node_id);
  check_features(tree, x);
  return feature_scorer(tree, x)(node_id);
}

std::vector<double> child_scores_from_logits(const Hierarchy& tree, int node_id,
                                             std::span<const double> logits) {
  inner_node(tree, node_id);
  check_logits(tree, logits);
  return logit_scorer(tree, logits)(node_id);
}

NodeDistribution node_child_probs(const Hierarchy& tree, int node_id, std::span<const double> x) {
  return {node_id, softmax(child_scores(tree, node_id, x))};
}

PathResult soft_class_distribution(const Hierarchy& tree, std::span<const double> x) {
  check_features(tree, x);
  return soft_with(tree, feature_scorer(tree, x));
}

int soft_predict(const Hierarchy& tree, std::span<const double> x) {
  return soft_class_distribution(tree, x).predicted_class;
}

PathResult hard_predict(const Hierarchy& tree, std::span<const double> x) {
  check_features(tree, x);
  return hard_with(tree, feature_scorer(tree, x));
}

PathResult soft_predict_from_logits(const Hierarchy& tree, std::span<const double> logits) {
  check_logits(tree, logits);
  return soft_with(tree, logit_scorer(tree, logits));
}

PathResult hard_predict_from_logits(const Hierarchy& tree, std::span<const double> logits) {
  check_logits(tree, logits);
  return hard_with(tree, logit_scorer(tree, logits));
}

std::vector<PathResult> batch_predict(const Hierarchy& tree, const Matrix& batch, InputKind kind,
                                      InferenceMode mode, std::size_t threads) {
  require(batch.rows() >= 1, "empty batch");
  if (kind == InputKind::features) {
    require(tree.has_weights(), "hierarchy has no node weights");
    require(batch.cols() == tree.dimension(), "batch dimension " + std::to_string(batch.cols()) +
                                                  " does not match weight dimension " +
                                                  std::to_string(tree.dimension()));
  } else {
    require(batch.cols() == tree.num_classes(), "batch has " + std::to_string(batch.cols()) +
                                                    " logits per row, tree has " +
                                                    std::to_string(tree.num_classes()) + " classes");
  }
  std::vector<PathResult> out(batch.rows());
  parallel_for(batch.rows(), threads, [&](std::size_t i) {
    const auto row = batch.row(i);
    if (kind == InputKind::features) {
      out[i] = mode == InferenceMode::soft ? soft_class_distribution(tree, row) : hard_predict(tree, row);
    } else {
      out[i] = mode == InferenceMode::soft ? soft_predict_from_logits(tree, row)
                                           : hard_predict_from_logits(tree, row);
    }
  });
  return out;
}

}  // namespace nbdt
