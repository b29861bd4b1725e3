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


#include "nbdt/info_gain.hpp"

#include <algorithm>
#include <cmath>
#include <functional>
#include <numeric>
#include <string>

#include "nbdt/error.hpp"

namespace nbdt {

namespace {

constexpr double kMinGain = 1e-12;

std::size_t count_classes(std::span<const int> labels) {
  int max_label = -1;
  for (int y : labels) {
    require(y >= 0, "negative class label");
    max_label = std::max(max_label, y);
  }
  return static_cast<std::size_t>(max_label + 1);
}

void check_inputs(const Matrix& features, std::span<const int> labels, std::size_t num_classes) {
  require(features.rows() == labels.size(), "feature rows and labels differ in count");
  require(!labels.empty(), "no training samples");
  require(all_finite(features.data()), "non-finite feature value");
  std::vector<std::size_t> counts(num_classes, 0);
  for (int y : labels) {
    require(y >= 0 && static_cast<std::size_t>(y) < num_classes, "label out of range");
    ++counts[static_cast<std::size_t>(y)];
  }
  for (std::size_t k = 0; k < num_classes; ++k)
    require(counts[k] > 0, "class " + std::to_string(k) + " has no samples");
}

int argmax_count(std::span<const std::size_t> counts) {
  return static_cast<int>(std::max_element(counts.begin(), counts.end()) - counts.begin());
}

}  // namespace

double class_entropy(std::span<const std::size_t> counts) {
  const double total = static_cast<double>(std::accumulate(counts.begin(), counts.end(), std::size_t{0}));
  if (total == 0.0) return 0.0;
  double h = 0.0;
  for (std::size_t c : counts) {
    if (c == 0) continue;
    const double p = static_cast<double>(c) / total;
    h -= p * std::log(p);
  }
  return h;
}

SplitChoice best_split(const Matrix& features, std::span<const int> labels,
                       std::span<const std::size_t> samples, std::size_t num_classes) {
  SplitChoice best;
  if (samples.size() < 2) return best;
  std::vector<std::size_t> total(num_classes, 0);
  for (std::size_t s : samples) ++total[static_cast<std::size_t>(labels[s])];
  const double parent_h = class_entropy(total);
  const double n = static_cast<double>(samples.size());

  std::vector<std::size_t> order(samples.begin(), samples.end());
  std::vector<std::size_t> left(num_classes), right(num_classes);
  for (std::size_t f = 0; f < features.cols(); ++f) {
    std::stable_sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
      return features(a, f) < features(b, f);
    });
    std::fill(left.begin(), left.end(), 0);
    right = total;
    // Sweep: move samples left one distinct value at a time.
    for (std::size_t i = 0; i + 1 < order.size(); ++i) {
      const auto y = static_cast<std::size_t>(labels[order[i]]);
      ++left[y];
      --right[y];
      const double here = features(order[i], f), next = features(order[i + 1], f);
      if (here == next) continue;
      const double nl = static_cast<double>(i + 1);
      const double gain = parent_h - (nl / n) * class_entropy(left) -
                          ((n - nl) / n) * class_entropy(right);
      if (best.feature < 0 || gain > best.gain)
        best = {static_cast<int>(f), here + (next - here) / 2.0, gain};
    }
  }
  return best;
}

int DecisionTree::predict(std::span<const double> x) const {
  require(!nodes.empty(), "empty decision tree");
  int cur = 0;
  while (nodes[static_cast<std::size_t>(cur)].feature >= 0) {
    const Split& s = nodes[static_cast<std::size_t>(cur)];
    require(static_cast<std::size_t>(s.feature) < x.size(), "feature vector too short");
    cur = x[static_cast<std::size_t>(s.feature)] <= s.threshold ? s.left : s.right;
  }
  return nodes[static_cast<std::size_t>(cur)].majority;
}

int DecisionTree::depth() const {
  std::function<int(int)> walk = [&](int id) -> int {
    const Split& s = nodes[static_cast<std::size_t>(id)];
    return s.feature < 0 ? 0 : 1 + std::max(walk(s.left), walk(s.right));
  };
  return nodes.empty() ? 0 : walk(0);
}

DecisionTree grow_info_gain_tree(const Matrix& features, std::span<const int> labels,
                                 std::size_t num_classes, int max_depth) {
  check_inputs(features, labels, num_classes);
  require(max_depth >= 0, "max_depth must be nonnegative");
  DecisionTree tree;
  tree.num_classes = num_classes;

  std::function<int(std::vector<std::size_t>, int)> grow =
      [&](std::vector<std::size_t> samples, int depth) -> int {
    DecisionTree::Split node;
    node.class_counts.assign(num_classes, 0);
    for (std::size_t s : samples) ++node.class_counts[static_cast<std::size_t>(labels[s])];
    node.majority = argmax_count(node.class_counts);
    const int id = static_cast<int>(tree.nodes.size());
    tree.nodes.push_back(node);

    const bool pure = std::count_if(node.class_counts.begin(), node.class_counts.end(),
                                    [](std::size_t c) { return c > 0; }) <= 1;
    if (pure || depth >= max_depth) return id;
    const SplitChoice split = best_split(features, labels, samples, num_classes);
    if (split.feature < 0 || split.gain < kMinGain) return id;

    std::vector<std::size_t> lo, hi;
    for (std::size_t s : samples)
      (features(s, static_cast<std::size_t>(split.feature)) <= split.threshold ? lo : hi).push_back(s);
    const int l = grow(std::move(lo), depth + 1);
    const int r = grow(std::move(hi), depth + 1);
    auto& stored = tree.nodes[static_cast<std::size_t>(id)];
    stored.feature = split.feature;
    stored.threshold = split.threshold;
    stored.left = l;
    stored.right = r;
    return id;
  };

  std::vector<std::size_t> all(labels.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  grow(std::move(all), 0);
  return tree;
}

Hierarchy hierarchy_from_decision_tree(const DecisionTree& tree, const Matrix& features,
                                       std::span<const int> labels) {
  const std::size_t num_classes = tree.num_classes;
  require(num_classes >= 2, "need at least 2 classes");
  check_inputs(features, labels, num_classes);

  // Which tree leaf does each sample reach?
  auto leaf_of = [&](std::span<const double> x) {
    int cur = 0;
    while (tree.nodes[static_cast<std::size_t>(cur)].feature >= 0) {
      const auto& s = tree.nodes[static_cast<std::size_t>(cur)];
      cur = x[static_cast<std::size_t>(s.feature)] <= s.threshold ? s.left : s.right;
    }
    return cur;
  };
  std::vector<std::vector<std::size_t>> hits(num_classes,
                                             std::vector<std::size_t>(tree.nodes.size(), 0));
  for (std::size_t i = 0; i < labels.size(); ++i)
    ++hits[static_cast<std::size_t>(labels[i])][static_cast<std::size_t>(leaf_of(features.row(i)))];
  std::vector<std::vector<int>> homed(tree.nodes.size());
  for (std::size_t k = 0; k < num_classes; ++k) {
    const auto& h = hits[k];
    const auto home = std::max_element(h.begin(), h.end()) - h.begin();
    homed[static_cast<std::size_t>(home)].push_back(static_cast<int>(k));
  }

  std::vector<Node> leaves(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) {
    leaves[k].id = static_cast<int>(k);
    leaves[k].class_index = static_cast<int>(k);
  }
  std::vector<Node> inner;
  const int base = static_cast<int>(num_classes);
  auto make_inner = [&](std::vector<int> children) {
    Node node;
    node.id = base + static_cast<int>(inner.size());
    node.children = std::move(children);
    inner.push_back(std::move(node));
    return inner.back().id;
  };

  std::function<int(int)> build = [&](int id) -> int {
    const auto& s = tree.nodes[static_cast<std::size_t>(id)];
    std::vector<int> children;
    if (s.feature < 0) {
      children = homed[static_cast<std::size_t>(id)];
    } else {
      for (int c : {s.left, s.right})
        if (int built = build(c); built >= 0) children.push_back(built);
    }
    if (children.empty()) return -1;
    if (children.size() == 1) return children.front();
    return make_inner(std::move(children));
  };
  const int root = build(0);
  std::vector<Node> nodes = std::move(leaves);
  nodes.insert(nodes.end(), inner.begin(), inner.end());
  return Hierarchy(std::move(nodes), root);
}

Hierarchy build_info_gain_hierarchy(const Matrix& features, std::span<const int> labels,
                                    int max_depth) {
  const std::size_t k = count_classes(labels);
  const DecisionTree tree = grow_info_gain_tree(features, labels, k, max_depth);
  return hierarchy_from_decision_tree(tree, features, labels);
}

}  // namespace nbdt
