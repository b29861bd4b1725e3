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


#include "nbdt/hierarchy.hpp"

#include <algorithm>
#include <set>
#include <string>

#include "nbdt/error.hpp"

namespace nbdt {

ClassWeights::ClassWeights(Matrix r, std::vector<std::string> ids)
    : rows(std::move(r)), class_ids(std::move(ids)) {
  require(rows.rows() >= 2, "need at least 2 classes, got " + std::to_string(rows.rows()));
  require(rows.cols() >= 1, "weight dimension must be at least 1");
  require(class_ids.size() == rows.rows(), "class id count does not match weight rows");
  std::set<std::string> seen(class_ids.begin(), class_ids.end());
  require(seen.size() == class_ids.size(), "class ids are not unique");
  for (std::size_t k = 0; k < rows.rows(); ++k) {
    auto row = rows.row(k);
    require(all_finite(row), "non-finite weight in row " + std::to_string(k));
    require(std::any_of(row.begin(), row.end(), [](double v) { return v != 0.0; }),
            "weight row " + std::to_string(k) + " is the zero vector");
  }
}

namespace {
std::vector<std::string> default_ids(std::size_t k) {
  std::vector<std::string> ids(k);
  for (std::size_t i = 0; i < k; ++i) ids[i] = std::to_string(i);
  return ids;
}
}  // namespace

ClassWeights::ClassWeights(Matrix r)
    : ClassWeights(r, default_ids(r.rows())) {}

Hierarchy::Hierarchy(std::vector<Node> nodes, int root) : nodes_(std::move(nodes)), root_(root) {
  const int n = static_cast<int>(nodes_.size());
  require(n >= 1, "hierarchy has no nodes");
  require(root_ >= 0 && root_ < n, "root id out of range");
  for (int i = 0; i < n; ++i)
    require(nodes_[static_cast<std::size_t>(i)].id == i,
            "node ids must be 0..N-1 in order; found id " +
                std::to_string(nodes_[static_cast<std::size_t>(i)].id) + " at position " +
                std::to_string(i));

  parent_.assign(static_cast<std::size_t>(n), -2);
  parent_[static_cast<std::size_t>(root_)] = -1;
  std::size_t num_leaves = 0;
  for (const Node& node : nodes_) {
    require(node.is_leaf() == node.class_index.has_value(),
            "node " + std::to_string(node.id) + ": class_index must be set iff it is a leaf");
    if (node.is_leaf()) {
      ++num_leaves;
    } else {
      require(node.children.size() >= 2,
              "inner node " + std::to_string(node.id) + " has fewer than 2 children");
    }
    for (int c : node.children) {
      require(c >= 0 && c < n, "child id out of range at node " + std::to_string(node.id));
      require(c != root_, "root appears as a child");
      require(parent_[static_cast<std::size_t>(c)] == -2,
              "node " + std::to_string(c) + " has more than one parent");
      parent_[static_cast<std::size_t>(c)] = node.id;
    }
  }

  leaf_of_class_.assign(num_leaves, -1);
  for (const Node& node : nodes_) {
    if (!node.is_leaf()) continue;
    const int k = *node.class_index;
    require(k >= 0 && static_cast<std::size_t>(k) < num_leaves,
            "leaf class index " + std::to_string(k) + " out of range");
    require(leaf_of_class_[static_cast<std::size_t>(k)] == -1,
            "class " + std::to_string(k) + " bound to two leaves");
    leaf_of_class_[static_cast<std::size_t>(k)] = node.id;
  }

  // Traverse from the root; every node must be reached exactly once.
  depth_.assign(static_cast<std::size_t>(n), -1);
  std::vector<int> order;
  order.reserve(static_cast<std::size_t>(n));
  std::vector<int> stack{root_};
  depth_[static_cast<std::size_t>(root_)] = 0;
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    order.push_back(id);
    for (int c : nodes_[static_cast<std::size_t>(id)].children) {
      require(depth_[static_cast<std::size_t>(c)] == -1, "cycle in hierarchy");
      depth_[static_cast<std::size_t>(c)] = depth_[static_cast<std::size_t>(id)] + 1;
      stack.push_back(c);
    }
  }
  require(order.size() == static_cast<std::size_t>(n), "hierarchy is not connected");

  leaves_.assign(static_cast<std::size_t>(n), {});
  for (auto it = order.rbegin(); it != order.rend(); ++it) {
    Node& node = nodes_[static_cast<std::size_t>(*it)];
    auto& mine = leaves_[static_cast<std::size_t>(*it)];
    if (node.is_leaf()) {
      mine.push_back(*node.class_index);
      continue;
    }
    for (int c : node.children) {
      const auto& theirs = leaves_[static_cast<std::size_t>(c)];
      mine.insert(mine.end(), theirs.begin(), theirs.end());
    }
    std::sort(mine.begin(), mine.end());
    std::sort(node.children.begin(), node.children.end(), [this](int a, int b) {
      return leaves_[static_cast<std::size_t>(a)].front() <
             leaves_[static_cast<std::size_t>(b)].front();
    });
  }

  std::size_t dim = 0;
  bool any_weight = false;
  for (const Node& node : nodes_) {
    if (!node.weight) continue;
    if (!any_weight) dim = node.weight->size();
    any_weight = true;
    require(node.weight->size() == dim, "node weights have inconsistent dimensions");
  }
}

const Node& Hierarchy::node(int id) const {
  require(id >= 0 && static_cast<std::size_t>(id) < nodes_.size(),
          "node id " + std::to_string(id) + " out of range");
  return nodes_[static_cast<std::size_t>(id)];
}

int Hierarchy::leaf_of_class(int class_index) const {
  require(class_index >= 0 && static_cast<std::size_t>(class_index) < leaf_of_class_.size(),
          "class index " + std::to_string(class_index) + " out of range");
  return leaf_of_class_[static_cast<std::size_t>(class_index)];
}

std::vector<int> Hierarchy::path_to_node(int id) const {
  node(id);
  std::vector<int> path;
  for (int cur = id; cur != -1; cur = parent(cur)) path.push_back(cur);
  std::reverse(path.begin(), path.end());
  return path;
}

std::vector<int> Hierarchy::path_to_class(int class_index) const {
  return path_to_node(leaf_of_class(class_index));
}

std::vector<int> Hierarchy::inner_nodes() const {
  std::vector<int> out;
  std::vector<int> stack{root_};
  while (!stack.empty()) {
    const int id = stack.back();
    stack.pop_back();
    const Node& n = nodes_[static_cast<std::size_t>(id)];
    if (n.is_leaf()) continue;
    out.push_back(id);
    for (auto it = n.children.rbegin(); it != n.children.rend(); ++it) stack.push_back(*it);
  }
  return out;
}

int Hierarchy::height() const {
  return depth_.empty() ? 0 : *std::max_element(depth_.begin(), depth_.end());
}

bool Hierarchy::has_weights() const noexcept {
  return !nodes_.empty() &&
         std::all_of(nodes_.begin(), nodes_.end(), [](const Node& n) { return n.weight.has_value(); });
}

std::size_t Hierarchy::dimension() const noexcept {
  for (const Node& n : nodes_)
    if (n.weight) return n.weight->size();
  return 0;
}

std::span<const double> Hierarchy::weight(int id) const {
  const Node& n = node(id);
  require(n.weight.has_value(), "node " + std::to_string(id) + " has no weight");
  return *n.weight;
}

Hierarchy attach_weights(const Hierarchy& tree, const Matrix& class_rows) {
  require(class_rows.rows() == tree.num_classes(),
          "tree has " + std::to_string(tree.num_classes()) + " leaves but weights have " +
              std::to_string(class_rows.rows()) + " rows");
  require(class_rows.cols() >= 1, "weight dimension must be at least 1");
  std::vector<Node> nodes = tree.nodes();
  const std::size_t dim = class_rows.cols();
  for (Node& node : nodes) {
    const auto& leaves = tree.leaves_under(node.id);
    std::vector<double> w(dim, 0.0);
    for (int k : leaves) {
      auto row = class_rows.row(static_cast<std::size_t>(k));
      for (std::size_t d = 0; d < dim; ++d) w[d] += row[d];
    }
    const double n = static_cast<double>(leaves.size());
    for (double& v : w) v /= n;
    node.weight = std::move(w);
  }
  return Hierarchy(std::move(nodes), tree.root());
}

Hierarchy attach_weights(const Hierarchy& tree, const ClassWeights& weights) {
  return attach_weights(tree, weights.rows);
}

Hierarchy strip_weights(const Hierarchy& tree) {
  std::vector<Node> nodes = tree.nodes();
  for (Node& n : nodes) {
    n.weight.reset();
    n.label.reset();
  }
  return Hierarchy(std::move(nodes), tree.root());
}

Hierarchy flat_hierarchy(std::size_t num_classes) {
  require(num_classes >= 2, "a flat hierarchy needs at least 2 classes");
  std::vector<Node> nodes(num_classes + 1);
  for (std::size_t k = 0; k < num_classes; ++k) {
    nodes[k].id = static_cast<int>(k);
    nodes[k].class_index = static_cast<int>(k);
  }
  Node& root = nodes[num_classes];
  root.id = static_cast<int>(num_classes);
  for (std::size_t k = 0; k < num_classes; ++k) root.children.push_back(static_cast<int>(k));
  return Hierarchy(std::move(nodes), root.id);
}

std::vector<std::vector<int>> leaf_partitions(const Hierarchy& tree) {
  std::vector<std::vector<int>> out;
  for (int id : tree.inner_nodes()) out.push_back(tree.leaves_under(id));
  std::sort(out.begin(), out.end());
  return out;
}

}  // namespace nbdt
