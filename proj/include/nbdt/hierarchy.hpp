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
#include <string>
#include <vector>

#include "nbdt/matrix.hpp"

namespace nbdt {

// Final-layer weights: one row per class.
struct ClassWeights {
  Matrix rows;
  std::vector<std::string> class_ids;

  ClassWeights() = default;
  // Validates: K >= 2, D >= 1, unique ids, finite and nonzero rows.
  ClassWeights(Matrix rows, std::vector<std::string> class_ids);
  // Ids default to "0", "1", ...
  explicit ClassWeights(Matrix rows);

  std::size_t num_classes() const noexcept { return rows.rows(); }
  std::size_t dimension() const noexcept { return rows.cols(); }
};

struct NodeLabel {
  std::string id;
  std::string name;
  // Other common ancestors tied with the chosen one.
  std::vector<std::string> alternatives;

  bool operator==(const NodeLabel&) const = default;
};

struct Node {
  int id = 0;
  std::vector<int> children;
  std::optional<std::vector<double>> weight;
  std::optional<int> class_index;
  std::optional<NodeLabel> label;

  bool is_leaf() const noexcept { return children.empty(); }
  bool operator==(const Node&) const = default;
};

// Rooted tree whose leaves biject with classes 0..K-1.
//
// Node ids are 0..N-1 and index into nodes(). Construction validates the
// tree shape and sorts every child list by the smallest class index found
// beneath each child, so equal trees compare equal regardless of input order.
class Hierarchy {
 public:
  Hierarchy() = default;
  Hierarchy(std::vector<Node> nodes, int root);

  int root() const noexcept { return root_; }
  const std::vector<Node>& nodes() const noexcept { return nodes_; }
  const Node& node(int id) const;
  std::size_t size() const noexcept { return nodes_.size(); }
  std::size_t num_classes() const noexcept { return leaf_of_class_.size(); }

  // -1 for the root.
  int parent(int id) const { return parent_.at(static_cast<std::size_t>(id)); }
  int leaf_of_class(int class_index) const;
  // Sorted class indices in the subtree.
  const std::vector<int>& leaves_under(int id) const {
    return leaves_.at(static_cast<std::size_t>(id));
  }
  // Root first, leaf last.
  std::vector<int> path_to_class(int class_index) const;
  std::vector<int> path_to_node(int id) const;
  // Inner nodes in preorder (root first).
  std::vector<int> inner_nodes() const;
  int depth(int id) const { return depth_.at(static_cast<std::size_t>(id)); }
  int height() const;

  bool has_weights() const noexcept;
  // Weight dimension, 0 when unweighted.
  std::size_t dimension() const noexcept;
  std::span<const double> weight(int id) const;

  bool operator==(const Hierarchy& other) const {
    return root_ == other.root_ && nodes_ == other.nodes_;
  }

 private:
  std::vector<Node> nodes_;
  int root_ = -1;
  std::vector<int> parent_;
  std::vector<int> depth_;
  std::vector<int> leaf_of_class_;
  std::vector<std::vector<int>> leaves_;
};

// Every node gets the mean of the raw leaf rows in its subtree.
Hierarchy attach_weights(const Hierarchy& tree, const ClassWeights& weights);
Hierarchy attach_weights(const Hierarchy& tree, const Matrix& class_rows);

// Same topology, weights and labels dropped.
Hierarchy strip_weights(const Hierarchy& tree);

// Root with K leaf children.
Hierarchy flat_hierarchy(std::size_t num_classes);

// Set of sorted leaf-class partitions, one per inner node. Two trees over the
// same classes are isomorphic iff these sets are equal.
std::vector<std::vector<int>> leaf_partitions(const Hierarchy& tree);

}  // namespace nbdt
