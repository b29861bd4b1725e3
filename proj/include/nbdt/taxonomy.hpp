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

#include <map>
#include <set>
#include <string>
#include <utility>
#include <vector>

#include "nbdt/hierarchy.hpp"

namespace nbdt {

// Hypernym DAG over concept ids (WordNet-style). Concepts may have several
// parents.
class Taxonomy {
 public:
  using Edge = std::pair<std::string, std::string>;  // (child, parent)

  Taxonomy() = default;
  // Rejects cycles and edge endpoints missing from `names`.
  Taxonomy(std::set<Edge> edges, std::map<std::string, std::string> names);

  bool contains(const std::string& id) const { return names_.count(id) != 0; }
  const std::string& name(const std::string& id) const;
  const std::vector<std::string>& parents(const std::string& id) const;
  const std::set<Edge>& edges() const noexcept { return edges_; }
  const std::map<std::string, std::string>& names() const noexcept { return names_; }

  // Shortest upward distance to every ancestor, the concept itself at 0.
  std::map<std::string, int> ancestor_distances(const std::string& id) const;

 private:
  std::set<Edge> edges_;
  std::map<std::string, std::string> names_;
  std::map<std::string, std::vector<std::string>> parents_;
};

// Minimal subtree of the taxonomy spanning the classes, with single-child
// chains collapsed. Leaf k is class_ids[k]; inner nodes carry their concept
// as label. Concepts with several parents follow the lexicographically
// smallest parent.
Hierarchy build_taxonomy_hierarchy(const Taxonomy& taxonomy,
                                   const std::vector<std::string>& class_ids);

// Labels each node with the earliest common ancestor of its classes, i.e.
// the shared ancestor minimizing the largest upward distance from any class.
// Ties go to the smallest concept id; the others are kept as alternatives.
Hierarchy label_nodes(const Hierarchy& tree, const Taxonomy& taxonomy,
                      const std::vector<std::string>& class_ids);

}  // namespace nbdt
