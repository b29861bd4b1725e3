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


#include "nbdt/taxonomy.hpp"

#include <algorithm>
#include <deque>
#include <functional>
#include <limits>

#include "nbdt/error.hpp"

namespace nbdt {

namespace {
const std::vector<std::string> kNoParents;
}

Taxonomy::Taxonomy(std::set<Edge> edges, std::map<std::string, std::string> names)
    : edges_(std::move(edges)), names_(std::move(names)) {
  for (const auto& [child, parent] : edges_) {
    require(contains(child), "taxonomy edge references unnamed concept_id '" + child + "'");
    require(contains(parent), "taxonomy edge references unnamed concept_id '" + parent + "'");
    require(child != parent, "taxonomy self-loop at '" + child + "'");
    parents_[child].push_back(parent);
  }
  // Edges come from an ordered set, so parent lists are already sorted.

  // Cycle check: iterative DFS with colors.
  std::map<std::string, int> color;
  for (const auto& [start, unused] : parents_) {
    if (color[start] != 0) continue;
    std::vector<std::pair<std::string, std::size_t>> stack{{start, 0}};
    color[start] = 1;
    while (!stack.empty()) {
      auto& [id, next] = stack.back();
      const auto& ps = parents(id);
      if (next == ps.size()) {
        color[id] = 2;
        stack.pop_back();
        continue;
      }
      const std::string p = ps[next++];
      const int c = color[p];
      require(c != 1, "taxonomy contains a cycle through '" + p + "'");
      if (c == 0) {
        color[p] = 1;
        stack.emplace_back(p, 0);
      }
    }
  }
}

const std::string& Taxonomy::name(const std::string& id) const {
  auto it = names_.find(id);
  require(it != names_.end(), "unknown concept_id '" + id + "'");
  return it->second;
}

const std::vector<std::string>& Taxonomy::parents(const std::string& id) const {
  auto it = parents_.find(id);
  return it == parents_.end() ? kNoParents : it->second;
}

std::map<std::string, int> Taxonomy::ancestor_distances(const std::string& id) const {
  require(contains(id), "unknown concept_id '" + id + "'");
  std::map<std::string, int> dist{{id, 0}};
  std::deque<std::string> queue{id};
  while (!queue.empty()) {
    const std::string cur = queue.front();
    queue.pop_front();
    for (const auto& p : parents(cur)) {
      if (dist.count(p)) continue;
      dist[p] = dist[cur] + 1;
      queue.push_back(p);
    }
  }
  return dist;
}

Hierarchy build_taxonomy_hierarchy(const Taxonomy& taxonomy,
                                   const std::vector<std::string>& class_ids) {
  require(class_ids.size() >= 2, "need at least 2 classes");
  std::map<std::string, int> class_of;
  for (std::size_t k = 0; k < class_ids.size(); ++k) {
    require(taxonomy.contains(class_ids[k]),
            "class '" + class_ids[k] + "' is not in the taxonomy");
    require(class_of.emplace(class_ids[k], static_cast<int>(k)).second,
            "duplicate class id '" + class_ids[k] + "'");
  }

  // Canonical tree: each concept_id keeps its smallest parent.
  std::map<std::string, std::vector<std::string>> kids;
  std::string root;
  for (const auto& id : class_ids) {
    std::string cur = id;
    while (true) {
      const auto& ps = taxonomy.parents(cur);
      if (ps.empty()) break;
      const std::string& up = ps.front();
      auto& siblings = kids[up];
      if (std::find(siblings.begin(), siblings.end(), cur) != siblings.end()) {
        cur.clear();  // rest of the chain already recorded
        break;
      }
      siblings.push_back(cur);
      cur = up;
    }
    if (cur.empty()) continue;
    if (root.empty()) root = cur;
    require(root == cur, "classes '" + class_ids.front() + "' and '" + id +
                             "' have no common ancestor");
  }
  if (root.empty()) {
    // Every chain merged into an earlier one; walk up from the first class.
    root = class_ids.front();
    while (!taxonomy.parents(root).empty()) root = taxonomy.parents(root).front();
  }

  std::vector<Node> leaves(class_ids.size());
  std::vector<Node> inner;
  const int num_classes = static_cast<int>(class_ids.size());
  auto label_of = [&](const std::string& id) {
    return NodeLabel{id, taxonomy.name(id), {}};
  };

  // Returns node id for the collapsed subtree at `concept_id`, or -1 if it holds
  // no classes.
  std::function<int(const std::string&)> build = [&](const std::string& concept_id) -> int {
    auto cls = class_of.find(concept_id);
    std::vector<int> child_nodes;
    if (auto it = kids.find(concept_id); it != kids.end()) {
      auto sorted = it->second;
      std::sort(sorted.begin(), sorted.end());
      for (const auto& c : sorted)
        if (int id = build(c); id >= 0) child_nodes.push_back(id);
    }
    if (cls != class_of.end()) {
      require(child_nodes.empty(), "class '" + concept_id +
                                       "' is an ancestor of another class; leaves must not nest");
      Node& leaf = leaves[static_cast<std::size_t>(cls->second)];
      leaf.id = cls->second;
      leaf.class_index = cls->second;
      leaf.label = label_of(concept_id);
      return cls->second;
    }
    if (child_nodes.empty()) return -1;
    if (child_nodes.size() == 1) return child_nodes.front();
    Node node;
    node.id = num_classes + static_cast<int>(inner.size());
    node.children = std::move(child_nodes);
    node.label = label_of(concept_id);
    inner.push_back(std::move(node));
    return inner.back().id;
  };
  const int root_id = build(root);

  // Renumber inner nodes so they appear in creation order after the leaves.
  std::vector<Node> nodes = std::move(leaves);
  nodes.insert(nodes.end(), inner.begin(), inner.end());
  return Hierarchy(std::move(nodes), root_id);
}

Hierarchy label_nodes(const Hierarchy& tree, const Taxonomy& taxonomy,
                      const std::vector<std::string>& class_ids) {
  require(class_ids.size() == tree.num_classes(), "class id count does not match tree leaves");
  std::vector<std::map<std::string, int>> ancestors;
  ancestors.reserve(class_ids.size());
  for (const auto& id : class_ids) {
    require(taxonomy.contains(id), "class '" + id + "' is not in the taxonomy");
    ancestors.push_back(taxonomy.ancestor_distances(id));
  }

  std::vector<Node> nodes = tree.nodes();
  for (Node& node : nodes) {
    const auto& classes = tree.leaves_under(node.id);
    const auto& first = ancestors[static_cast<std::size_t>(classes.front())];
    int best_depth = std::numeric_limits<int>::max();
    std::vector<std::string> best;  // ascending, from the ordered map
    for (const auto& [concept_id, d0] : first) {
      int depth = d0;
      bool shared = true;
      for (std::size_t i = 1; i < classes.size() && shared; ++i) {
        const auto& m = ancestors[static_cast<std::size_t>(classes[i])];
        auto it = m.find(concept_id);
        if (it == m.end()) {
          shared = false;
        } else {
          depth = std::max(depth, it->second);
        }
      }
      if (!shared) continue;
      if (depth < best_depth) {
        best_depth = depth;
        best.assign(1, concept_id);
      } else if (depth == best_depth) {
        best.push_back(concept_id);
      }
    }
    if (best.empty()) {
      node.label.reset();
      continue;
    }
    NodeLabel label{best.front(), taxonomy.name(best.front()), {}};
    label.alternatives.assign(best.begin() + 1, best.end());
    node.label = std::move(label);
  }
  return Hierarchy(std::move(nodes), tree.root());
}

}  // namespace nbdt
