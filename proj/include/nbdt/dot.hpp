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
#include <string>
#include <vector>

#include "nbdt/hierarchy.hpp"

namespace nbdt {

struct DotAnnotations {
  std::map<int, std::string> node_text;
  // Keyed by the child end of the edge.
  std::map<int, std::string> edge_text;
};

// Graphviz digraph with one box per node. Captions list the node label, the
// class name for leaves (from class_names when given) and any annotation.
std::string export_dot(const Hierarchy& tree, const DotAnnotations& annotations = {},
                       const std::vector<std::string>& class_names = {});

}  // namespace nbdt
