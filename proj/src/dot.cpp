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


#include "nbdt/dot.hpp"

#include <sstream>

namespace nbdt {

namespace {

std::string escape(const std::string& text) {
  std::string out;
  for (char c : text) {
    if (c == '"' || c == '\\') out.push_back('\\');
    if (c == '\n') {
      out += "\\n";
      continue;
    }
    out.push_back(c);
  }
  return out;
}

}  // namespace

std::string export_dot(const Hierarchy& tree, const DotAnnotations& annotations,
                       const std::vector<std::string>& class_names) {
  std::ostringstream out;
  out << "digraph nbdt {\n";
  out << "  node [shape=box, fontname=\"Helvetica\"];\n";
  for (const Node& node : tree.nodes()) {
    std::string caption;
    if (node.label) caption = node.label->name.empty() ? node.label->id : node.label->name;
    if (node.class_index) {
      const auto k = static_cast<std::size_t>(*node.class_index);
      const std::string cls = k < class_names.size() ? class_names[k] : "class " + std::to_string(k);
      if (caption != cls) caption = caption.empty() ? cls : caption + "\n" + cls;
    }
    if (caption.empty()) caption = "node " + std::to_string(node.id);
    if (auto it = annotations.node_text.find(node.id); it != annotations.node_text.end())
      caption += "\n" + it->second;
    out << "  n" << node.id << " [label=\"" << escape(caption) << "\"";
    if (node.id == tree.root()) out << ", style=bold";
    out << "];\n";
  }
  for (const Node& node : tree.nodes()) {
    for (int c : node.children) {
      out << "  n" << node.id << " -> n" << c;
      if (auto it = annotations.edge_text.find(c); it != annotations.edge_text.end())
        out << " [label=\"" << escape(it->second) << "\"]";
      out << ";\n";
    }
  }
  out << "}\n";
  return out.str();
}

}  // namespace nbdt
