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


#include <algorithm>
#include <random>
#include <set>
#include <string>

#include "doctest.h"
#include "nbdt/clustering.hpp"
#include "nbdt/error.hpp"
#include "nbdt/serialize.hpp"
#include "nbdt/taxonomy.hpp"
#include "oracles.hpp"
#include "synthetic.hpp"

using namespace nbdt;

namespace {

Taxonomy small_taxonomy() {
  return Taxonomy({{"dog", "mammal"},
                   {"cat", "mammal"},
                   {"mammal", "animal"},
                   {"animal", "living_thing"},
                   {"plane", "vehicle"},
                   {"vehicle", "artifact"},
                   {"artifact", "object"},
                   {"living_thing", "object"}},
                  {{"dog", "dog"},
                   {"cat", "cat"},
                   {"mammal", "mammal"},
                   {"animal", "animal"},
                   {"living_thing", "living thing"},
                   {"plane", "airplane"},
                   {"vehicle", "vehicle"},
                   {"artifact", "artifact"},
                   {"object", "object"}});
}

Taxonomy cifar_taxonomy() {
  const std::string dir = NBDT_FIXTURE_DIR "/cifar10/";
  return load_taxonomy(dir + "edges.tsv", dir + "names.tsv");
}

std::vector<std::string> cifar_classes() { return read_lines(NBDT_FIXTURE_DIR "/cifar10/class_ids.txt"); }

// Random tree-shaped taxonomy: concepts c0..c{n-1}, each non-root concept
// gets one random earlier concept as parent. Classes are the concepts with
// no children.
struct RandomTaxonomy {
  Taxonomy taxonomy;
  std::vector<std::string> classes;
  std::set<Taxonomy::Edge> edges;
  std::vector<std::string> concepts;
};

RandomTaxonomy random_taxonomy(std::size_t concepts, std::mt19937_64& rng) {
  RandomTaxonomy out;
  std::map<std::string, std::string> names;
  std::vector<int> child_count(concepts, 0);
  auto id = [](std::size_t i) { return "c" + std::to_string(100 + i); };
  for (std::size_t i = 0; i < concepts; ++i) {
    out.concepts.push_back(id(i));
    names[id(i)] = "concept " + std::to_string(i);
    if (i == 0) continue;
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    const std::size_t p = pick(rng);
    out.edges.insert({id(i), id(p)});
    ++child_count[p];
  }
  for (std::size_t i = 0; i < concepts; ++i)
    if (child_count[i] == 0) out.classes.push_back(id(i));
  std::shuffle(out.classes.begin(), out.classes.end(), rng);
  out.taxonomy = Taxonomy(out.edges, names);
  return out;
}

}  // namespace

TEST_SUITE_BEGIN("taxonomy");

TEST_CASE("cycles and unnamed endpoints are rejected") {
  CHECK_THROWS_AS(Taxonomy({{"a", "b"}, {"b", "a"}}, {{"a", "a"}, {"b", "b"}}), Error);
  CHECK_THROWS_AS(Taxonomy({{"a", "b"}}, {{"a", "a"}}), Error);
}

TEST_CASE("two siblings under a common parent") {
  const Hierarchy h = build_taxonomy_hierarchy(small_taxonomy(), {"dog", "cat"});
  REQUIRE(h.size() == 3);
  CHECK(h.node(h.root()).label->id == "mammal");
  CHECK(h.node(h.root()).children == std::vector<int>{0, 1});
}

TEST_CASE("animals group apart from vehicles") {
  const Hierarchy h = build_taxonomy_hierarchy(small_taxonomy(), {"dog", "cat", "plane"});
  const Node& root = h.node(h.root());
  CHECK(root.label->id == "object");
  REQUIRE(root.children.size() == 2);
  CHECK(h.leaves_under(root.children[0]) == std::vector<int>{0, 1});
  CHECK(h.node(root.children[0]).label->id == "mammal");
  CHECK(root.children[1] == 2);
}

TEST_CASE("unknown class or missing common ancestor is invalid input") {
  CHECK_THROWS_AS(build_taxonomy_hierarchy(small_taxonomy(), {"dog", "unicorn"}), Error);
  const Taxonomy split({{"a", "x"}, {"b", "y"}}, {{"a", "a"}, {"b", "b"}, {"x", "x"}, {"y", "y"}});
  try {
    build_taxonomy_hierarchy(split, {"a", "b"});
    FAIL("expected an error");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::invalid_input);
  }
}

TEST_CASE("cifar-like fixture collapses chains and keeps vehicles apart") {
  const auto classes = cifar_classes();
  const Hierarchy h = build_taxonomy_hierarchy(cifar_taxonomy(), classes);
  CHECK(h.num_classes() == 10);
  for (int id : h.inner_nodes()) CHECK(h.node(id).children.size() >= 2);
  const Node& root = h.node(h.root());
  CHECK(root.label->id == "whole.n.02");
  std::set<std::vector<int>> parts;
  for (int c : root.children) parts.insert(h.leaves_under(c));
  CHECK(parts == std::set<std::vector<int>>{{0, 1, 8, 9}, {2, 3, 4, 5, 6, 7}});
}

TEST_CASE("property: spanning tree equals the ancestor-closure construction") {
  std::mt19937_64 rng(10);
  int checked = 0;
  for (int trial = 0; trial < 200 && checked < 30; ++trial) {
    const auto rt = random_taxonomy(18, rng);
    if (rt.classes.size() < 2 || rt.classes.size() > 12) continue;
    ++checked;
    const Hierarchy h = build_taxonomy_hierarchy(rt.taxonomy, rt.classes);
    const oracle::AncestorClosure closure(rt.edges, rt.concepts);

    // Expected partitions: distinct class sets of size >= 2 below any concept.
    std::set<std::vector<int>> expected;
    for (const auto& c : rt.concepts) {
      std::vector<int> below;
      for (std::size_t k = 0; k < rt.classes.size(); ++k)
        if (closure.dist[closure.index.at(rt.classes[k])][closure.index.at(c)] >= 0)
          below.push_back(static_cast<int>(k));
      if (below.size() >= 2) expected.insert(below);
    }
    const auto got = leaf_partitions(h);
    CHECK(std::set<std::vector<int>>(got.begin(), got.end()) == expected);
    CHECK(got.size() == expected.size());

    for (int id : h.inner_nodes()) {
      std::vector<std::string> members;
      for (int k : h.leaves_under(id)) members.push_back(rt.classes[static_cast<std::size_t>(k)]);
      CHECK(h.node(id).label->id == closure.earliest_common(members));
    }
  }
  CHECK(checked == 30);
}

TEST_SUITE_END();

TEST_SUITE_BEGIN("label_nodes");

TEST_CASE("shared ancestors pick the earliest one") {
  const Taxonomy tax = small_taxonomy();
  const Hierarchy h = label_nodes(flat_hierarchy(2), tax, {"dog", "cat"});
  CHECK(h.node(2).label->id == "mammal");
  CHECK(h.node(2).label->name == "mammal");
  CHECK(h.node(0).label->id == "dog");
  CHECK(h.node(1).label->id == "cat");
}

TEST_CASE("multiple inheritance records tied alternatives") {
  const Taxonomy tax({{"a", "p"}, {"a", "q"}, {"b", "p"}, {"b", "q"}},
                     {{"a", "a"}, {"b", "b"}, {"p", "p"}, {"q", "q"}});
  const Hierarchy h = label_nodes(flat_hierarchy(2), tax, {"a", "b"});
  CHECK(h.node(2).label->id == "p");
  CHECK(h.node(2).label->alternatives == std::vector<std::string>{"q"});
}

TEST_CASE("unresolvable class id is invalid input") {
  CHECK_THROWS_AS(label_nodes(flat_hierarchy(2), small_taxonomy(), {"dog", "unicorn"}), Error);
}

TEST_CASE("induced cifar-like tree: root label is an ancestor of every class") {
  std::mt19937_64 rng(4);
  const auto classes = cifar_classes();
  const Taxonomy tax = cifar_taxonomy();
  const Hierarchy h = label_nodes(induce_hierarchy(ClassWeights(synth::gaussian_matrix(10, 6, rng))), tax, classes);
  const std::string root = h.node(h.root()).label->id;
  for (const auto& c : classes) CHECK(tax.ancestor_distances(c).count(root) == 1);
}

TEST_CASE("property: labels of random 8-class trees equal intersected ancestor sets") {
  std::mt19937_64 rng(8);
  int checked = 0;
  for (int trial = 0; trial < 500 && checked < 40; ++trial) {
    auto rt = random_taxonomy(16, rng);
    if (rt.classes.size() < 8) continue;
    rt.classes.resize(8);
    ++checked;
    const Hierarchy h = label_nodes(synth::random_binary_tree(8, rng), rt.taxonomy, rt.classes);
    const oracle::AncestorClosure closure(rt.edges, rt.concepts);
    for (const Node& n : h.nodes()) {
      std::vector<std::string> members;
      for (int k : h.leaves_under(n.id)) members.push_back(rt.classes[static_cast<std::size_t>(k)]);
      REQUIRE(n.label.has_value());
      CHECK(n.label->id == closure.earliest_common(members));
    }
  }
  CHECK(checked == 40);
}

TEST_SUITE_END();
