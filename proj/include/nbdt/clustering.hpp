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

#include <string_view>
#include <vector>

#include "nbdt/hierarchy.hpp"

namespace nbdt {

enum class Linkage { ward, average, complete };

Linkage parse_linkage(std::string_view name);
const char* to_string(Linkage linkage);

// Merge costs closer than this are treated as ties.
inline constexpr double kMergeTieTolerance = 1e-12;

// One agglomeration step. Clusters are named by the ids the resulting tree
// uses: 0..n-1 for singletons, n+s for the cluster created at step s.
struct MergeStep {
  int left = 0;   // cluster holding the smaller leaf index
  int right = 0;
  double cost = 0.0;
  bool operator==(const MergeStep&) const = default;
};

// Agglomerates the given points (rows) under `linkage`.
//
// Costs: Ward uses the Lance-Williams recurrence seeded with squared Euclidean
// distances, i.e. 2|A||B|/(|A|+|B|) * |c_A - c_B|^2; average and complete use
// plain Euclidean distances. Each step takes every pair within
// kMergeTieTolerance of the minimum cost and merges the one whose pair of
// smallest member leaves is lexicographically lowest.
std::vector<MergeStep> agglomerate(const Matrix& points, Linkage linkage = Linkage::ward);

// Binary hierarchy from a merge trace over n points: leaves 0..n-1, inner
// node n+s for step s, root 2n-2.
Hierarchy hierarchy_from_merges(std::size_t num_points, const std::vector<MergeStep>& merges);

// Clusters the l2-normalized class rows, then attaches the raw rows as
// leaf weights and subtree means as inner weights.
Hierarchy induce_hierarchy(const ClassWeights& weights, Linkage linkage = Linkage::ward);

Matrix normalize_rows(const Matrix& m);

}  // namespace nbdt
