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
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "nbdt/dot.hpp"
#include "nbdt/hierarchy.hpp"
#include "nbdt/inference.hpp"

namespace nbdt {

// Hypothesized meaning of one inner node: which superclass each child stands
// for, plus out-of-distribution samples labeled by superclass.
struct SuperclassSpec {
  int node_id = 0;
  std::map<int, std::string> hypothesis;  // child node id -> superclass
  Matrix ood_samples;
  std::vector<std::string> ood_labels;
};

// Fraction of samples the node routes (argmax child) to the child whose
// hypothesized superclass matches the sample label.
double node_hypothesis_accuracy(const Hierarchy& tree, const SuperclassSpec& spec);

// Fraction of samples whose plain argmax class maps to the sample label.
// Every class 0..K-1 must be mapped.
double baseline_superclass_accuracy(const Matrix& weights, const Matrix& ood,
                                    std::span<const std::string> labels,
                                    const std::map<int, std::string>& class_to_superclass);

// Entropy divided by ln(n); 0 for n = 1.
double normalized_entropy(std::span<const double> probs);

struct PathEntropy {
  double score = 0.0;             // max - min of the entropies
  std::vector<int> nodes;         // inner nodes on the soft-predicted path
  std::vector<double> entropies;  // normalized, one per node
};

PathEntropy path_entropy_score(const Hierarchy& tree, std::span<const double> x);
PathEntropy path_entropy_from_logits(const Hierarchy& tree, std::span<const double> logits);

// Top-2 confusion on plain softmax: the normalized binary entropy of the two
// largest probabilities minus the normalized entropy of the distribution with
// those two entries replaced by their mean. Lies in [-1, 1]; K >= 3.
double baseline_ambiguity_score(std::span<const double> logits);

enum class AmbiguityMethod { nbdt_path_entropy, baseline_top2 };

AmbiguityMethod parse_ambiguity_method(std::string_view name);
const char* to_string(AmbiguityMethod method);

struct AmbiguityEntry {
  std::size_t index = 0;
  std::string sample_id;
  double score = 0.0;
  std::vector<double> entropies;  // path entropies (nbdt method only)
};

struct AmbiguityReport {
  AmbiguityMethod method = AmbiguityMethod::nbdt_path_entropy;
  std::vector<AmbiguityEntry> ranked;  // descending score
};

// Scores every row and sorts by descending score. Ties keep sample id order
// (input order when no ids are given). Feature input needs a weighted tree;
// the baseline then uses the leaf weights as W.
AmbiguityReport rank_ambiguous(const Hierarchy& tree, const Matrix& data, InputKind kind,
                               AmbiguityMethod method,
                               const std::vector<std::string>& sample_ids = {},
                               std::size_t threads = 0);

enum class Similarity { inner_product, cosine };

// Indices of the top_m pool rows most similar to the node's weight, most
// similar first, ties by index.
std::vector<std::size_t> max_similarity_examples(const Hierarchy& tree, int node_id,
                                                 const Matrix& pool, std::size_t top_m,
                                                 Similarity similarity = Similarity::inner_product);

// visits[n] counts samples whose predicted path passes through node n, which
// equals the count on the edge into n. visits[root] = M.
struct TraversalCounts {
  std::vector<std::size_t> visits;

  std::size_t edge(int child) const { return visits.at(static_cast<std::size_t>(child)); }
  DotAnnotations to_annotations(const Hierarchy& tree) const;
};

TraversalCounts traversal_frequencies(const Hierarchy& tree, const Matrix& batch, InputKind kind,
                                      InferenceMode mode, std::size_t threads = 0);
TraversalCounts count_traversals(const Hierarchy& tree, std::span<const PathResult> results);

}  // namespace nbdt
