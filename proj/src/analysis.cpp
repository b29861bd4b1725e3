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


#include "nbdt/analysis.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <set>

#include "nbdt/error.hpp"
#include "nbdt/parallel.hpp"

namespace nbdt {

double node_hypothesis_accuracy(const Hierarchy& tree, const SuperclassSpec& spec) {
  const Node& node = tree.node(spec.node_id);
  require(!node.is_leaf(), "hypothesis node " + std::to_string(spec.node_id) + " is a leaf");
  require(spec.ood_samples.rows() >= 1, "empty OOD set");
  require(spec.ood_labels.size() == spec.ood_samples.rows(), "OOD label count does not match samples");
  std::set<std::string> superclasses;
  for (const auto& [child, sc] : spec.hypothesis) {
    require(std::find(node.children.begin(), node.children.end(), child) != node.children.end(),
            "hypothesis names node " + std::to_string(child) + ", which is not a child of node " +
                std::to_string(spec.node_id));
    superclasses.insert(sc);
  }
  for (const auto& label : spec.ood_labels)
    require(superclasses.count(label) != 0, "OOD label '" + label + "' is not in the hypothesis");

  std::size_t hits = 0;
  for (std::size_t i = 0; i < spec.ood_samples.rows(); ++i) {
    const auto scores = child_scores(tree, spec.node_id, spec.ood_samples.row(i));
    const int routed = node.children[argmax(scores)];
    const auto it = spec.hypothesis.find(routed);
    hits += it != spec.hypothesis.end() && it->second == spec.ood_labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(spec.ood_samples.rows());
}

double baseline_superclass_accuracy(const Matrix& weights, const Matrix& ood,
                                    std::span<const std::string> labels,
                                    const std::map<int, std::string>& class_to_superclass) {
  require(ood.rows() >= 1, "empty OOD set");
  require(labels.size() == ood.rows(), "OOD label count does not match samples");
  require(ood.cols() == weights.cols(), "OOD dimension does not match weights");
  for (std::size_t k = 0; k < weights.rows(); ++k)
    require(class_to_superclass.count(static_cast<int>(k)) != 0,
            "class " + std::to_string(k) + " has no superclass");
  std::size_t hits = 0;
  for (std::size_t i = 0; i < ood.rows(); ++i) {
    const int k = static_cast<int>(argmax(multiply(weights, ood.row(i))));
    hits += class_to_superclass.at(k) == labels[i];
  }
  return static_cast<double>(hits) / static_cast<double>(ood.rows());
}

double normalized_entropy(std::span<const double> probs) {
  require(!probs.empty(), "entropy of an empty distribution");
  if (probs.size() == 1) return 0.0;
  double h = 0.0;
  for (double p : probs) h -= p * std::log(std::max(p, 1e-300));
  return std::clamp(h / std::log(static_cast<double>(probs.size())), 0.0, 1.0);
}

namespace {

PathEntropy entropy_of(const PathResult& r) {
  PathEntropy out;
  for (const auto& nd : r.per_node) {
    out.nodes.push_back(nd.node_id);
    out.entropies.push_back(normalized_entropy(nd.probs));
  }
  if (out.entropies.size() >= 2) {
    const auto [lo, hi] = std::minmax_element(out.entropies.begin(), out.entropies.end());
    out.score = *hi - *lo;
  }
  return out;
}

}  // namespace

PathEntropy path_entropy_score(const Hierarchy& tree, std::span<const double> x) {
  return entropy_of(soft_class_distribution(tree, x));
}

PathEntropy path_entropy_from_logits(const Hierarchy& tree, std::span<const double> logits) {
  return entropy_of(soft_predict_from_logits(tree, logits));
}

double baseline_ambiguity_score(std::span<const double> logits) {
  require(logits.size() >= 3, "baseline ambiguity needs at least 3 classes");
  require(all_finite(logits), "non-finite logit");
  std::vector<double> p = softmax(logits);
  std::vector<std::size_t> idx(p.size());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + 2, idx.end(), [&](std::size_t a, std::size_t b) {
    return p[a] > p[b] || (p[a] == p[b] && a < b);
  });
  const double p1 = p[idx[0]], p2 = p[idx[1]];
  const double pair = p1 + p2;
  const double top2[] = {p1 / pair, p2 / pair};
  const double first = normalized_entropy(top2);
  p[idx[0]] = p[idx[1]] = pair / 2.0;
  const double second = normalized_entropy(p);
  return first - second;
}

AmbiguityMethod parse_ambiguity_method(std::string_view name) {
  if (name == "nbdt" || name == "nbdt_path_entropy") return AmbiguityMethod::nbdt_path_entropy;
  if (name == "baseline" || name == "baseline_top2") return AmbiguityMethod::baseline_top2;
  fail(ErrorKind::invalid_input, "unknown ambiguity method '" + std::string(name) + "'");
}

const char* to_string(AmbiguityMethod method) {
  return method == AmbiguityMethod::nbdt_path_entropy ? "nbdt_path_entropy" : "baseline_top2";
}

AmbiguityReport rank_ambiguous(const Hierarchy& tree, const Matrix& data, InputKind kind,
                               AmbiguityMethod method, const std::vector<std::string>& sample_ids,
                               std::size_t threads) {
  require(data.rows() >= 1, "empty dataset");
  require(sample_ids.empty() || sample_ids.size() == data.rows(),
          "sample id count does not match dataset");
  if (kind == InputKind::features) {
    require(tree.has_weights(), "feature input needs a weighted hierarchy");
    require(data.cols() == tree.dimension(), "feature dimension does not match hierarchy");
  } else {
    require(data.cols() == tree.num_classes(), "logit count does not match hierarchy classes");
  }
  Matrix leaf_weights;
  if (kind == InputKind::features && method == AmbiguityMethod::baseline_top2) {
    leaf_weights = Matrix(tree.num_classes(), tree.dimension());
    for (std::size_t k = 0; k < tree.num_classes(); ++k) {
      const auto w = tree.weight(tree.leaf_of_class(static_cast<int>(k)));
      std::copy(w.begin(), w.end(), leaf_weights.row(k).begin());
    }
  }

  AmbiguityReport report;
  report.method = method;
  report.ranked.resize(data.rows());
  parallel_for(data.rows(), threads, [&](std::size_t i) {
    AmbiguityEntry& e = report.ranked[i];
    e.index = i;
    e.sample_id = sample_ids.empty() ? std::to_string(i) : sample_ids[i];
    const auto row = data.row(i);
    if (method == AmbiguityMethod::nbdt_path_entropy) {
      PathEntropy pe = kind == InputKind::features ? path_entropy_score(tree, row)
                                                   : path_entropy_from_logits(tree, row);
      e.score = pe.score;
      e.entropies = std::move(pe.entropies);
    } else {
      e.score = kind == InputKind::features ? baseline_ambiguity_score(multiply(leaf_weights, row))
                                            : baseline_ambiguity_score(row);
    }
  });
  const bool by_id = !sample_ids.empty();
  std::stable_sort(report.ranked.begin(), report.ranked.end(),
                   [by_id](const AmbiguityEntry& a, const AmbiguityEntry& b) {
                     if (a.score != b.score) return a.score > b.score;
                     if (by_id && a.sample_id != b.sample_id) return a.sample_id < b.sample_id;
                     return a.index < b.index;
                   });
  return report;
}

std::vector<std::size_t> max_similarity_examples(const Hierarchy& tree, int node_id,
                                                 const Matrix& pool, std::size_t top_m,
                                                 Similarity similarity) {
  require(pool.rows() >= 1, "empty pool");
  require(top_m <= pool.rows(), "top_m exceeds pool size");
  const auto w = tree.weight(node_id);
  require(pool.cols() == w.size(), "pool dimension does not match node weight");
  const double w_norm = std::sqrt(dot(w, w));
  std::vector<double> sim(pool.rows());
  for (std::size_t i = 0; i < pool.rows(); ++i) {
    const auto x = pool.row(i);
    sim[i] = dot(w, x);
    if (similarity == Similarity::cosine) {
      const double denom = w_norm * std::sqrt(dot(x, x));
      sim[i] = denom > 0.0 ? sim[i] / denom : 0.0;
    }
  }
  std::vector<std::size_t> idx(pool.rows());
  std::iota(idx.begin(), idx.end(), std::size_t{0});
  std::partial_sort(idx.begin(), idx.begin() + static_cast<std::ptrdiff_t>(top_m), idx.end(),
                    [&](std::size_t a, std::size_t b) {
                      return sim[a] > sim[b] || (sim[a] == sim[b] && a < b);
                    });
  idx.resize(top_m);
  return idx;
}

DotAnnotations TraversalCounts::to_annotations(const Hierarchy& tree) const {
  DotAnnotations out;
  for (const Node& n : tree.nodes()) {
    const auto c = visits.at(static_cast<std::size_t>(n.id));
    out.node_text[n.id] = "visits: " + std::to_string(c);
    if (n.id != tree.root()) out.edge_text[n.id] = std::to_string(c);
  }
  return out;
}

TraversalCounts count_traversals(const Hierarchy& tree, std::span<const PathResult> results) {
  TraversalCounts counts;
  counts.visits.assign(tree.size(), 0);
  for (const auto& r : results)
    for (int id : r.path) ++counts.visits.at(static_cast<std::size_t>(id));
  return counts;
}

TraversalCounts traversal_frequencies(const Hierarchy& tree, const Matrix& batch, InputKind kind,
                                      InferenceMode mode, std::size_t threads) {
  require(batch.rows() >= 1, "empty batch");
  const auto results = batch_predict(tree, batch, kind, mode, threads);
  return count_traversals(tree, results);
}

}  // namespace nbdt
