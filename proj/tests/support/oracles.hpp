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

// Independent reference computations used to freeze and cross-check
// expected values. Nothing here calls into the code path it checks.

#include <algorithm>
#include <cmath>
#include <functional>
#include <limits>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "nbdt/clustering.hpp"
#include "nbdt/hierarchy.hpp"
#include "nbdt/matrix.hpp"

namespace nbdt::oracle {

// O(n^3)-style agglomerator: every step recomputes every pairwise linkage
// cost from cluster membership.
inline std::vector<MergeStep> reference_agglomerate(const Matrix& points, Linkage linkage) {
  const std::size_t n = points.rows(), d = points.cols();
  struct Cluster {
    int id;
    std::vector<std::size_t> members;
  };
  std::vector<Cluster> clusters;
  for (std::size_t i = 0; i < n; ++i) clusters.push_back({static_cast<int>(i), {i}});

  auto euclid = [&](std::size_t a, std::size_t b) {
    double s = 0;
    for (std::size_t k = 0; k < d; ++k) s += (points(a, k) - points(b, k)) * (points(a, k) - points(b, k));
    return std::sqrt(s);
  };
  auto cost = [&](const Cluster& a, const Cluster& b) {
    if (linkage == Linkage::ward) {
      std::vector<double> ca(d, 0.0), cb(d, 0.0);
      for (auto i : a.members)
        for (std::size_t k = 0; k < d; ++k) ca[k] += points(i, k) / a.members.size();
      for (auto i : b.members)
        for (std::size_t k = 0; k < d; ++k) cb[k] += points(i, k) / b.members.size();
      double sq = 0;
      for (std::size_t k = 0; k < d; ++k) sq += (ca[k] - cb[k]) * (ca[k] - cb[k]);
      const double na = a.members.size(), nb = b.members.size();
      return 2.0 * na * nb / (na + nb) * sq;
    }
    double agg = 0.0;
    for (auto i : a.members)
      for (auto j : b.members) {
        const double e = euclid(i, j);
        agg = linkage == Linkage::complete ? std::max(agg, e) : agg + e;
      }
    if (linkage == Linkage::average) agg /= static_cast<double>(a.members.size() * b.members.size());
    return agg;
  };
  auto min_member = [](const Cluster& c) {
    return static_cast<int>(*std::min_element(c.members.begin(), c.members.end()));
  };

  std::vector<MergeStep> trace;
  int next_id = static_cast<int>(n);
  while (clusters.size() > 1) {
    double best = std::numeric_limits<double>::infinity();
    std::vector<std::vector<double>> c(clusters.size(), std::vector<double>(clusters.size()));
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        c[i][j] = cost(clusters[i], clusters[j]);
        best = std::min(best, c[i][j]);
      }
    std::pair<int, int> best_key{std::numeric_limits<int>::max(), 0};
    std::size_t bi = 0, bj = 0;
    for (std::size_t i = 0; i < clusters.size(); ++i)
      for (std::size_t j = i + 1; j < clusters.size(); ++j) {
        if (c[i][j] > best + kMergeTieTolerance) continue;
        const int a = min_member(clusters[i]), b = min_member(clusters[j]);
        const std::pair<int, int> key{std::min(a, b), std::max(a, b)};
        if (key < best_key) {
          best_key = key;
          bi = i;
          bj = j;
        }
      }
    if (min_member(clusters[bi]) > min_member(clusters[bj])) std::swap(bi, bj);
    trace.push_back({clusters[bi].id, clusters[bj].id, c[std::min(bi, bj)][std::max(bi, bj)]});
    Cluster merged{next_id++, clusters[bi].members};
    merged.members.insert(merged.members.end(), clusters[bj].members.begin(), clusters[bj].members.end());
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(std::max(bi, bj)));
    clusters.erase(clusters.begin() + static_cast<std::ptrdiff_t>(std::min(bi, bj)));
    clusters.push_back(std::move(merged));
  }
  return trace;
}

// Mean of the raw rows of every leaf found by explicit descent from `id`.
inline std::vector<double> subtree_mean(const Hierarchy& tree, int id, const Matrix& rows) {
  std::vector<int> leaves;
  std::function<void(int)> walk = [&](int n) {
    const Node& node = tree.nodes()[static_cast<std::size_t>(n)];
    if (node.children.empty()) {
      leaves.push_back(*node.class_index);
      return;
    }
    for (int c : node.children) walk(c);
  };
  walk(id);
  std::vector<double> mean(rows.cols(), 0.0);
  for (int k : leaves)
    for (std::size_t d = 0; d < rows.cols(); ++d) mean[d] += rows(static_cast<std::size_t>(k), d);
  for (double& v : mean) v /= static_cast<double>(leaves.size());
  return mean;
}

// p(k) by enumerating every root-to-leaf path and multiplying plain softmax
// probabilities computed without max subtraction.
inline std::vector<double> enumerate_path_products(const Hierarchy& tree, const std::vector<double>& x) {
  std::vector<double> probs(tree.num_classes(), 0.0);
  std::function<void(int, double)> walk = [&](int n, double acc) {
    const Node& node = tree.nodes()[static_cast<std::size_t>(n)];
    if (node.children.empty()) {
      probs[static_cast<std::size_t>(*node.class_index)] = acc;
      return;
    }
    std::vector<double> e;
    double z = 0;
    for (int c : node.children) {
      const auto& w = *tree.nodes()[static_cast<std::size_t>(c)].weight;
      double s = 0;
      for (std::size_t d = 0; d < x.size(); ++d) s += w[d] * x[d];
      e.push_back(std::exp(s));
      z += e.back();
    }
    for (std::size_t j = 0; j < node.children.size(); ++j) walk(node.children[j], acc * e[j] / z);
  };
  walk(tree.root(), 1.0);
  return probs;
}

// Greedy descent re-implemented step by step on raw inner products.
inline std::vector<int> greedy_path(const Hierarchy& tree, const std::vector<double>& x) {
  std::vector<int> path{tree.root()};
  while (!tree.nodes()[static_cast<std::size_t>(path.back())].children.empty()) {
    const auto& kids = tree.nodes()[static_cast<std::size_t>(path.back())].children;
    int best = kids.front();
    double best_s = -std::numeric_limits<double>::infinity();
    for (int c : kids) {
      const auto& w = *tree.nodes()[static_cast<std::size_t>(c)].weight;
      double s = 0;
      for (std::size_t d = 0; d < x.size(); ++d) s += w[d] * x[d];
      if (s > best_s) {
        best_s = s;
        best = c;
      }
    }
    path.push_back(best);
  }
  return path;
}

// Central finite differences of f over every entry of w.
inline Matrix finite_difference(const std::function<double(const Matrix&)>& f, const Matrix& w,
                                double h = 1e-5) {
  Matrix g(w.rows(), w.cols());
  Matrix probe = w;
  for (std::size_t i = 0; i < w.data().size(); ++i) {
    const double orig = probe.data()[i];
    probe.data()[i] = orig + h;
    const double up = f(probe);
    probe.data()[i] = orig - h;
    const double down = f(probe);
    probe.data()[i] = orig;
    g.data()[i] = (up - down) / (2 * h);
  }
  return g;
}

// max |a - b| / max(|a|, |b|, floor) over entries.
inline double max_relative_error(const Matrix& a, const Matrix& b, double floor = 1e-6) {
  double worst = 0;
  for (std::size_t i = 0; i < a.data().size(); ++i) {
    const double x = a.data()[i], y = b.data()[i];
    worst = std::max(worst, std::abs(x - y) / std::max({std::abs(x), std::abs(y), floor}));
  }
  return worst;
}

// Ancestor sets by transitive closure over an explicit reachability matrix,
// with depths from repeated relaxation.
struct AncestorClosure {
  std::vector<std::string> ids;
  std::map<std::string, std::size_t> index;
  std::vector<std::vector<int>> dist;  // dist[a][b]: upward hops from a to b, -1 if unreachable

  AncestorClosure(const std::set<std::pair<std::string, std::string>>& edges,
                  const std::vector<std::string>& concepts)
      : ids(concepts) {
    for (std::size_t i = 0; i < ids.size(); ++i) index[ids[i]] = i;
    const std::size_t n = ids.size();
    const int inf = 1 << 20;
    std::vector<std::vector<int>> d(n, std::vector<int>(n, inf));
    for (std::size_t i = 0; i < n; ++i) d[i][i] = 0;
    for (const auto& [c, p] : edges) d[index.at(c)][index.at(p)] = 1;
    for (std::size_t k = 0; k < n; ++k)
      for (std::size_t i = 0; i < n; ++i)
        for (std::size_t j = 0; j < n; ++j) d[i][j] = std::min(d[i][j], d[i][k] + d[k][j]);
    dist.assign(n, std::vector<int>(n, -1));
    for (std::size_t i = 0; i < n; ++i)
      for (std::size_t j = 0; j < n; ++j)
        if (d[i][j] < inf) dist[i][j] = d[i][j];
  }

  // Earliest shared ancestor: minimize the largest distance, then id.
  std::string earliest_common(const std::vector<std::string>& members) const {
    std::string best;
    int best_depth = 1 << 30;
    for (std::size_t a = 0; a < ids.size(); ++a) {
      int depth = 0;
      bool shared = true;
      for (const auto& m : members) {
        const int h = dist[index.at(m)][a];
        if (h < 0) {
          shared = false;
          break;
        }
        depth = std::max(depth, h);
      }
      if (shared && (depth < best_depth || (depth == best_depth && ids[a] < best))) {
        best_depth = depth;
        best = ids[a];
      }
    }
    return best;
  }
};

// Information gain of one candidate split, recounted from scratch.
inline double split_gain(const Matrix& x, const std::vector<int>& y, std::size_t feature, double threshold,
                         std::size_t num_classes) {
  auto entropy = [&](const std::vector<double>& counts) {
    double total = 0, h = 0;
    for (double c : counts) total += c;
    if (total == 0) return 0.0;
    for (double c : counts)
      if (c > 0) h -= (c / total) * std::log(c / total);
    return h;
  };
  std::vector<double> all(num_classes, 0), lo(num_classes, 0), hi(num_classes, 0);
  for (std::size_t i = 0; i < y.size(); ++i) {
    all[static_cast<std::size_t>(y[i])] += 1;
    (x(i, feature) <= threshold ? lo : hi)[static_cast<std::size_t>(y[i])] += 1;
  }
  double nl = 0, nh = 0;
  for (std::size_t k = 0; k < num_classes; ++k) {
    nl += lo[k];
    nh += hi[k];
  }
  const double n = nl + nh;
  return entropy(all) - nl / n * entropy(lo) - nh / n * entropy(hi);
}

struct ExhaustiveSplit {
  std::size_t feature = 0;
  double threshold = 0;
  double gain = -1;
};

// Tries every midpoint between distinct sorted values of every feature.
inline ExhaustiveSplit exhaustive_best_split(const Matrix& x, const std::vector<int>& y, std::size_t num_classes) {
  ExhaustiveSplit best;
  for (std::size_t f = 0; f < x.cols(); ++f) {
    std::set<double> values;
    for (std::size_t i = 0; i < x.rows(); ++i) values.insert(x(i, f));
    for (auto it = values.begin(); std::next(it) != values.end(); ++it) {
      const double t = *it + (*std::next(it) - *it) / 2.0;
      const double g = split_gain(x, y, f, t, num_classes);
      if (g > best.gain + 1e-12) best = {f, t, g};
    }
  }
  return best;
}

}  // namespace nbdt::oracle
