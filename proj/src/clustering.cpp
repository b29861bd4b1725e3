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


#include "nbdt/clustering.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <tuple>
#include <utility>

#include "nbdt/error.hpp"

namespace nbdt {

Linkage parse_linkage(std::string_view name) {
  if (name == "ward") return Linkage::ward;
  if (name == "average") return Linkage::average;
  if (name == "complete") return Linkage::complete;
  fail(ErrorKind::invalid_input, "unknown linkage '" + std::string(name) + "'");
}

const char* to_string(Linkage linkage) {
  switch (linkage) {
    case Linkage::ward: return "ward";
    case Linkage::average: return "average";
    case Linkage::complete: return "complete";
  }
  return "?";
}

Matrix normalize_rows(const Matrix& m) {
  Matrix out = m;
  for (std::size_t r = 0; r < out.rows(); ++r) {
    auto row = out.row(r);
    const double norm = std::sqrt(dot(row, row));
    require(norm > 0.0, "cannot normalize zero row " + std::to_string(r));
    for (double& v : row) v /= norm;
  }
  return out;
}

namespace {

// Dissimilarity matrix with a cached exact minimum per active row.
class Agglomerator {
 public:
  Agglomerator(const Matrix& points, Linkage linkage)
      : n_(points.rows()),
        linkage_(linkage),
        dist_(n_, n_, 0.0),
        active_(n_, true),
        size_(n_, 1),
        min_leaf_(n_),
        cluster_id_(n_),
        row_min_(n_, kInf),
        nearest_(n_, -1) {
    for (std::size_t i = 0; i < n_; ++i) {
      min_leaf_[i] = static_cast<int>(i);
      cluster_id_[i] = static_cast<int>(i);
      for (std::size_t j = i + 1; j < n_; ++j) {
        double sq = 0.0;
        auto a = points.row(i), b = points.row(j);
        for (std::size_t d = 0; d < a.size(); ++d) sq += (a[d] - b[d]) * (a[d] - b[d]);
        const double v = linkage_ == Linkage::ward ? sq : std::sqrt(sq);
        dist_(i, j) = v;
        dist_(j, i) = v;
      }
    }
    for (std::size_t i = 0; i < n_; ++i) refresh_row(i);
  }

  std::vector<MergeStep> run() {
    std::vector<MergeStep> trace;
    trace.reserve(n_ - 1);
    for (std::size_t step = 0; step + 1 < n_; ++step) {
      auto [a, b, cost] = select();
      trace.push_back({cluster_id_[a], cluster_id_[b], cost});
      merge(a, b, static_cast<int>(n_ + step));
    }
    return trace;
  }

 private:
  static constexpr double kInf = std::numeric_limits<double>::infinity();

  std::pair<int, int> key(std::size_t i, std::size_t j) const {
    return std::minmax(min_leaf_[i], min_leaf_[j]);
  }

  void refresh_row(std::size_t k) {
    row_min_[k] = kInf;
    nearest_[k] = -1;
    for (std::size_t j = 0; j < n_; ++j) {
      if (j == k || !active_[j]) continue;
      if (dist_(k, j) < row_min_[k]) {
        row_min_[k] = dist_(k, j);
        nearest_[k] = static_cast<int>(j);
      }
    }
  }

  // Returns slots (a, b) with min_leaf_[a] < min_leaf_[b].
  std::tuple<std::size_t, std::size_t, double> select() const {
    double best = kInf;
    for (std::size_t k = 0; k < n_; ++k)
      if (active_[k]) best = std::min(best, row_min_[k]);
    const double limit = best + kMergeTieTolerance;
    std::size_t ba = 0, bb = 0;
    std::pair<int, int> best_key{std::numeric_limits<int>::max(), 0};
    for (std::size_t k = 0; k < n_; ++k) {
      if (!active_[k] || row_min_[k] > limit) continue;
      for (std::size_t j = 0; j < n_; ++j) {
        if (j == k || !active_[j] || dist_(k, j) > limit) continue;
        const auto candidate = key(k, j);
        if (candidate < best_key) {
          best_key = candidate;
          ba = k;
          bb = j;
        }
      }
    }
    if (min_leaf_[ba] > min_leaf_[bb]) std::swap(ba, bb);
    return {ba, bb, dist_(ba, bb)};
  }

  double updated(std::size_t k, std::size_t a, std::size_t b) const {
    const double dka = dist_(k, a), dkb = dist_(k, b);
    const double na = static_cast<double>(size_[a]), nb = static_cast<double>(size_[b]);
    switch (linkage_) {
      case Linkage::ward: {
        const double nk = static_cast<double>(size_[k]);
        return ((na + nk) * dka + (nb + nk) * dkb - nk * dist_(a, b)) / (na + nb + nk);
      }
      case Linkage::average:
        return (na * dka + nb * dkb) / (na + nb);
      case Linkage::complete:
        return std::max(dka, dkb);
    }
    return kInf;
  }

  // Cluster b folds into slot a.
  void merge(std::size_t a, std::size_t b, int new_id) {
    for (std::size_t k = 0; k < n_; ++k) {
      if (!active_[k] || k == a || k == b) continue;
      const double v = updated(k, a, b);
      dist_(k, a) = v;
      dist_(a, k) = v;
    }
    active_[b] = false;
    size_[a] += size_[b];
    min_leaf_[a] = std::min(min_leaf_[a], min_leaf_[b]);
    cluster_id_[a] = new_id;

    const int ia = static_cast<int>(a), ib = static_cast<int>(b);
    for (std::size_t k = 0; k < n_; ++k) {
      if (!active_[k] || k == a) continue;
      if (nearest_[k] == ia || nearest_[k] == ib) {
        refresh_row(k);
      } else if (dist_(k, a) < row_min_[k]) {
        row_min_[k] = dist_(k, a);
        nearest_[k] = ia;
      }
    }
    refresh_row(a);
  }

  std::size_t n_;
  Linkage linkage_;
  Matrix dist_;
  std::vector<bool> active_;
  std::vector<std::size_t> size_;
  std::vector<int> min_leaf_;
  std::vector<int> cluster_id_;
  std::vector<double> row_min_;
  std::vector<int> nearest_;
};

}  // namespace

std::vector<MergeStep> agglomerate(const Matrix& points, Linkage linkage) {
  require(points.rows() >= 2, "need at least 2 points to cluster");
  require(all_finite(points.data()), "non-finite coordinate in clustering input");
  return Agglomerator(points, linkage).run();
}

Hierarchy hierarchy_from_merges(std::size_t num_points, const std::vector<MergeStep>& merges) {
  require(num_points >= 2, "need at least 2 leaves");
  require(merges.size() == num_points - 1, "a binary tree over n leaves needs n-1 merges");
  std::vector<Node> nodes(2 * num_points - 1);
  for (std::size_t i = 0; i < nodes.size(); ++i) nodes[i].id = static_cast<int>(i);
  for (std::size_t k = 0; k < num_points; ++k) nodes[k].class_index = static_cast<int>(k);
  for (std::size_t s = 0; s < merges.size(); ++s) {
    const int limit = static_cast<int>(num_points + s);
    require(merges[s].left >= 0 && merges[s].left < limit && merges[s].right >= 0 &&
                merges[s].right < limit,
            "merge step " + std::to_string(s) + " references a cluster not yet formed");
    nodes[num_points + s].children = {merges[s].left, merges[s].right};
  }
  return Hierarchy(std::move(nodes), static_cast<int>(2 * num_points - 2));
}

Hierarchy induce_hierarchy(const ClassWeights& weights, Linkage linkage) {
  const ClassWeights checked(weights.rows, weights.class_ids);
  const auto merges = agglomerate(normalize_rows(checked.rows), linkage);
  return attach_weights(hierarchy_from_merges(checked.num_classes(), merges), checked.rows);
}

}  // namespace nbdt
