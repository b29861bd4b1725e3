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


#include "nbdt/loss.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "nbdt/error.hpp"
#include "nbdt/inference.hpp"

namespace nbdt {

LossMode parse_loss_mode(std::string_view name) {
  if (name == "none") return LossMode::none;
  if (name == "soft") return LossMode::soft;
  if (name == "hard") return LossMode::hard;
  fail(ErrorKind::invalid_config, "unknown loss mode '" + std::string(name) + "'");
}

const char* to_string(LossMode mode) {
  switch (mode) {
    case LossMode::none: return "none";
    case LossMode::soft: return "soft";
    case LossMode::hard: return "hard";
  }
  return "?";
}

LossConfig LossConfig::defaults(LossMode mode, int horizon, double soft_omega_end) {
  LossConfig cfg;
  cfg.mode = mode;
  cfg.horizon = horizon;
  cfg.omega_end = mode == LossMode::hard ? kHardLossWeightFactor * soft_omega_end : soft_omega_end;
  if (mode == LossMode::none) {
    cfg.omega_end = 0.0;
    cfg.beta_end = 1.0;
  }
  return cfg;
}

void LossConfig::validate() const {
  auto check = [](bool ok, const std::string& msg) {
    if (!ok) fail(ErrorKind::invalid_config, msg);
  };
  check(std::isfinite(omega_start) && omega_start >= 0.0, "omega_start must be >= 0");
  check(std::isfinite(omega_end) && omega_end >= 0.0, "omega_end must be >= 0");
  check(beta_start >= 0.0 && beta_start <= 1.0, "beta_start must lie in [0, 1]");
  check(beta_end >= 0.0 && beta_end <= 1.0, "beta_end must lie in [0, 1]");
  check(horizon >= 1, "horizon must be >= 1");
}

ScheduledWeights schedule_weights(double t, const LossConfig& cfg) {
  cfg.validate();
  const double T = static_cast<double>(cfg.horizon);
  if (!(t > 0.0)) return {cfg.beta_start, cfg.omega_start};
  if (t >= T) return {cfg.beta_end, cfg.omega_end};
  const double f = t / T;
  return {cfg.beta_start + (cfg.beta_end - cfg.beta_start) * f,
          cfg.omega_start + (cfg.omega_end - cfg.omega_start) * f};
}

namespace {

enum class Term { flat, soft_tree, hard_tree };

void check_batch(const Matrix& weights, const Matrix& batch, std::span<const int> labels) {
  require(weights.rows() >= 2 && weights.cols() >= 1, "weights must be K x D with K >= 2");
  require(batch.rows() >= 1, "empty batch");
  require(batch.cols() == weights.cols(), "batch dimension " + std::to_string(batch.cols()) +
                                              " does not match weight dimension " +
                                              std::to_string(weights.cols()));
  require(labels.size() == batch.rows(), "label count does not match batch size");
  for (int y : labels)
    require(y >= 0 && static_cast<std::size_t>(y) < weights.rows(),
            "label " + std::to_string(y) + " out of range");
}

// Loss of one sample given its logits; writes dloss/dlogits into grad_logits.
double sample_loss(const Hierarchy* tree, Term term, std::span<const double> logits, int label,
                   std::vector<double>* grad_logits) {
  if (term == Term::flat) {
    const auto ls = log_softmax(logits);
    if (grad_logits) {
      for (std::size_t k = 0; k < ls.size(); ++k) (*grad_logits)[k] = std::exp(ls[k]);
      (*grad_logits)[static_cast<std::size_t>(label)] -= 1.0;
    }
    return -ls[static_cast<std::size_t>(label)];
  }

  const auto path = tree->path_to_class(label);
  const std::size_t decisions = path.size() - 1;
  const double scale = term == Term::hard_tree ? 1.0 / static_cast<double>(decisions) : 1.0;
  if (grad_logits) std::fill(grad_logits->begin(), grad_logits->end(), 0.0);
  double loss = 0.0;
  for (std::size_t step = 0; step < decisions; ++step) {
    const Node& node = tree->node(path[step]);
    const int next = path[step + 1];
    const auto scores = child_scores_from_logits(*tree, node.id, logits);
    const auto ls = log_softmax(scores);
    const auto target = static_cast<std::size_t>(
        std::find(node.children.begin(), node.children.end(), next) - node.children.begin());
    loss -= scale * ls[target];
    if (!grad_logits) continue;
    // d(-log p_target)/d score_j = p_j - [j == target]; score_j averages the
    // logits under child j.
    for (std::size_t j = 0; j < ls.size(); ++j) {
      const double g = scale * (std::exp(ls[j]) - (j == target ? 1.0 : 0.0));
      const auto& leaves = tree->leaves_under(node.children[j]);
      const double share = g / static_cast<double>(leaves.size());
      for (int k : leaves) (*grad_logits)[static_cast<std::size_t>(k)] += share;
    }
  }
  return loss;
}

struct TermResult {
  double loss = 0.0;
  Matrix gradient;
};

TermResult evaluate(const Hierarchy* tree, Term term, const Matrix& weights, const Matrix& batch,
                    std::span<const int> labels, bool with_gradient) {
  if (term != Term::flat) {
    require(tree != nullptr, "tree loss needs a hierarchy");
    require(tree->num_classes() == weights.rows(),
            "tree has " + std::to_string(tree->num_classes()) + " leaves but W has " +
                std::to_string(weights.rows()) + " rows");
  }
  const std::size_t K = weights.rows(), D = weights.cols(), M = batch.rows();
  TermResult out;
  if (with_gradient) out.gradient = Matrix(K, D, 0.0);
  std::vector<double> grad_logits(K);
  const double inv_m = 1.0 / static_cast<double>(M);
  for (std::size_t i = 0; i < M; ++i) {
    const auto x = batch.row(i);
    const auto logits = multiply(weights, x);
    out.loss += sample_loss(tree, term, logits, labels[i], with_gradient ? &grad_logits : nullptr);
    if (!with_gradient) continue;
    for (std::size_t k = 0; k < K; ++k) {
      const double g = grad_logits[k] * inv_m;
      if (g == 0.0) continue;
      auto row = out.gradient.row(k);
      for (std::size_t d = 0; d < D; ++d) row[d] += g * x[d];
    }
  }
  out.loss *= inv_m;
  return out;
}

LossValue single_term(const Hierarchy* tree, Term term, const Matrix& weights, const Matrix& batch,
                      std::span<const int> labels, bool with_gradient) {
  check_batch(weights, batch, labels);
  TermResult r = evaluate(tree, term, weights, batch, labels, with_gradient);
  LossValue v;
  v.total = r.loss;
  if (term == Term::flat) {
    v.original_term = r.loss;
  } else {
    v.tree_term = r.loss;
  }
  if (with_gradient) v.gradient = std::move(r.gradient);
  return v;
}

}  // namespace

LossValue softmax_cross_entropy(const Matrix& weights, const Matrix& batch,
                                std::span<const int> labels, bool with_gradient) {
  return single_term(nullptr, Term::flat, weights, batch, labels, with_gradient);
}

LossValue soft_tree_loss(const Hierarchy& tree, const Matrix& weights, const Matrix& batch,
                         std::span<const int> labels, bool with_gradient) {
  return single_term(&tree, Term::soft_tree, weights, batch, labels, with_gradient);
}

LossValue hard_tree_loss(const Hierarchy& tree, const Matrix& weights, const Matrix& batch,
                         std::span<const int> labels, bool with_gradient) {
  return single_term(&tree, Term::hard_tree, weights, batch, labels, with_gradient);
}

LossValue combined_loss(const Hierarchy* tree, const Matrix& weights, const Matrix& batch,
                        std::span<const int> labels, double t, const LossConfig& cfg,
                        bool with_gradient) {
  check_batch(weights, batch, labels);
  if (cfg.mode != LossMode::none && tree == nullptr)
    fail(ErrorKind::invalid_config, "loss mode '" + std::string(to_string(cfg.mode)) +
                                        "' needs a hierarchy");
  const auto [beta, omega] = schedule_weights(t, cfg);

  LossValue v;
  TermResult original = evaluate(nullptr, Term::flat, weights, batch, labels, with_gradient);
  v.original_term = original.loss;
  TermResult tree_part;
  if (cfg.mode != LossMode::none) {
    tree_part = evaluate(tree, cfg.mode == LossMode::soft ? Term::soft_tree : Term::hard_tree,
                         weights, batch, labels, with_gradient);
    v.tree_term = tree_part.loss;
  }
  v.total = beta * v.original_term + omega * v.tree_term;
  if (with_gradient) {
    Matrix g = std::move(original.gradient);
    for (double& e : g.data()) e *= beta;
    if (cfg.mode != LossMode::none) {
      for (std::size_t i = 0; i < g.data().size(); ++i) g.data()[i] += omega * tree_part.gradient.data()[i];
    }
    v.gradient = std::move(g);
  }
  return v;
}

}  // namespace nbdt
