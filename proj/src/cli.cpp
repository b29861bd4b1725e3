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


#include "nbdt/cli.hpp"

#include <algorithm>
#include <filesystem>
#include <functional>
#include <optional>

#include "CLI11.hpp"
#include "nbdt/analysis.hpp"
#include "nbdt/clustering.hpp"
#include "nbdt/dot.hpp"
#include "nbdt/error.hpp"
#include "nbdt/info_gain.hpp"
#include "nbdt/npy.hpp"
#include "nbdt/serialize.hpp"
#include "nbdt/taxonomy.hpp"
#include "nbdt/train.hpp"

namespace nbdt {

namespace fs = std::filesystem;

namespace {

struct Input {
  std::string features;
  std::string logits;
  std::string sample_ids;

  void add_to(CLI::App* cmd) {
    auto* f = cmd->add_option("--features", features, "M x D feature matrix (.npy)");
    auto* l = cmd->add_option("--logits", logits, "M x K logit matrix (.npy)");
    f->excludes(l);
    cmd->add_option("--sample-ids", sample_ids, "text file with one sample id per line");
  }

  std::pair<Matrix, InputKind> load() const {
    if (features.empty() == logits.empty())
      fail(ErrorKind::invalid_config, "pass exactly one of --features or --logits");
    if (!features.empty()) return {read_matrix(features), InputKind::features};
    return {read_matrix(logits), InputKind::logits};
  }

  std::vector<std::string> ids(std::size_t rows) const {
    if (sample_ids.empty()) return {};
    auto out = read_lines(sample_ids);
    require(out.size() == rows, "sample id file has " + std::to_string(out.size()) +
                                    " lines for " + std::to_string(rows) + " samples");
    return out;
  }
};

void write_json(const std::string& path, const Json& j) { write_file_atomic(path, j.dump(1) + "\n"); }

Json read_json(const std::string& path) {
  try {
    return Json::parse(read_file(path));
  } catch (const Json::parse_error& e) {
    fail(ErrorKind::format_error, path + ": invalid JSON (" + e.what() + ")");
  }
}

Hierarchy hierarchy_with_class_labels(Hierarchy tree, const std::vector<std::string>& class_ids) {
  if (class_ids.empty()) return tree;
  require(class_ids.size() == tree.num_classes(), "class id count does not match hierarchy leaves");
  std::vector<Node> nodes = tree.nodes();
  for (Node& n : nodes)
    if (n.class_index && !n.label)
      n.label = NodeLabel{class_ids[static_cast<std::size_t>(*n.class_index)],
                          class_ids[static_cast<std::size_t>(*n.class_index)], {}};
  return Hierarchy(std::move(nodes), tree.root());
}

TrainResult run_training(const RunConfig& cfg) {
  cfg.check_paths();
  const Matrix features = read_matrix(cfg.features);
  const std::vector<int> labels = read_labels(cfg.labels);
  require(!labels.empty(), "no labels");
  const std::size_t num_classes =
      static_cast<std::size_t>(*std::max_element(labels.begin(), labels.end()) + 1);

  TrainConfig train = cfg.train;
  std::optional<Hierarchy> initial;
  switch (cfg.hierarchy_source) {
    case HierarchySource::file: initial = load_hierarchy(cfg.hierarchy_path); break;
    case HierarchySource::taxonomy:
      initial = build_taxonomy_hierarchy(load_taxonomy(cfg.taxonomy_edges, cfg.taxonomy_names),
                                         read_lines(cfg.class_ids));
      break;
    case HierarchySource::info_gain:
      initial = build_info_gain_hierarchy(features, labels, cfg.info_gain_max_depth);
      break;
    case HierarchySource::induced:
      // Hierarchy from a plainly trained head, unless the schedule rebuilds it.
      if (cfg.loss.mode != LossMode::none && !train.hierarchy_update) {
        const auto plain = train_linear_head(features, labels, num_classes, train,
                                             LossConfig::defaults(LossMode::none, train.epochs));
        initial = plain.hierarchy;
      }
      break;
  }
  return train_linear_head(features, labels, num_classes, train, cfg.loss,
                           initial ? &*initial : nullptr);
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"nbdt: build hierarchies from a classifier's final layer, "
               "run tree inference, train with tree supervision and analyze decisions.",
               "nbdt"};
  app.require_subcommand(1);
  std::function<void()> action;

  // induce
  std::string weights_path, class_ids_path, linkage_name = "ward", out_path;
  auto* induce = app.add_subcommand("induce", "cluster class weight rows into a hierarchy");
  induce->add_option("--weights", weights_path, "K x D weight matrix (.npy)")->required();
  induce->add_option("--class-ids", class_ids_path, "class names, one per line");
  induce->add_option("--linkage", linkage_name, "ward | average | complete");
  induce->add_option("--out", out_path, "hierarchy JSON")->required();
  induce->callback([&] {
    action = [&] {
      const Matrix w = read_matrix(weights_path);
      std::vector<std::string> ids = class_ids_path.empty() ? std::vector<std::string>{} : read_lines(class_ids_path);
      const ClassWeights cw = ids.empty() ? ClassWeights(w) : ClassWeights(w, ids);
      Hierarchy h = induce_hierarchy(cw, parse_linkage(linkage_name));
      save_hierarchy(out_path, hierarchy_with_class_labels(std::move(h), ids));
    };
  });

  // label
  std::string hierarchy_path, edges_path, names_path;
  auto* label = app.add_subcommand("label", "name nodes by their earliest common taxonomy ancestor");
  label->add_option("--hierarchy", hierarchy_path, "hierarchy JSON")->required();
  label->add_option("--edges", edges_path, "child<TAB>parent TSV")->required();
  label->add_option("--names", names_path, "id<TAB>name TSV")->required();
  label->add_option("--class-ids", class_ids_path, "concept id per class, one per line")->required();
  label->add_option("--out", out_path, "labeled hierarchy JSON")->required();
  label->callback([&] {
    action = [&] {
      const Taxonomy tax = load_taxonomy(edges_path, names_path);
      save_hierarchy(out_path, label_nodes(load_hierarchy(hierarchy_path), tax, read_lines(class_ids_path)));
    };
  });

  // infer
  Input input;
  std::string mode_name = "soft";
  std::size_t threads = 0;
  auto* infer = app.add_subcommand("infer", "predict classes with tree inference");
  infer->add_option("--hierarchy", hierarchy_path, "hierarchy JSON")->required();
  input.add_to(infer);
  infer->add_option("--mode", mode_name, "soft | hard");
  infer->add_option("--threads", threads, "worker threads (default NBDT_THREADS or all cores)");
  infer->add_option("--out", out_path, "predictions CSV")->required();
  infer->callback([&] {
    action = [&] {
      const Hierarchy tree = load_hierarchy(hierarchy_path);
      const auto [data, kind] = input.load();
      const auto results = batch_predict(tree, data, kind, parse_inference_mode(mode_name), threads);
      write_file_atomic(out_path, predictions_to_csv(results, input.ids(data.rows())));
    };
  });

  // eval
  std::string predictions_path, labels_path;
  auto* eval = app.add_subcommand("eval", "accuracy of a predictions CSV against labels");
  eval->add_option("--predictions", predictions_path, "predictions CSV")->required();
  eval->add_option("--labels", labels_path, "labels (.npy, int)")->required();
  eval->add_option("--out", out_path, "accuracy JSON")->required();
  eval->callback([&] {
    action = [&] {
      const auto rows = parse_predictions_csv(read_file(predictions_path));
      const auto labels = read_labels(labels_path);
      require(rows.size() == labels.size(), "predictions and labels differ in count");
      require(!rows.empty(), "no predictions");
      std::size_t correct = 0;
      for (std::size_t i = 0; i < rows.size(); ++i) correct += rows[i].predicted_class == labels[i];
      write_json(out_path, Json{{"accuracy", static_cast<double>(correct) / static_cast<double>(rows.size())},
                                {"correct", correct},
                                {"total", rows.size()}});
    };
  });

  // train
  std::string config_path, features_path, out_dir;
  std::optional<std::uint64_t> seed;
  auto* train = app.add_subcommand("train", "train a linear head with tree supervision");
  train->add_option("--config", config_path, "run configuration JSON");
  train->add_option("--features", features_path, "M x D training features (.npy)");
  train->add_option("--labels", labels_path, "training labels (.npy, int)");
  train->add_option("--hierarchy", hierarchy_path, "fixed hierarchy JSON (overrides the config)");
  train->add_option("--out-dir", out_dir, "output directory");
  train->add_option("--seed", seed, "random seed");
  train->callback([&] {
    action = [&] {
      Json j = config_path.empty() ? Json::object() : read_json(config_path);
      const fs::path base = config_path.empty() ? fs::path{} : fs::path(config_path).parent_path();
      RunConfig cfg = run_config_from_json(j, base);
      if (!features_path.empty()) cfg.features = features_path;
      if (!labels_path.empty()) cfg.labels = labels_path;
      if (!out_dir.empty()) cfg.output_dir = out_dir;
      if (!hierarchy_path.empty()) {
        cfg.hierarchy_source = HierarchySource::file;
        cfg.hierarchy_path = hierarchy_path;
      }
      if (seed) {
        cfg.seed = *seed;
        cfg.train.seed = *seed;
      }
      if (cfg.output_dir.empty()) fail(ErrorKind::invalid_config, "no output directory (--out-dir)");
      const TrainResult result = run_training(cfg);
      fs::create_directories(cfg.output_dir);
      write_matrix(cfg.output_dir / "weights.npy", result.weights);
      save_hierarchy(cfg.output_dir / "hierarchy.json", result.hierarchy);
      write_file_atomic(cfg.output_dir / "history.jsonl", history_to_jsonl(result.history));
      const auto& last = result.history.back();
      out << "epochs " << result.history.size() << " loss " << format_double(last.loss_total)
          << " acc_plain " << format_double(last.acc_plain);
      if (last.acc_nbdt_soft) out << " acc_nbdt_soft " << format_double(*last.acc_nbdt_soft);
      out << "\n";
    };
  });

  // superclass-eval
  int node_id = -1;
  std::string hypothesis_path, ood_labels_path, class_superclass_path;
  auto* superclass = app.add_subcommand("superclass-eval", "test a node's superclass hypothesis on unseen classes");
  superclass->add_option("--hierarchy", hierarchy_path, "weighted hierarchy JSON")->required();
  superclass->add_option("--node", node_id, "inner node id (default: root)");
  superclass->add_option("--hypothesis", hypothesis_path, "JSON {child_id: superclass}")->required();
  superclass->add_option("--features", features_path, "OOD features (.npy)")->required();
  superclass->add_option("--ood-labels", ood_labels_path, "superclass per sample, one per line")->required();
  superclass->add_option("--class-superclass", class_superclass_path,
                         "JSON {class_index: superclass} for the plain-argmax baseline");
  superclass->add_option("--out", out_path, "result JSON")->required();
  superclass->callback([&] {
    action = [&] {
      const Hierarchy tree = load_hierarchy(hierarchy_path);
      SuperclassSpec spec;
      spec.node_id = node_id < 0 ? tree.root() : node_id;
      try {
        const Json hyp = read_json(hypothesis_path);
        for (const auto& [k, v] : hyp.items()) spec.hypothesis[std::stoi(k)] = v.get<std::string>();
      } catch (const std::exception&) {
        fail(ErrorKind::format_error, hypothesis_path + ": expected {\"child_id\": \"superclass\"}");
      }
      spec.ood_samples = read_matrix(features_path);
      spec.ood_labels = read_lines(ood_labels_path);
      Json result{{"node", spec.node_id},
                  {"samples", spec.ood_samples.rows()},
                  {"nbdt_accuracy", node_hypothesis_accuracy(tree, spec)}};
      if (!class_superclass_path.empty()) {
        std::map<int, std::string> mapping;
        try {
          const Json classes = read_json(class_superclass_path);
          for (const auto& [k, v] : classes.items()) mapping[std::stoi(k)] = v.get<std::string>();
        } catch (const std::exception&) {
          fail(ErrorKind::format_error, class_superclass_path + ": expected {\"class_index\": \"superclass\"}");
        }
        Matrix w(tree.num_classes(), tree.dimension());
        for (std::size_t k = 0; k < tree.num_classes(); ++k) {
          const auto row = tree.weight(tree.leaf_of_class(static_cast<int>(k)));
          std::copy(row.begin(), row.end(), w.row(k).begin());
        }
        result["baseline_accuracy"] = baseline_superclass_accuracy(w, spec.ood_samples, spec.ood_labels, mapping);
      }
      write_json(out_path, result);
    };
  });

  // entropy-rank
  std::string method_name = "nbdt";
  std::size_t top = 0;
  auto* entropy = app.add_subcommand("entropy-rank", "rank samples by decision ambiguity");
  entropy->add_option("--hierarchy", hierarchy_path, "hierarchy JSON")->required();
  input.add_to(entropy);
  entropy->add_option("--method", method_name, "nbdt | baseline");
  entropy->add_option("--top", top, "keep only the first N entries (0 = all)");
  entropy->add_option("--threads", threads, "worker threads");
  entropy->add_option("--out", out_path, "report JSON")->required();
  entropy->callback([&] {
    action = [&] {
      const Hierarchy tree = load_hierarchy(hierarchy_path);
      const auto [data, kind] = input.load();
      AmbiguityReport report = rank_ambiguous(tree, data, kind, parse_ambiguity_method(method_name),
                                              input.ids(data.rows()), threads);
      if (top > 0 && top < report.ranked.size()) report.ranked.resize(top);
      write_json(out_path, ambiguity_report_to_json(report));
    };
  });

  // similar
  std::string pool_path, similarity_name = "inner";
  std::size_t top_m = 10;
  auto* similar = app.add_subcommand("similar", "samples most similar to a node's representative");
  similar->add_option("--hierarchy", hierarchy_path, "weighted hierarchy JSON")->required();
  similar->add_option("--node", node_id, "node id (default: root)");
  similar->add_option("--pool", pool_path, "candidate features (.npy)")->required();
  similar->add_option("--top", top_m, "number of examples");
  similar->add_option("--similarity", similarity_name, "inner | cosine");
  similar->add_option("--sample-ids", input.sample_ids, "text file with one sample id per line");
  similar->add_option("--out", out_path, "result JSON")->required();
  similar->callback([&] {
    action = [&] {
      const Hierarchy tree = load_hierarchy(hierarchy_path);
      const Matrix pool = read_matrix(pool_path);
      Similarity sim;
      if (similarity_name == "inner") {
        sim = Similarity::inner_product;
      } else if (similarity_name == "cosine") {
        sim = Similarity::cosine;
      } else {
        fail(ErrorKind::invalid_config, "unknown similarity '" + similarity_name + "'");
      }
      const int node = node_id < 0 ? tree.root() : node_id;
      const auto idx = max_similarity_examples(tree, node, pool, std::min(top_m, pool.rows()), sim);
      const auto ids = input.ids(pool.rows());
      Json ranked = Json::array();
      for (std::size_t i : idx)
        ranked.push_back({{"index", i}, {"sample_id", ids.empty() ? std::to_string(i) : ids[i]}});
      write_json(out_path, Json{{"node", node}, {"similarity", similarity_name}, {"ranked", ranked}});
    };
  });

  // traversal
  std::string dot_path;
  auto* traversal = app.add_subcommand("traversal", "count predicted-path traversals per edge");
  traversal->add_option("--hierarchy", hierarchy_path, "hierarchy JSON")->required();
  input.add_to(traversal);
  traversal->add_option("--mode", mode_name, "soft | hard");
  traversal->add_option("--threads", threads, "worker threads");
  traversal->add_option("--dot", dot_path, "also write an annotated DOT graph");
  traversal->add_option("--out", out_path, "counts JSON")->required();
  traversal->callback([&] {
    action = [&] {
      const Hierarchy tree = load_hierarchy(hierarchy_path);
      const auto [data, kind] = input.load();
      const auto counts = traversal_frequencies(tree, data, kind, parse_inference_mode(mode_name), threads);
      write_json(out_path, traversal_to_json(tree, counts));
      if (!dot_path.empty()) write_file_atomic(dot_path, export_dot(tree, counts.to_annotations(tree)));
    };
  });

  // export-dot
  std::string counts_path;
  auto* dot = app.add_subcommand("export-dot", "render a hierarchy as Graphviz DOT");
  dot->add_option("--hierarchy", hierarchy_path, "hierarchy JSON")->required();
  dot->add_option("--counts", counts_path, "traversal counts JSON to annotate edges");
  dot->add_option("--class-ids", class_ids_path, "class names, one per line");
  dot->add_option("--out", out_path, "DOT file")->required();
  dot->callback([&] {
    action = [&] {
      const Hierarchy tree = load_hierarchy(hierarchy_path);
      DotAnnotations notes;
      if (!counts_path.empty()) notes = traversal_from_json(tree, read_json(counts_path)).to_annotations(tree);
      const auto names = class_ids_path.empty() ? std::vector<std::string>{} : read_lines(class_ids_path);
      write_file_atomic(out_path, export_dot(tree, notes, names));
    };
  });

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }

  try {
    if (action) action();
    return kExitOk;
  } catch (const Error& e) {
    err << "error (" << to_string(e.kind()) << "): " << e.what() << "\n";
    switch (e.kind()) {
      case ErrorKind::invalid_config: return kExitUsage;
      case ErrorKind::training_failure: return kExitNumeric;
      default: return kExitData;
    }
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace nbdt
