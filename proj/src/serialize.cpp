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


#include "nbdt/serialize.hpp"

#include <algorithm>
#include <cstdio>
#include <sstream>

#include "nbdt/error.hpp"
#include "nbdt/npy.hpp"

namespace nbdt {

namespace {

[[noreturn]] void format_error(const std::string& msg) { fail(ErrorKind::format_error, msg); }

template <typename T>
T get_or(const Json& j, const char* key, T fallback) {
  if (!j.contains(key) || j.at(key).is_null()) return fallback;
  try {
    return j.at(key).get<T>();
  } catch (const Json::exception&) {
    fail(ErrorKind::invalid_config, std::string("config field '") + key + "' has the wrong type");
  }
}

Json parse_json_text(const std::string& text, const std::string& what) {
  try {
    return Json::parse(text);
  } catch (const Json::parse_error& e) {
    format_error(what + ": invalid JSON (" + e.what() + ")");
  }
}

}  // namespace

std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

Json hierarchy_to_json(const Hierarchy& tree) {
  Json nodes = Json::array();
  for (const Node& n : tree.nodes()) {
    Json j;
    j["id"] = n.id;
    j["children"] = n.children;
    j["class_index"] = n.class_index ? Json(*n.class_index) : Json(nullptr);
    j["weight"] = n.weight ? Json(*n.weight) : Json(nullptr);
    if (n.label) {
      Json label{{"id", n.label->id}, {"name", n.label->name}};
      if (!n.label->alternatives.empty()) label["alternatives"] = n.label->alternatives;
      j["label"] = std::move(label);
    } else {
      j["label"] = nullptr;
    }
    nodes.push_back(std::move(j));
  }
  return Json{{"root", tree.root()}, {"nodes", std::move(nodes)}};
}

Hierarchy hierarchy_from_json(const Json& j) {
  try {
    if (!j.is_object() || !j.contains("root") || !j.contains("nodes"))
      format_error("hierarchy JSON needs 'root' and 'nodes'");
    std::vector<Node> nodes;
    for (const Json& jn : j.at("nodes")) {
      Node n;
      n.id = jn.at("id").get<int>();
      n.children = jn.value("children", std::vector<int>{});
      if (jn.contains("class_index") && !jn["class_index"].is_null())
        n.class_index = jn["class_index"].get<int>();
      if (jn.contains("weight") && !jn["weight"].is_null())
        n.weight = jn["weight"].get<std::vector<double>>();
      if (jn.contains("label") && !jn["label"].is_null()) {
        const Json& jl = jn["label"];
        NodeLabel label{jl.at("id").get<std::string>(), jl.value("name", std::string{}), {}};
        label.alternatives = jl.value("alternatives", std::vector<std::string>{});
        n.label = std::move(label);
      }
      nodes.push_back(std::move(n));
    }
    std::sort(nodes.begin(), nodes.end(), [](const Node& a, const Node& b) { return a.id < b.id; });
    return Hierarchy(std::move(nodes), j.at("root").get<int>());
  } catch (const Json::exception& e) {
    format_error(std::string("malformed hierarchy JSON: ") + e.what());
  } catch (const Error& e) {
    if (e.kind() == ErrorKind::invalid_input) format_error(std::string("invalid hierarchy: ") + e.what());
    throw;
  }
}

void save_hierarchy(const std::filesystem::path& path, const Hierarchy& tree) {
  write_file_atomic(path, hierarchy_to_json(tree).dump(1) + "\n");
}

Hierarchy load_hierarchy(const std::filesystem::path& path) {
  return hierarchy_from_json(parse_json_text(read_file(path), path.string()));
}

namespace {

std::vector<std::pair<std::string, std::string>> parse_tsv_pairs(const std::string& text,
                                                                 const std::string& what) {
  std::vector<std::pair<std::string, std::string>> out;
  std::istringstream in(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos)
      format_error(what + " line " + std::to_string(lineno) + ": expected two tab-separated fields");
    out.emplace_back(line.substr(0, tab), line.substr(tab + 1));
  }
  return out;
}

}  // namespace

Taxonomy parse_taxonomy(const std::string& edges_tsv, const std::string& names_tsv) {
  std::set<Taxonomy::Edge> edges;
  for (auto& e : parse_tsv_pairs(edges_tsv, "taxonomy edges")) edges.insert(std::move(e));
  std::map<std::string, std::string> names;
  for (auto& [id, name] : parse_tsv_pairs(names_tsv, "taxonomy names")) names[id] = name;
  return Taxonomy(std::move(edges), std::move(names));
}

Taxonomy load_taxonomy(const std::filesystem::path& edges, const std::filesystem::path& names) {
  return parse_taxonomy(read_file(edges), read_file(names));
}

std::vector<std::string> read_lines(const std::filesystem::path& path) {
  std::istringstream in(read_file(path));
  std::vector<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (!line.empty()) out.push_back(line);
  }
  return out;
}

std::string predictions_to_csv(const std::vector<PathResult>& results,
                               const std::vector<std::string>& sample_ids) {
  require(sample_ids.empty() || sample_ids.size() == results.size(),
          "sample id count does not match predictions");
  std::string out = "sample_id,predicted_class,probability\n";
  for (std::size_t i = 0; i < results.size(); ++i) {
    const auto& r = results[i];
    out += sample_ids.empty() ? std::to_string(i) : sample_ids[i];
    out += ',';
    out += std::to_string(r.predicted_class);
    out += ',';
    out += format_double(r.class_probs[static_cast<std::size_t>(r.predicted_class)]);
    out += '\n';
  }
  return out;
}

std::vector<PredictionRow> parse_predictions_csv(const std::string& text) {
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line != "sample_id,predicted_class,probability")
    format_error("predictions CSV must start with header 'sample_id,predicted_class,probability'");
  std::vector<PredictionRow> rows;
  std::size_t lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    const auto a = line.find(','), b = line.rfind(',');
    if (a == std::string::npos || a == b) format_error("predictions CSV line " + std::to_string(lineno) + ": expected 3 fields");
    try {
      rows.push_back({line.substr(0, a), std::stoi(line.substr(a + 1, b - a - 1)), std::stod(line.substr(b + 1))});
    } catch (const std::logic_error&) {
      format_error("predictions CSV line " + std::to_string(lineno) + ": bad number");
    }
  }
  return rows;
}

std::string history_to_jsonl(const std::vector<EpochRecord>& history) {
  std::string out;
  for (const auto& r : history) {
    Json j;
    j["epoch"] = r.epoch;
    j["lr"] = r.lr;
    j["beta"] = r.beta;
    j["omega"] = r.omega;
    j["loss_total"] = r.loss_total;
    j["loss_original"] = r.loss_original;
    j["loss_tree"] = r.loss_tree;
    j["acc_plain"] = r.acc_plain;
    j["acc_nbdt_soft"] = r.acc_nbdt_soft ? Json(*r.acc_nbdt_soft) : Json(nullptr);
    j["acc_nbdt_hard"] = r.acc_nbdt_hard ? Json(*r.acc_nbdt_hard) : Json(nullptr);
    out += j.dump();
    out += '\n';
  }
  return out;
}

Json ambiguity_report_to_json(const AmbiguityReport& report) {
  Json ranked = Json::array();
  for (const auto& e : report.ranked) {
    Json j{{"sample_id", e.sample_id}, {"index", e.index}, {"score", e.score}};
    if (report.method == AmbiguityMethod::nbdt_path_entropy) j["entropies"] = e.entropies;
    ranked.push_back(std::move(j));
  }
  return Json{{"method", to_string(report.method)}, {"ranked", std::move(ranked)}};
}

Json traversal_to_json(const Hierarchy& tree, const TraversalCounts& counts) {
  Json edges = Json::array();
  for (const Node& n : tree.nodes())
    for (int c : n.children) edges.push_back({{"parent", n.id}, {"child", c}, {"count", counts.edge(c)}});
  return Json{{"samples", counts.visits.at(static_cast<std::size_t>(tree.root()))},
              {"visits", counts.visits},
              {"edges", std::move(edges)}};
}

TraversalCounts traversal_from_json(const Hierarchy& tree, const Json& j) {
  TraversalCounts counts;
  try {
    counts.visits = j.at("visits").get<std::vector<std::size_t>>();
  } catch (const Json::exception& e) {
    format_error(std::string("malformed traversal JSON: ") + e.what());
  }
  if (counts.visits.size() != tree.size()) format_error("traversal counts do not match hierarchy size");
  return counts;
}

LossConfig loss_config_from_json(const Json& j, int default_horizon) {
  const LossMode mode = parse_loss_mode(get_or<std::string>(j, "mode", "soft"));
  LossConfig cfg = LossConfig::defaults(mode, get_or<int>(j, "horizon", default_horizon),
                                        get_or<double>(j, "soft_omega_end", 0.5));
  cfg.omega_start = get_or<double>(j, "omega_start", cfg.omega_start);
  cfg.omega_end = get_or<double>(j, "omega_end", cfg.omega_end);
  cfg.beta_start = get_or<double>(j, "beta_start", cfg.beta_start);
  cfg.beta_end = get_or<double>(j, "beta_end", cfg.beta_end);
  cfg.validate();
  return cfg;
}

Json loss_config_to_json(const LossConfig& cfg) {
  return Json{{"mode", to_string(cfg.mode)},     {"omega_start", cfg.omega_start},
              {"omega_end", cfg.omega_end},      {"beta_start", cfg.beta_start},
              {"beta_end", cfg.beta_end},        {"horizon", cfg.horizon}};
}

TrainConfig train_config_from_json(const Json& j) {
  TrainConfig cfg;
  cfg.epochs = get_or<int>(j, "epochs", cfg.epochs);
  cfg.batch_size = get_or<std::size_t>(j, "batch_size", cfg.batch_size);
  cfg.learning_rate = get_or<double>(j, "learning_rate", cfg.learning_rate);
  cfg.momentum = get_or<double>(j, "momentum", cfg.momentum);
  cfg.weight_decay = get_or<double>(j, "weight_decay", cfg.weight_decay);
  cfg.lr_drop_points = get_or<std::vector<double>>(j, "lr_drop_points", cfg.lr_drop_points);
  cfg.lr_drop_factor = get_or<double>(j, "lr_drop_factor", cfg.lr_drop_factor);
  cfg.seed = get_or<std::uint64_t>(j, "seed", cfg.seed);
  cfg.linkage = parse_linkage(get_or<std::string>(j, "linkage", "ward"));
  if (j.contains("hierarchy_update") && !j["hierarchy_update"].is_null()) {
    const Json& u = j["hierarchy_update"];
    HierarchyUpdate upd;
    upd.start_epoch = get_or<int>(u, "start_epoch", 0);
    upd.end_epoch = get_or<int>(u, "end_epoch", cfg.epochs);
    upd.period = get_or<int>(u, "period", 1);
    cfg.hierarchy_update = upd;
  }
  cfg.validate();
  return cfg;
}

void RunConfig::check_paths() const {
  auto need = [](const std::filesystem::path& p, const char* what) {
    if (p.empty()) fail(ErrorKind::invalid_config, std::string("run config is missing '") + what + "'");
    if (!std::filesystem::exists(p))
      fail(ErrorKind::io_error, std::string(what) + " path '" + p.string() + "' does not exist");
  };
  need(features, "features");
  need(labels, "labels");
  switch (hierarchy_source) {
    case HierarchySource::file: need(hierarchy_path, "hierarchy.path"); break;
    case HierarchySource::taxonomy:
      need(taxonomy_edges, "hierarchy.edges");
      need(taxonomy_names, "hierarchy.names");
      need(class_ids, "hierarchy.class_ids");
      break;
    default: break;
  }
}

RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir) {
  auto path_of = [&](const Json& obj, const char* key) -> std::filesystem::path {
    const std::string s = get_or<std::string>(obj, key, "");
    if (s.empty()) return {};
    const std::filesystem::path p(s);
    return p.is_absolute() || base_dir.empty() ? p : base_dir / p;
  };
  RunConfig cfg;
  cfg.features = path_of(j, "features");
  cfg.labels = path_of(j, "labels");
  cfg.output_dir = path_of(j, "output_dir");
  cfg.seed = get_or<std::uint64_t>(j, "seed", 0);
  const Json train = j.value("train", Json::object());
  cfg.train = train_config_from_json(train);
  if (!train.contains("seed")) cfg.train.seed = cfg.seed;
  cfg.loss = loss_config_from_json(j.value("loss", Json::object()), cfg.train.epochs);
  const Json h = j.value("hierarchy", Json::object());
  const std::string source = get_or<std::string>(h, "source", "induced");
  if (source == "induced") {
    cfg.hierarchy_source = HierarchySource::induced;
  } else if (source == "taxonomy") {
    cfg.hierarchy_source = HierarchySource::taxonomy;
  } else if (source == "info_gain") {
    cfg.hierarchy_source = HierarchySource::info_gain;
  } else if (source == "file") {
    cfg.hierarchy_source = HierarchySource::file;
  } else {
    fail(ErrorKind::invalid_config, "unknown hierarchy source '" + source + "'");
  }
  cfg.hierarchy_path = path_of(h, "path");
  cfg.taxonomy_edges = path_of(h, "edges");
  cfg.taxonomy_names = path_of(h, "names");
  cfg.class_ids = path_of(h, "class_ids");
  cfg.info_gain_max_depth = get_or<int>(h, "max_depth", cfg.info_gain_max_depth);
  if (h.contains("linkage")) cfg.train.linkage = parse_linkage(h["linkage"].get<std::string>());
  return cfg;
}

}  // namespace nbdt
