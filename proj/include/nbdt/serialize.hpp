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

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "nbdt/analysis.hpp"
#include "nbdt/hierarchy.hpp"
#include "nbdt/inference.hpp"
#include "nbdt/loss.hpp"
#include "nbdt/taxonomy.hpp"
#include "nbdt/train.hpp"

namespace nbdt {

using Json = nlohmann::json;

// {"root": int, "nodes": [{"id", "children", "class_index", "weight", "label"}]}
Json hierarchy_to_json(const Hierarchy& tree);
Hierarchy hierarchy_from_json(const Json& j);
void save_hierarchy(const std::filesystem::path& path, const Hierarchy& tree);
Hierarchy load_hierarchy(const std::filesystem::path& path);

// TSV: `child<TAB>parent` and `id<TAB>name`, one record per line.
Taxonomy parse_taxonomy(const std::string& edges_tsv, const std::string& names_tsv);
Taxonomy load_taxonomy(const std::filesystem::path& edges, const std::filesystem::path& names);

// Non-empty lines, trailing CR stripped.
std::vector<std::string> read_lines(const std::filesystem::path& path);

struct PredictionRow {
  std::string sample_id;
  int predicted_class = 0;
  double probability = 0.0;
};

// Header `sample_id,predicted_class,probability`.
std::string predictions_to_csv(const std::vector<PathResult>& results,
                               const std::vector<std::string>& sample_ids = {});
std::vector<PredictionRow> parse_predictions_csv(const std::string& text);

std::string history_to_jsonl(const std::vector<EpochRecord>& history);

Json ambiguity_report_to_json(const AmbiguityReport& report);
Json traversal_to_json(const Hierarchy& tree, const TraversalCounts& counts);
TraversalCounts traversal_from_json(const Hierarchy& tree, const Json& j);

// Missing fields keep the defaults of LossConfig::defaults(mode, horizon).
LossConfig loss_config_from_json(const Json& j, int default_horizon);
Json loss_config_to_json(const LossConfig& cfg);
TrainConfig train_config_from_json(const Json& j);

enum class HierarchySource { induced, taxonomy, info_gain, file };

struct RunConfig {
  std::filesystem::path features;
  std::filesystem::path labels;
  std::filesystem::path output_dir;
  std::uint64_t seed = 0;
  HierarchySource hierarchy_source = HierarchySource::induced;
  std::filesystem::path hierarchy_path;  // file
  std::filesystem::path taxonomy_edges;  // taxonomy
  std::filesystem::path taxonomy_names;
  std::filesystem::path class_ids;
  int info_gain_max_depth = 16;
  LossConfig loss;
  TrainConfig train;

  // Every referenced input path must exist.
  void check_paths() const;
};

// Paths are resolved relative to `base_dir`.
RunConfig run_config_from_json(const Json& j, const std::filesystem::path& base_dir = {});

// 17 significant digits, enough to round-trip any double.
std::string format_double(double v);

}  // namespace nbdt
