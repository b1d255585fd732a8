#pragma once

#include "tourank/baselines.hpp"
#include "tourank/data.hpp"
#include "tourank/metrics.hpp"
#include "tourank/tournament.hpp"

#include <json.hpp>

#include <string>
#include <variant>

namespace tourank {

inline constexpr int SCHEMA_VERSION = 1;

using AnyModel = std::variant<TournamentTree, RankEnsemble, RegressionModel, MulticlassModel>;

// Content fingerprint (FNV-1a over ids, grades, and full-precision features).
// Two datasets hash equal iff they hold the same samples in the same order.
std::string dataset_hash(const Dataset& ds);

nlohmann::json binary_model_to_json(const BinaryModel& m);
BinaryModel binary_model_from_json(const nlohmann::json& j);

nlohmann::json tree_to_json(const TournamentTree& tree);
TournamentTree tree_from_json(const nlohmann::json& j);

// Per-node candidate diagnostics plus build warnings, emitted separately from
// the tree itself.
nlohmann::json node_records_to_json(const std::vector<NodeBuildRecord>& nodes);
nlohmann::json build_meta_to_json(const TournamentTree& tree);

nlohmann::json model_to_json(const AnyModel& model);
AnyModel model_from_json(const nlohmann::json& j);

void save_model(const AnyModel& model, const std::string& path);
AnyModel load_model(const std::string& path);

nlohmann::json report_to_json(const EvalReport& r);
EvalReport report_from_json(const nlohmann::json& j);

// Shared helpers for anything that writes report/JSON artifacts.
std::string json_to_string(const nlohmann::json& j); // 2-space indent, trailing newline
void write_text_file(const std::string& path, const std::string& text);
nlohmann::json load_json_file(const std::string& path); // ParseError on bad input

} // namespace tourank
