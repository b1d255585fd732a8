#pragma once

#include "tourank/serialize.hpp"

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

namespace tourank {

// The six trainable configurations an experiment can name.
enum class ModelKind {
    tournament_auc,
    tournament_image,
    tournament_class,
    rank,
    linear,
    multiclass,
};

ModelKind model_kind_from_name(const std::string& name); // ConfigError on unknown names
std::string model_kind_name(ModelKind kind);
const std::vector<ModelKind>& all_model_kinds();

// Where the experiment's samples come from: a CSV on disk, or a synthetic
// spec (used when csv_path is empty and counts are given). Setting both is a
// config error, as is setting neither.
struct DatasetSource {
    std::string csv_path;
    SyntheticSpec synthetic;
    std::optional<int> num_classes_override; // CSV only
    bool standardize = false;                // rescale features after loading
};

Dataset load_experiment_dataset(const DatasetSource& src);

struct ExperimentConfig {
    DatasetSource data;
    ModelKind model = ModelKind::tournament_auc;
    // Training knobs. The harness overrides build.strategy (from the model
    // kind) and all seeds (derived from `seed`, the fold index, and the model
    // kind), so runs are reproducible and fold assignments are shared across
    // kinds.
    BuildConfig build;
    int fold_count = 5;
    std::uint64_t seed = 0;
    int threads = 1;
    std::string out_dir; // optional; consumed by the CLI, not by run_cv
};

void validate_experiment_config(const ExperimentConfig& cfg);

AnyModel train_any(const Dataset& ds, ModelKind kind, const BuildConfig& build);
int predict_any(const AnyModel& model, const std::vector<double>& x);
std::vector<int> predict_any_batch(const AnyModel& model, const Dataset& ds);
int model_num_classes(const AnyModel& model);
int model_feature_dim(const AnyModel& model);

struct CvResult {
    ModelKind model = ModelKind::tournament_auc;
    int fold_count = 0;
    std::uint64_t seed = 0;
    std::string data_hash;
    EvalReport pooled; // the headline report: held-out predictions concatenated
    std::vector<EvalReport> per_fold;
    std::vector<int> predictions; // dataset order; each sample scored by the
    std::vector<int> truth;       // model that held its fold out
    std::vector<std::vector<NodeBuildRecord>> fold_build_meta; // tournament kinds only
    std::vector<std::string> warnings; // "fold <i>: ..." entries
};

// Stratified k-fold cross-validation. Degenerate folds (a grade missing from
// some node's training data) downgrade to constant models with a warning
// instead of aborting.
CvResult run_cv(const ExperimentConfig& cfg);

nlohmann::json cv_result_to_json(const CvResult& r);

// Text rendering: exact and within-one tables (per-grade columns plus
// Average, 2-decimal display, "n/a" for grades absent from the test data)
// and the pooled confusion matrix.
std::string render_report(const EvalReport& r, const std::string& row_label);
std::string render_tables(const CvResult& r);

struct ComparisonResult {
    std::string data_hash;
    std::size_t reference = 0; // index into results
    std::vector<CvResult> results;
};

// Runs every config and tabulates one row per model. All configs must agree
// on fold_count and seed, and must resolve to the same dataset (verified by
// content hash); per-grade deltas are reported against the named reference
// model (empty name: the first config).
ComparisonResult compare_models(const std::vector<ExperimentConfig>& cfgs,
                                const std::string& reference_model = "");
nlohmann::json comparison_to_json(const ComparisonResult& r);
std::string render_comparison(const ComparisonResult& r);

// Config files hold one experiment. Two formats, auto-detected: a JSON object
// or flat `key=value` lines ('#' starts a comment line). Keys use dotted
// names (data.csv, data.counts, train.lr, ...); unknown keys are rejected.
ExperimentConfig parse_config_text(const std::string& text);
ExperimentConfig parse_config_file(const std::string& path);
// Applies one key. Shared by the config parser and CLI flag overrides.
void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value);

} // namespace tourank
