#include "tourank/harness.hpp"

#include "tourank/errors.hpp"
#include "tourank/rng.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <future>
#include <sstream>

namespace tourank {

namespace {

using nlohmann::json;

constexpr std::uint64_t SALT_CV = 0x63767372ULL; // per-(fold, kind) training seeds

struct KindName {
    ModelKind kind;
    const char* name;
};

constexpr KindName KIND_NAMES[] = {
    {ModelKind::tournament_auc, "tournament-auc"},
    {ModelKind::tournament_image, "tournament-image"},
    {ModelKind::tournament_class, "tournament-class"},
    {ModelKind::rank, "rank"},
    {ModelKind::linear, "linear"},
    {ModelKind::multiclass, "multiclass"},
};

Strategy strategy_for(ModelKind kind) {
    switch (kind) {
        case ModelKind::tournament_auc: return Strategy::auc;
        case ModelKind::tournament_image: return Strategy::image_balance;
        case ModelKind::tournament_class: return Strategy::class_balance;
        default: throw ConfigError("model kind has no tree strategy");
    }
}

bool is_tournament(ModelKind kind) {
    return kind == ModelKind::tournament_auc || kind == ModelKind::tournament_image ||
           kind == ModelKind::tournament_class;
}

} // namespace

std::string model_kind_name(ModelKind kind) {
    for (const KindName& kn : KIND_NAMES)
        if (kn.kind == kind) return kn.name;
    throw ConfigError("unknown model kind value");
}

ModelKind model_kind_from_name(const std::string& name) {
    for (const KindName& kn : KIND_NAMES)
        if (name == kn.name) return kn.kind;
    std::string known;
    for (const KindName& kn : KIND_NAMES) known += std::string(known.empty() ? "" : ", ") + kn.name;
    throw ConfigError("unknown model kind '" + name + "' (expected one of: " + known + ")");
}

const std::vector<ModelKind>& all_model_kinds() {
    static const std::vector<ModelKind> kinds = {
        ModelKind::tournament_auc, ModelKind::tournament_image, ModelKind::tournament_class,
        ModelKind::rank,           ModelKind::linear,           ModelKind::multiclass,
    };
    return kinds;
}

Dataset load_experiment_dataset(const DatasetSource& src) {
    const bool has_csv = !src.csv_path.empty();
    const bool has_synth = !src.synthetic.counts.empty();
    if (has_csv && has_synth)
        throw ConfigError("both data.csv and data.counts are set; pick one source");
    if (!has_csv && !has_synth)
        throw ConfigError("no dataset source configured (set data.csv or data.counts)");

    Dataset ds;
    if (has_csv) {
        ds = load_csv(src.csv_path, src.num_classes_override);
    } else {
        ds = generate_synthetic(src.synthetic).dataset;
    }
    if (src.standardize) standardize_features(ds);
    return ds;
}

void validate_experiment_config(const ExperimentConfig& cfg) {
    if (cfg.fold_count < 2)
        throw ConfigError("fold_count must be at least 2, got " + std::to_string(cfg.fold_count));
    if (cfg.threads < 1)
        throw ConfigError("threads must be positive, got " + std::to_string(cfg.threads));
    if (!(cfg.build.auc_eval_fraction > 0.0) || !(cfg.build.auc_eval_fraction < 1.0))
        throw ConfigError("auc_eval_fraction must lie in (0, 1)");
    validate_train_config(cfg.build.train);
}

AnyModel train_any(const Dataset& ds, ModelKind kind, const BuildConfig& build) {
    switch (kind) {
        case ModelKind::tournament_auc:
        case ModelKind::tournament_image:
        case ModelKind::tournament_class: {
            BuildConfig bc = build;
            bc.strategy = strategy_for(kind);
            return build_tree(ds, bc);
        }
        case ModelKind::rank: return train_rank_ensemble(ds, build.train);
        case ModelKind::linear: return train_regression(ds, build.train);
        case ModelKind::multiclass: return train_multiclass(ds, build.train);
    }
    throw ConfigError("unknown model kind value");
}

int predict_any(const AnyModel& model, const std::vector<double>& x) {
    return std::visit(
        [&](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, TournamentTree>) return m.predict(x);
            else if constexpr (std::is_same_v<T, RankEnsemble>) return predict_rank(m, x);
            else if constexpr (std::is_same_v<T, RegressionModel>) return predict_regression(m, x);
            else return predict_multiclass(m, x);
        },
        model);
}

std::vector<int> predict_any_batch(const AnyModel& model, const Dataset& ds) {
    std::vector<int> out;
    out.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) out.push_back(predict_any(model, s.features));
    return out;
}

int model_num_classes(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, MulticlassModel>) return static_cast<int>(m.weights.size());
            else return m.num_classes;
        },
        model);
}

int model_feature_dim(const AnyModel& model) {
    return std::visit(
        [](const auto& m) -> int {
            using T = std::decay_t<decltype(m)>;
            if constexpr (std::is_same_v<T, RegressionModel>) return static_cast<int>(m.weights.size());
            else if constexpr (std::is_same_v<T, MulticlassModel>)
                return static_cast<int>(m.weights.empty() ? 0 : m.weights.front().size());
            else return m.feature_dim;
        },
        model);
}

namespace {

struct FoldOutcome {
    std::vector<std::size_t> test_idx;
    std::vector<int> pred;
    EvalReport report;
    std::vector<NodeBuildRecord> build_meta;
    std::vector<std::string> warnings;
};

FoldOutcome run_fold(const Dataset& ds, const FoldSplit& folds, int fold, const ExperimentConfig& cfg) {
    FoldOutcome out;
    std::vector<std::size_t> train_idx;
    for (std::size_t i = 0; i < folds.assignments.size(); ++i) {
        if (folds.assignments[i] == fold) out.test_idx.push_back(i);
        else train_idx.push_back(i);
    }
    const Dataset train = subset(ds, train_idx);
    const Dataset test = subset(ds, out.test_idx);

    BuildConfig bc = cfg.build;
    bc.degenerate_fallback = true; // a bad fold must degrade, not abort the run
    bc.seed = derive_seed(cfg.seed, {SALT_CV, static_cast<std::uint64_t>(fold),
                                     static_cast<std::uint64_t>(cfg.model)});
    bc.train.seed = bc.seed;

    AnyModel model = train_any(train, cfg.model, bc);
    out.pred = predict_any_batch(model, test);

    std::vector<int> truth;
    truth.reserve(test.samples.size());
    for (const Sample& s : test.samples) truth.push_back(s.grade);
    out.report = build_report(out.pred, truth, ds.num_classes);

    if (const auto* tree = std::get_if<TournamentTree>(&model)) {
        out.build_meta = tree->build_meta;
        out.warnings = tree->warnings;
    }
    return out;
}

} // namespace

CvResult run_cv(const ExperimentConfig& cfg) {
    validate_experiment_config(cfg);
    const Dataset ds = load_experiment_dataset(cfg.data);
    if (static_cast<std::size_t>(cfg.fold_count) > ds.samples.size())
        throw ConfigError("fold_count " + std::to_string(cfg.fold_count) + " exceeds dataset size " +
                          std::to_string(ds.samples.size()));

    const FoldSplit folds = stratified_kfold(ds, cfg.fold_count, cfg.seed);
    const int k = cfg.fold_count;
    std::vector<FoldOutcome> outs(static_cast<std::size_t>(k));

    if (cfg.threads <= 1) {
        for (int f = 0; f < k; ++f) outs[static_cast<std::size_t>(f)] = run_fold(ds, folds, f, cfg);
    } else {
        // waves of at most cfg.threads concurrent folds; results are keyed by
        // fold index, so scheduling cannot affect output
        for (int base = 0; base < k; base += cfg.threads) {
            std::vector<std::future<FoldOutcome>> wave;
            const int end = std::min(k, base + cfg.threads);
            for (int f = base; f < end; ++f)
                wave.push_back(std::async(std::launch::async,
                                          [&ds, &folds, f, &cfg] { return run_fold(ds, folds, f, cfg); }));
            for (int f = base; f < end; ++f)
                outs[static_cast<std::size_t>(f)] = wave[static_cast<std::size_t>(f - base)].get();
        }
    }

    CvResult r;
    r.model = cfg.model;
    r.fold_count = k;
    r.seed = cfg.seed;
    r.data_hash = dataset_hash(ds);
    r.predictions.assign(ds.samples.size(), 0);
    r.truth.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) r.truth.push_back(s.grade);
    for (int f = 0; f < k; ++f) {
        FoldOutcome& out = outs[static_cast<std::size_t>(f)];
        for (std::size_t j = 0; j < out.test_idx.size(); ++j) r.predictions[out.test_idx[j]] = out.pred[j];
        r.per_fold.push_back(std::move(out.report));
        if (is_tournament(cfg.model)) r.fold_build_meta.push_back(std::move(out.build_meta));
        for (const std::string& w : out.warnings)
            r.warnings.push_back("fold " + std::to_string(f) + ": " + w);
    }
    r.pooled = build_report(r.predictions, r.truth, ds.num_classes);
    return r;
}

json cv_result_to_json(const CvResult& r) {
    json per_fold = json::array();
    for (const EvalReport& rep : r.per_fold) per_fold.push_back(report_to_json(rep));
    json meta = json::array();
    for (const auto& records : r.fold_build_meta) meta.push_back(node_records_to_json(records));
    return json{{"schema_version", SCHEMA_VERSION},
                {"model", model_kind_name(r.model)},
                {"fold_count", r.fold_count},
                {"seed", r.seed},
                {"dataset_hash", r.data_hash},
                {"pooled", report_to_json(r.pooled)},
                {"per_fold", std::move(per_fold)},
                {"fold_build_meta", std::move(meta)},
                {"warnings", r.warnings}};
}

namespace {

constexpr int CELL_W = 9;

std::string fmt_cell(const std::optional<double>& v, bool sign = false) {
    char buf[32];
    if (!v) {
        std::snprintf(buf, sizeof buf, "%*s", CELL_W, "n/a");
    } else {
        std::snprintf(buf, sizeof buf, sign ? "%+*.2f" : "%*.2f", CELL_W, *v);
    }
    return buf;
}

std::string fmt_label(const std::string& s, std::size_t w) {
    std::string out = "  " + s;
    while (out.size() < w + 2) out.push_back(' ');
    return out;
}

std::size_t label_width(const std::vector<std::string>& labels) {
    std::size_t w = 5;
    for (const std::string& s : labels) w = std::max(w, s.size());
    return w;
}

std::string table_header(std::size_t lw, int num_classes) {
    std::string line = fmt_label("model", lw);
    char buf[32];
    for (int g = 1; g <= num_classes; ++g) {
        std::snprintf(buf, sizeof buf, "%*d", CELL_W, g);
        line += buf;
    }
    std::snprintf(buf, sizeof buf, "%*s", CELL_W, "Average");
    line += buf;
    return line + "\n";
}

std::string accuracy_table(const std::string& title, const std::vector<std::string>& labels,
                           const std::vector<const EvalReport*>& reports, bool within) {
    const std::size_t lw = label_width(labels);
    const int n = reports.front()->num_classes;
    std::string out = title + "\n" + table_header(lw, n);
    for (std::size_t i = 0; i < reports.size(); ++i) {
        const EvalReport& r = *reports[i];
        out += fmt_label(labels[i], lw);
        const auto& col = within ? r.per_grade_within_one : r.per_grade_exact;
        for (int g = 1; g <= n; ++g) out += fmt_cell(col[static_cast<std::size_t>(g - 1)]);
        out += fmt_cell(within ? r.average_within_one : r.average_exact);
        out += "\n";
    }
    return out;
}

std::string confusion_table(const EvalReport& r) {
    std::string out = "Confusion matrix (rows: true grade, columns: predicted)\n";
    char buf[32];
    out += "      ";
    for (int g = 1; g <= r.num_classes; ++g) {
        std::snprintf(buf, sizeof buf, "%6d", g);
        out += buf;
    }
    out += "\n";
    for (int t = 1; t <= r.num_classes; ++t) {
        std::snprintf(buf, sizeof buf, "%6d", t);
        out += buf;
        for (int p = 1; p <= r.num_classes; ++p) {
            std::snprintf(buf, sizeof buf, "%6lld",
                          static_cast<long long>(
                              r.confusion[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(p - 1)]));
            out += buf;
        }
        out += "\n";
    }
    return out;
}

std::string warnings_block(const std::vector<std::string>& warnings) {
    if (warnings.empty()) return "";
    std::string out = "warnings (" + std::to_string(warnings.size()) + "):\n";
    for (const std::string& w : warnings) out += "  " + w + "\n";
    return out;
}

} // namespace

std::string render_report(const EvalReport& r, const std::string& row_label) {
    const std::vector<std::string> labels = {row_label};
    const std::vector<const EvalReport*> reps = {&r};
    return accuracy_table("Exact match (%)", labels, reps, false) + "\n" +
           accuracy_table("Within one category (%)", labels, reps, true) + "\n" + confusion_table(r);
}

std::string render_tables(const CvResult& r) {
    std::ostringstream head;
    head << "model: " << model_kind_name(r.model) << "   folds: " << r.fold_count << "   seed: " << r.seed
         << "   samples: " << r.pooled.total << "\n"
         << "dataset: " << r.data_hash << "\n\n";
    return head.str() + render_report(r.pooled, model_kind_name(r.model)) + warnings_block(r.warnings);
}

ComparisonResult compare_models(const std::vector<ExperimentConfig>& cfgs, const std::string& reference_model) {
    if (cfgs.empty()) throw ConfigError("compare needs at least one experiment config");
    for (const ExperimentConfig& c : cfgs) {
        if (c.fold_count != cfgs.front().fold_count)
            throw ConfigError("compared configs disagree on fold_count");
        if (c.seed != cfgs.front().seed) throw ConfigError("compared configs disagree on seed");
    }

    ComparisonResult out;
    for (const ExperimentConfig& c : cfgs) out.results.push_back(run_cv(c));
    out.data_hash = out.results.front().data_hash;
    for (const CvResult& r : out.results)
        if (r.data_hash != out.data_hash)
            throw ConfigError("dataset hash mismatch across compared configs: " + out.data_hash + " vs " +
                              r.data_hash);

    if (!reference_model.empty()) {
        const ModelKind want = model_kind_from_name(reference_model);
        auto it = std::find_if(out.results.begin(), out.results.end(),
                               [&](const CvResult& r) { return r.model == want; });
        if (it == out.results.end())
            throw ConfigError("reference model '" + reference_model + "' is not among the compared configs");
        out.reference = static_cast<std::size_t>(it - out.results.begin());
    }
    return out;
}

json comparison_to_json(const ComparisonResult& r) {
    json rows = json::array();
    for (const CvResult& cv : r.results) rows.push_back(cv_result_to_json(cv));
    return json{{"schema_version", SCHEMA_VERSION},
                {"dataset_hash", r.data_hash},
                {"reference", model_kind_name(r.results[r.reference].model)},
                {"results", std::move(rows)}};
}

std::string render_comparison(const ComparisonResult& r) {
    std::vector<std::string> labels;
    std::vector<const EvalReport*> reps;
    for (const CvResult& cv : r.results) {
        labels.push_back(model_kind_name(cv.model));
        reps.push_back(&cv.pooled);
    }
    const CvResult& head = r.results.front();
    std::ostringstream os;
    os << "models: " << r.results.size() << "   folds: " << head.fold_count << "   seed: " << head.seed
       << "   samples: " << head.pooled.total << "\n"
       << "dataset: " << r.data_hash << "\n\n";
    os << accuracy_table("Exact match (%)", labels, reps, false) << "\n";
    os << accuracy_table("Within one category (%)", labels, reps, true) << "\n";

    // per-grade deltas against the reference row (exact match, percentage points)
    const EvalReport& ref = r.results[r.reference].pooled;
    const std::size_t lw = label_width(labels);
    os << "Delta vs " << model_kind_name(r.results[r.reference].model)
       << " (exact match, percentage points)\n"
       << table_header(lw, ref.num_classes);
    for (std::size_t i = 0; i < r.results.size(); ++i) {
        const EvalReport& row = r.results[i].pooled;
        os << fmt_label(labels[i], lw);
        for (int g = 1; g <= ref.num_classes; ++g) {
            const auto& a = row.per_grade_exact[static_cast<std::size_t>(g - 1)];
            const auto& b = ref.per_grade_exact[static_cast<std::size_t>(g - 1)];
            std::optional<double> d;
            if (a && b) d = *a - *b;
            os << fmt_cell(d, true);
        }
        std::optional<double> d = row.average_exact - ref.average_exact;
        os << fmt_cell(d, true) << "\n";
    }
    return os.str();
}

namespace {

long long parse_int(const std::string& key, const std::string& value) {
    long long out = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e)
        throw ConfigError("config key '" + key + "': expected an integer, got '" + value + "'");
    return out;
}

std::uint64_t parse_u64(const std::string& key, const std::string& value) {
    std::uint64_t out = 0;
    const char* b = value.data();
    const char* e = b + value.size();
    auto [p, ec] = std::from_chars(b, e, out);
    if (ec != std::errc() || p != e)
        throw ConfigError("config key '" + key + "': expected a non-negative integer, got '" + value + "'");
    return out;
}

double parse_real(const std::string& key, const std::string& value) {
    try {
        std::size_t used = 0;
        const double out = std::stod(value, &used);
        if (used != value.size()) throw std::invalid_argument(value);
        return out;
    } catch (const std::exception&) {
        throw ConfigError("config key '" + key + "': expected a number, got '" + value + "'");
    }
}

bool parse_flag(const std::string& key, const std::string& value) {
    if (value == "true" || value == "1") return true;
    if (value == "false" || value == "0") return false;
    throw ConfigError("config key '" + key + "': expected true/false, got '" + value + "'");
}

std::vector<int> parse_counts(const std::string& key, const std::string& value) {
    std::vector<int> out;
    std::string item;
    std::istringstream is(value);
    while (std::getline(is, item, ','))
        out.push_back(static_cast<int>(parse_int(key, item)));
    if (out.empty()) throw ConfigError("config key '" + key + "': expected a comma-separated list");
    return out;
}

std::string trim(const std::string& s) {
    std::size_t b = s.find_first_not_of(" \t\r\n");
    if (b == std::string::npos) return "";
    std::size_t e = s.find_last_not_of(" \t\r\n");
    return s.substr(b, e - b + 1);
}

std::string json_scalar_to_string(const std::string& key, const json& v) {
    if (v.is_string()) return v.get<std::string>();
    if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
    if (v.is_number()) return v.dump();
    if (v.is_array()) {
        std::string out;
        for (const json& e : v) {
            if (!e.is_number()) throw ConfigError("config key '" + key + "': array entries must be numbers");
            if (!out.empty()) out += ',';
            out += e.dump();
        }
        return out;
    }
    throw ConfigError("config key '" + key + "': unsupported value type");
}

} // namespace

void apply_config_key(ExperimentConfig& cfg, const std::string& key, const std::string& value) {
    if (key == "data.csv") cfg.data.csv_path = value;
    else if (key == "data.counts") cfg.data.synthetic.counts = parse_counts(key, value);
    else if (key == "data.dim") cfg.data.synthetic.feature_dim = static_cast<int>(parse_int(key, value));
    else if (key == "data.separation") cfg.data.synthetic.separation = parse_real(key, value);
    else if (key == "data.nonlinearity") cfg.data.synthetic.nonlinearity = parse_real(key, value);
    else if (key == "data.seed") cfg.data.synthetic.seed = parse_u64(key, value);
    else if (key == "data.standardize") cfg.data.standardize = parse_flag(key, value);
    else if (key == "data.num_classes") cfg.data.num_classes_override = static_cast<int>(parse_int(key, value));
    else if (key == "model") cfg.model = model_kind_from_name(value);
    else if (key == "folds") cfg.fold_count = static_cast<int>(parse_int(key, value));
    else if (key == "seed") cfg.seed = parse_u64(key, value);
    else if (key == "threads") cfg.threads = static_cast<int>(parse_int(key, value));
    else if (key == "train.lr") cfg.build.train.learning_rate = parse_real(key, value);
    else if (key == "train.l2") cfg.build.train.l2 = parse_real(key, value);
    else if (key == "train.epochs") cfg.build.train.epochs = static_cast<int>(parse_int(key, value));
    else if (key == "train.batch") cfg.build.train.batch_size = static_cast<int>(parse_int(key, value));
    else if (key == "train.class_weighting") cfg.build.train.class_weighting = parse_flag(key, value);
    else if (key == "build.auc_eval_fraction") cfg.build.auc_eval_fraction = parse_real(key, value);
    else if (key == "out") cfg.out_dir = value;
    else throw ConfigError("unknown config key '" + key + "'");
}

ExperimentConfig parse_config_text(const std::string& text) {
    ExperimentConfig cfg;
    const std::size_t first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        json j;
        try {
            j = json::parse(text);
        } catch (const json::exception& e) {
            throw ConfigError(std::string("config JSON: ") + e.what());
        }
        if (!j.is_object()) throw ConfigError("config JSON must be an object");
        for (const auto& [key, value] : j.items())
            apply_config_key(cfg, key, json_scalar_to_string(key, value));
        return cfg;
    }

    std::istringstream is(text);
    std::string line;
    int lineno = 0;
    while (std::getline(is, line)) {
        ++lineno;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const std::size_t eq = t.find('=');
        if (eq == std::string::npos)
            throw ConfigError("config line " + std::to_string(lineno) + ": expected key=value, got '" + t + "'");
        apply_config_key(cfg, trim(t.substr(0, eq)), trim(t.substr(eq + 1)));
    }
    return cfg;
}

ExperimentConfig parse_config_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file: " + path);
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config_text(ss.str());
}

} // namespace tourank
