#include "tourank/cam.hpp"
#include "tourank/errors.hpp"
#include "tourank/harness.hpp"

#include <CLI11.hpp>

#include <cmath>
#include <cstdio>
#include <filesystem>
#include <functional>
#include <iostream>
#include <string>
#include <vector>

using namespace tourank;
using nlohmann::json;

namespace {

namespace fs = std::filesystem;

// Config precedence: file, then --set pairs in order, then the shortcut flags.
struct ConfigFlags {
    std::string config_path;
    std::vector<std::string> sets;
    std::string data_csv;
    std::string model;
    int folds = -1;
    std::int64_t seed = -1;
    int threads = -1;
    std::string out;

    void attach(CLI::App& sub, bool with_folds = true) {
        sub.add_option("-c,--config", config_path, "experiment config file (JSON or key=value)");
        sub.add_option("--set", sets, "override one config key (key=value, repeatable)");
        sub.add_option("--data", data_csv, "dataset CSV path (shorthand for data.csv)");
        sub.add_option("--model", model, "model kind");
        if (with_folds) sub.add_option("--folds", folds, "fold count");
        sub.add_option("--seed", seed, "experiment seed");
        sub.add_option("--threads", threads, "concurrent folds");
        sub.add_option("-o,--out", out, "output directory");
    }

    ExperimentConfig resolve() const {
        ExperimentConfig cfg;
        if (!config_path.empty()) cfg = parse_config_file(config_path);
        for (const std::string& kv : sets) {
            const std::size_t eq = kv.find('=');
            if (eq == std::string::npos) throw ConfigError("--set expects key=value, got '" + kv + "'");
            apply_config_key(cfg, kv.substr(0, eq), kv.substr(eq + 1));
        }
        if (!data_csv.empty()) cfg.data.csv_path = data_csv;
        if (!model.empty()) cfg.model = model_kind_from_name(model);
        if (folds >= 0) cfg.fold_count = folds;
        if (seed >= 0) cfg.seed = static_cast<std::uint64_t>(seed);
        if (threads >= 0) cfg.threads = threads;
        if (!out.empty()) cfg.out_dir = out;
        return cfg;
    }
};

void ensure_dir(const std::string& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ConfigError("cannot create output directory '" + dir + "': " + ec.message());
}

std::string join_path(const std::string& dir, const std::string& name) {
    return (fs::path(dir) / name).string();
}

int cmd_gen_data(const std::string& counts, int dim, double separation, double nonlinearity,
                 std::uint64_t seed, const std::string& out) {
    ExperimentConfig shim; // reuse the config parser for the counts list
    apply_config_key(shim, "data.counts", counts);
    SyntheticSpec spec = shim.data.synthetic;
    spec.feature_dim = dim;
    spec.separation = separation;
    spec.nonlinearity = nonlinearity;
    spec.seed = seed;

    const Dataset ds = generate_synthetic(spec).dataset;
    write_csv(ds, out);
    std::printf("wrote %zu samples (%d grades, %d features) to %s\n", ds.samples.size(), ds.num_classes,
                ds.feature_dim, out.c_str());
    std::printf("dataset: %s\n", dataset_hash(ds).c_str());
    return 0;
}

int cmd_train(const ConfigFlags& flags) {
    ExperimentConfig cfg = flags.resolve();
    validate_experiment_config(cfg);
    if (cfg.out_dir.empty()) throw ConfigError("train needs an output directory (--out)");

    const Dataset ds = load_experiment_dataset(cfg.data);
    BuildConfig bc = cfg.build;
    bc.seed = cfg.seed;
    bc.train.seed = cfg.seed;
    const AnyModel model = train_any(ds, cfg.model, bc);

    ensure_dir(cfg.out_dir);
    const std::string model_path = join_path(cfg.out_dir, "model.json");
    save_model(model, model_path);
    std::printf("trained %s on %zu samples (dataset %s)\n", model_kind_name(cfg.model).c_str(),
                ds.samples.size(), dataset_hash(ds).c_str());
    std::printf("model: %s\n", model_path.c_str());
    if (const auto* tree = std::get_if<TournamentTree>(&model)) {
        const std::string meta_path = join_path(cfg.out_dir, "build_meta.json");
        write_text_file(meta_path, json_to_string(build_meta_to_json(*tree)));
        std::printf("build meta: %s\n", meta_path.c_str());
        for (const std::string& w : tree->warnings) std::printf("warning: %s\n", w.c_str());
    }
    return 0;
}

int cmd_eval(const std::string& model_path, const std::string& data_path, const std::string& out) {
    const AnyModel model = load_model(model_path);
    const int n = model_num_classes(model);
    const Dataset ds = load_csv(data_path, n);
    if (ds.feature_dim != model_feature_dim(model))
        throw DimensionError("model expects " + std::to_string(model_feature_dim(model)) +
                             " features, dataset has " + std::to_string(ds.feature_dim));

    const std::vector<int> pred = predict_any_batch(model, ds);
    std::vector<int> truth;
    truth.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) truth.push_back(s.grade);
    const EvalReport report = build_report(pred, truth, n);

    std::cout << render_report(report, fs::path(model_path).stem().string());
    if (!out.empty()) {
        ensure_dir(out);
        json j = report_to_json(report);
        j["dataset_hash"] = dataset_hash(ds);
        write_text_file(join_path(out, "eval_report.json"), json_to_string(j));
        std::printf("report: %s\n", join_path(out, "eval_report.json").c_str());
    }
    return 0;
}

int cmd_cv(const ConfigFlags& flags) {
    const ExperimentConfig cfg = flags.resolve();
    const CvResult result = run_cv(cfg);
    const std::string text = render_tables(result);
    std::cout << text;
    if (!cfg.out_dir.empty()) {
        ensure_dir(cfg.out_dir);
        write_text_file(join_path(cfg.out_dir, "cv_report.json"), json_to_string(cv_result_to_json(result)));
        write_text_file(join_path(cfg.out_dir, "cv_report.txt"), text);
        std::printf("report: %s\n", join_path(cfg.out_dir, "cv_report.json").c_str());
    }
    return 0;
}

int cmd_compare(const std::vector<std::string>& config_paths, const ConfigFlags& flags,
                const std::string& models, const std::string& reference) {
    std::vector<ExperimentConfig> cfgs;
    if (!models.empty()) {
        // one shared base config, one run per listed kind
        ExperimentConfig base = flags.resolve();
        std::istringstream is(models);
        std::string name;
        while (std::getline(is, name, ','))
            if (!name.empty()) {
                base.model = model_kind_from_name(name);
                cfgs.push_back(base);
            }
    } else {
        for (const std::string& path : config_paths) {
            ConfigFlags per = flags;
            per.config_path = path;
            cfgs.push_back(per.resolve());
        }
    }
    if (cfgs.empty())
        throw ConfigError("compare needs --models or at least one --config");

    const ComparisonResult cmp = compare_models(cfgs, reference);
    const std::string text = render_comparison(cmp);
    std::cout << text;
    const std::string out = flags.out.empty() ? (cfgs.front().out_dir) : flags.out;
    if (!out.empty()) {
        ensure_dir(out);
        write_text_file(join_path(out, "comparison.json"), json_to_string(comparison_to_json(cmp)));
        write_text_file(join_path(out, "comparison.txt"), text);
        std::printf("report: %s\n", join_path(out, "comparison.json").c_str());
    }
    return 0;
}

Grid grid_from_json(const json& j) {
    if (!j.is_array()) throw ParseError("cam input: grid must be an array of rows");
    Grid g;
    for (const json& row : j) {
        if (!row.is_array()) throw ParseError("cam input: grid rows must be arrays");
        g.emplace_back();
        for (const json& v : row) {
            if (!v.is_number()) throw ParseError("cam input: grid cells must be numbers");
            g.back().push_back(v.get<double>());
        }
    }
    return g;
}

int cmd_cam(const std::string& input_path, int height, int width, const std::string& out_json,
            const std::string& out_pgm) {
    const json j = load_json_file(input_path);
    if (!j.is_object() || !j.contains("maps") || !j.contains("weights"))
        throw ParseError("cam input must be an object with 'maps' and 'weights'");

    CamInput input;
    for (const json& m : j.at("maps")) input.feature_maps.push_back(grid_from_json(m));
    for (const json& w : j.at("weights")) {
        if (!w.is_number()) throw ParseError("cam input: weights must be numbers");
        input.class_weights.push_back(w.get<double>());
    }

    const Grid cam = compute_cam(input);
    const CamMap up = bilinear_upsample(cam, height, width);
    const NormalizedCam norm = normalize_cam(up);

    if (!out_json.empty()) {
        const json out{{"schema_version", SCHEMA_VERSION},
                       {"height", norm.map.height},
                       {"width", norm.map.width},
                       {"source_height", norm.map.source_h},
                       {"source_width", norm.map.source_w},
                       {"constant_input", norm.constant_input},
                       {"grid", norm.map.grid}};
        write_text_file(out_json, json_to_string(out));
        std::printf("cam json: %s\n", out_json.c_str());
    }
    if (!out_pgm.empty()) {
        std::string pgm = "P2\n" + std::to_string(norm.map.width) + " " + std::to_string(norm.map.height) + "\n255\n";
        for (const auto& row : norm.map.grid) {
            for (std::size_t x = 0; x < row.size(); ++x) {
                if (x) pgm += ' ';
                pgm += std::to_string(static_cast<int>(std::lround(row[x] * 255.0)));
            }
            pgm += '\n';
        }
        write_text_file(out_pgm, pgm);
        std::printf("cam pgm: %s\n", out_pgm.c_str());
    }
    if (norm.constant_input) std::printf("note: constant input map; output is all zeros\n");
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"tournament-based ordinal classification toolkit"};
    app.require_subcommand(1);

    // gen-data
    auto* gen = app.add_subcommand("gen-data", "generate a synthetic dataset CSV");
    std::string gen_counts, gen_out;
    int gen_dim = 16;
    double gen_sep = 3.0, gen_nonlin = 0.0;
    std::uint64_t gen_seed = 0;
    gen->add_option("--counts", gen_counts, "per-grade sample counts, e.g. 8,96,105,63,14,8")->required();
    gen->add_option("--dim", gen_dim, "feature dimension");
    gen->add_option("--separation", gen_sep, "cluster separation (mean gap over noise scale)");
    gen->add_option("--nonlinearity", gen_nonlin, "compression of adjacent grade pairs");
    gen->add_option("--seed", gen_seed, "generator seed");
    gen->add_option("-o,--out", gen_out, "output CSV path")->required();

    // train
    auto* train = app.add_subcommand("train", "train one model on the full dataset");
    ConfigFlags train_flags;
    train_flags.attach(*train, /*with_folds=*/false);

    // eval
    auto* eval = app.add_subcommand("eval", "evaluate a saved model against a CSV");
    std::string eval_model, eval_data, eval_out;
    eval->add_option("--model-file", eval_model, "model JSON path")->required();
    eval->add_option("--data", eval_data, "dataset CSV path")->required();
    eval->add_option("-o,--out", eval_out, "output directory (optional)");

    // cv
    auto* cv = app.add_subcommand("cv", "k-fold cross-validation for one model kind");
    ConfigFlags cv_flags;
    cv_flags.attach(*cv);

    // compare
    auto* compare = app.add_subcommand("compare", "cross-validate several models on shared folds");
    ConfigFlags cmp_flags;
    cmp_flags.attach(*compare);
    std::vector<std::string> cmp_configs;
    std::string cmp_models, cmp_reference;
    compare->add_option("--configs", cmp_configs, "experiment config files (repeatable)");
    compare->add_option("--models", cmp_models, "comma-separated model kinds sharing one base config");
    compare->add_option("--reference", cmp_reference, "model kind the deltas are measured against");

    // cam
    auto* cam = app.add_subcommand("cam", "compute, upsample, and normalize a class activation map");
    std::string cam_input, cam_json, cam_pgm;
    int cam_h = 224, cam_w = 224;
    cam->add_option("--input", cam_input, "JSON file with 'maps' and 'weights'")->required();
    cam->add_option("--height", cam_h, "target height");
    cam->add_option("--width", cam_w, "target width");
    cam->add_option("--out-json", cam_json, "normalized map JSON path");
    cam->add_option("--out-pgm", cam_pgm, "8-bit PGM (P2) path");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1; // usage problems collapse to exit code 1
    }

    try {
        if (gen->parsed()) return cmd_gen_data(gen_counts, gen_dim, gen_sep, gen_nonlin, gen_seed, gen_out);
        if (train->parsed()) return cmd_train(train_flags);
        if (eval->parsed()) return cmd_eval(eval_model, eval_data, eval_out);
        if (cv->parsed()) return cmd_cv(cv_flags);
        if (compare->parsed()) return cmd_compare(cmp_configs, cmp_flags, cmp_models, cmp_reference);
        if (cam->parsed()) return cmd_cam(cam_input, cam_h, cam_w, cam_json, cam_pgm);
    } catch (const ConfigError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 1;
    } catch (const BuildError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 3;
    } catch (const Error& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    } catch (const std::exception& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return 2;
    }
    return 0;
}
