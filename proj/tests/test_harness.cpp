#include <doctest.h>

#include "tourank/errors.hpp"
#include "tourank/harness.hpp"

#include <cstdio>
#include <set>

using namespace tourank;

namespace {

ExperimentConfig synth_config(std::vector<int> counts, ModelKind kind, int epochs = 12) {
    ExperimentConfig cfg;
    cfg.data.synthetic.counts = std::move(counts);
    cfg.data.synthetic.feature_dim = 4;
    cfg.data.synthetic.separation = 6.0;
    cfg.data.synthetic.seed = 77;
    cfg.model = kind;
    cfg.build.train.epochs = epochs;
    cfg.seed = 5;
    return cfg;
}

} // namespace

TEST_SUITE("harness") {

TEST_CASE("model kind names round trip") {
    for (ModelKind k : all_model_kinds()) CHECK(model_kind_from_name(model_kind_name(k)) == k);
    CHECK(all_model_kinds().size() == 6);
    CHECK(model_kind_name(ModelKind::tournament_auc) == "tournament-auc");
    CHECK_THROWS_AS(model_kind_from_name("resnet"), ConfigError);
}

TEST_CASE("dataset source resolves csv or synthetic, never both") {
    DatasetSource src;
    CHECK_THROWS_AS(load_experiment_dataset(src), ConfigError);

    src.synthetic.counts = {5, 6};
    src.synthetic.feature_dim = 3;
    src.synthetic.seed = 2;
    Dataset synth = load_experiment_dataset(src);
    CHECK(synth.samples.size() == 11);
    CHECK(synth.num_classes == 2);

    const std::string path = "tourank_test_source.csv";
    write_csv(synth, path);
    DatasetSource csv_src;
    csv_src.csv_path = path;
    Dataset from_csv = load_experiment_dataset(csv_src);
    CHECK(dataset_hash(from_csv) == dataset_hash(synth));

    csv_src.synthetic.counts = {5, 6};
    CHECK_THROWS_AS(load_experiment_dataset(csv_src), ConfigError);
    std::remove(path.c_str());
}

TEST_CASE("standardize flag rescales loaded features") {
    Dataset raw;
    raw.num_classes = 2;
    raw.feature_dim = 1;
    for (int i = 0; i < 6; ++i)
        raw.samples.push_back({"r" + std::to_string(i), 1 + i % 2, {100.0 + 7.0 * i}});
    const std::string path = "tourank_test_std.csv";
    write_csv(raw, path);

    DatasetSource src;
    src.csv_path = path;
    src.standardize = true;
    Dataset ds = load_experiment_dataset(src);
    double mean = 0;
    for (const auto& s : ds.samples) mean += s.features[0];
    CHECK(std::abs(mean / 6.0) < 1e-12);
    std::remove(path.c_str());
}

TEST_CASE("run_cv pools one prediction per sample with fold sizes off by at most one") {
    // 294 samples, 5 folds: the held-out folds must be 58 or 59 wide
    ExperimentConfig cfg = synth_config({8, 96, 105, 63, 14, 8}, ModelKind::tournament_class, 8);
    CvResult r = run_cv(cfg);

    CHECK(r.pooled.total == 294);
    CHECK(r.predictions.size() == 294);
    CHECK(r.per_fold.size() == 5);
    long long sum = 0;
    for (const EvalReport& f : r.per_fold) {
        CHECK((f.total == 58 || f.total == 59));
        sum += f.total;
    }
    CHECK(sum == 294);
    CHECK(r.fold_build_meta.size() == 5);
    for (const auto& meta : r.fold_build_meta) CHECK(meta.size() == 5); // N-1 internal nodes

    // pooled exact match equals the confusion-matrix trace over the total
    long long trace = 0;
    for (int g = 0; g < 6; ++g) trace += r.pooled.confusion[g][g];
    CHECK(r.pooled.average_exact == doctest::Approx(100.0 * trace / 294.0).epsilon(1e-12));
    for (int p : r.predictions) {
        CHECK(p >= 1);
        CHECK(p <= 6);
    }
}

TEST_CASE("widely separated clusters are solved by every model kind") {
    for (ModelKind kind : all_model_kinds()) {
        CAPTURE(model_kind_name(kind));
        // 200 epochs: plenty for SGD to park every node's boundary between clusters
        ExperimentConfig cfg = synth_config({12, 12, 12, 12}, kind, 200);
        cfg.data.synthetic.separation = 1000.0;
        CvResult r = run_cv(cfg);
        CHECK(r.pooled.average_exact >= 99.0);
    }
}

TEST_CASE("fold assignments are shared across model kinds") {
    ExperimentConfig a = synth_config({9, 17, 13}, ModelKind::rank, 6);
    ExperimentConfig b = synth_config({9, 17, 13}, ModelKind::multiclass, 6);
    CvResult ra = run_cv(a);
    CvResult rb = run_cv(b);
    REQUIRE(ra.per_fold.size() == rb.per_fold.size());
    for (std::size_t f = 0; f < ra.per_fold.size(); ++f)
        CHECK(ra.per_fold[f].grade_counts == rb.per_fold[f].grade_counts);
    CHECK(ra.data_hash == rb.data_hash);
    CHECK(ra.truth == rb.truth);
}

TEST_CASE("cv reports are byte-identical across reruns and thread counts") {
    ExperimentConfig cfg = synth_config({7, 19, 11, 8}, ModelKind::tournament_auc, 10);
    const std::string first = json_to_string(cv_result_to_json(run_cv(cfg)));
    CHECK(json_to_string(cv_result_to_json(run_cv(cfg))) == first);

    cfg.threads = 4;
    CHECK(json_to_string(cv_result_to_json(run_cv(cfg))) == first);

    cfg.threads = 1;
    cfg.seed = 6;
    CHECK(json_to_string(cv_result_to_json(run_cv(cfg))) != first);
}

TEST_CASE("leave-one-out on ten samples pools ten predictions") {
    ExperimentConfig cfg = synth_config({1, 5, 4}, ModelKind::tournament_auc, 6);
    cfg.fold_count = 10;
    CvResult r = run_cv(cfg); // never aborts, even when training folds miss grade 1
    CHECK(r.pooled.total == 10);
    CHECK(r.per_fold.size() == 10);
    for (const EvalReport& f : r.per_fold) CHECK(f.total == 1);
    for (int p : r.predictions) {
        CHECK(p >= 1);
        CHECK(p <= 3);
    }
}

TEST_CASE("config validation rejects bad shapes") {
    ExperimentConfig cfg = synth_config({4, 4}, ModelKind::linear);
    cfg.fold_count = 1;
    CHECK_THROWS_AS(run_cv(cfg), ConfigError);
    cfg.fold_count = 9; // only 8 samples
    CHECK_THROWS_AS(run_cv(cfg), ConfigError);
    cfg.fold_count = 2;
    cfg.threads = 0;
    CHECK_THROWS_AS(run_cv(cfg), ConfigError);
    cfg.threads = 1;
    cfg.build.auc_eval_fraction = 1.0;
    CHECK_THROWS_AS(run_cv(cfg), ConfigError);
}

TEST_CASE("rendered tables carry per-grade cells, averages, and n/a markers") {
    ExperimentConfig cfg = synth_config({6, 9, 7}, ModelKind::multiclass, 40);
    CvResult r = run_cv(cfg);
    const std::string text = render_tables(r);

    CHECK(text.find("Exact match (%)") != std::string::npos);
    CHECK(text.find("Within one category (%)") != std::string::npos);
    CHECK(text.find("Confusion matrix") != std::string::npos);
    CHECK(text.find("multiclass") != std::string::npos);
    char avg[32];
    std::snprintf(avg, sizeof avg, "%.2f", r.pooled.average_exact);
    CHECK(text.find(avg) != std::string::npos);

    // absent grade renders as n/a: nobody in the test data has grade 4
    CvResult na = r;
    na.pooled = build_report({1, 2, 2}, {1, 2, 3}, 4);
    CHECK(render_tables(na).find("n/a") != std::string::npos);
    CHECK(text.find("n/a") == std::string::npos);
}

TEST_CASE("identity predictions render as all-100 rows") {
    CvResult r;
    r.model = ModelKind::linear;
    r.fold_count = 2;
    r.pooled = build_report({1, 2, 3, 1, 2, 3}, {1, 2, 3, 1, 2, 3}, 3);
    const std::string text = render_tables(r);
    std::size_t hits = 0, at = 0;
    while ((at = text.find("100.00", at)) != std::string::npos) ++hits, ++at;
    CHECK(hits == 8); // 3 grades + average, in both tables
}

TEST_CASE("compare_models runs a shared-fold comparison with deltas") {
    std::vector<ExperimentConfig> cfgs = {
        synth_config({8, 14, 10}, ModelKind::tournament_class, 8),
        synth_config({8, 14, 10}, ModelKind::linear, 8),
        synth_config({8, 14, 10}, ModelKind::tournament_class, 8),
    };
    ComparisonResult cmp = compare_models(cfgs, "linear");
    CHECK(cmp.reference == 1);
    CHECK(cmp.results.size() == 3);
    CHECK(cmp.data_hash == cmp.results[0].data_hash);

    // identical configs produce identical rows
    CHECK(json_to_string(cv_result_to_json(cmp.results[0])) ==
          json_to_string(cv_result_to_json(cmp.results[2])));

    const std::string text = render_comparison(cmp);
    CHECK(text.find("Delta vs linear") != std::string::npos);
    CHECK(text.find("+0.00") != std::string::npos); // the reference's own delta row

    const nlohmann::json j = comparison_to_json(cmp);
    CHECK(j.at("reference") == "linear");
    CHECK(j.at("results").size() == 3);
}

TEST_CASE("compare_models rejects mismatched folds, seeds, datasets, and references") {
    std::vector<ExperimentConfig> cfgs = {
        synth_config({8, 14, 10}, ModelKind::rank, 6),
        synth_config({8, 14, 10}, ModelKind::linear, 6),
    };
    cfgs[1].fold_count = 4;
    CHECK_THROWS_AS(compare_models(cfgs), ConfigError);
    cfgs[1].fold_count = 5;
    cfgs[1].seed = 99;
    CHECK_THROWS_AS(compare_models(cfgs), ConfigError);
    cfgs[1].seed = cfgs[0].seed;
    cfgs[1].data.synthetic.seed = 78; // different samples, same shape
    CHECK_THROWS_AS(compare_models(cfgs), ConfigError);
    cfgs[1].data.synthetic.seed = 77;
    CHECK_THROWS_AS(compare_models(cfgs, "multiclass"), ConfigError);
    CHECK_THROWS_AS(compare_models({}, ""), ConfigError);
}

TEST_CASE("key=value and JSON configs parse to the same experiment") {
    const std::string kv =
        "# synthetic run\n"
        "data.counts = 8,96,105,63,14,8\n"
        "data.dim = 16\n"
        "data.separation = 12\n"
        "data.nonlinearity = 4\n"
        "data.seed = 3\n"
        "model = tournament-auc\n"
        "folds = 5\n"
        "seed = 42\n"
        "threads = 2\n"
        "train.lr = 0.1\n"
        "train.l2 = 0.001\n"
        "train.epochs = 150\n"
        "train.batch = 16\n"
        "train.class_weighting = true\n"
        "build.auc_eval_fraction = 0.3\n"
        "out = results\n";
    const std::string js = R"({
        "data.counts": [8, 96, 105, 63, 14, 8],
        "data.dim": 16,
        "data.separation": 12,
        "data.nonlinearity": 4,
        "data.seed": 3,
        "model": "tournament-auc",
        "folds": 5,
        "seed": 42,
        "threads": 2,
        "train.lr": 0.1,
        "train.l2": 0.001,
        "train.epochs": 150,
        "train.batch": 16,
        "train.class_weighting": true,
        "build.auc_eval_fraction": 0.3,
        "out": "results"
    })";

    for (const std::string* text : {&kv, &js}) {
        ExperimentConfig cfg = parse_config_text(*text);
        CHECK(cfg.data.synthetic.counts == std::vector<int>{8, 96, 105, 63, 14, 8});
        CHECK(cfg.data.synthetic.feature_dim == 16);
        CHECK(cfg.data.synthetic.separation == 12.0);
        CHECK(cfg.data.synthetic.nonlinearity == 4.0);
        CHECK(cfg.data.synthetic.seed == 3);
        CHECK(cfg.model == ModelKind::tournament_auc);
        CHECK(cfg.fold_count == 5);
        CHECK(cfg.seed == 42);
        CHECK(cfg.threads == 2);
        CHECK(cfg.build.train.learning_rate == 0.1);
        CHECK(cfg.build.train.l2 == 0.001);
        CHECK(cfg.build.train.epochs == 150);
        CHECK(cfg.build.train.batch_size == 16);
        CHECK(cfg.build.train.class_weighting);
        CHECK(cfg.build.auc_eval_fraction == 0.3);
        CHECK(cfg.out_dir == "results");
    }
}

TEST_CASE("config parsing rejects junk with precise messages") {
    CHECK_THROWS_AS(parse_config_text("volume = 11\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("folds = five\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("just words\n"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("{\"folds\": }"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("[1, 2]"), ConfigError);
    CHECK_THROWS_AS(parse_config_text("data.counts = \n"), ConfigError);
    CHECK_THROWS_AS(parse_config_file("no_such_config.cfg"), ConfigError);

    // defaults survive an empty config
    ExperimentConfig cfg = parse_config_text("\n# nothing here\n");
    CHECK(cfg.fold_count == 5);
    CHECK(cfg.model == ModelKind::tournament_auc);

    // later keys and explicit overrides win
    cfg = parse_config_text("folds = 3\nfolds = 7\n");
    CHECK(cfg.fold_count == 7);
    apply_config_key(cfg, "folds", "4");
    CHECK(cfg.fold_count == 4);
}

} // TEST_SUITE("harness")
