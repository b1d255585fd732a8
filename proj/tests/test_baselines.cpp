#include <doctest.h>

#include "tourank/baselines.hpp"
#include "tourank/errors.hpp"
#include "tourank/metrics.hpp"

#include <cmath>
#include <random>

using namespace tourank;

namespace {

// ensemble whose model j always votes "over" (indicator 1) or "under" (0)
RankEnsemble fixed_indicators(const std::vector<int>& indicators) {
    RankEnsemble e;
    e.num_classes = static_cast<int>(indicators.size()) + 1;
    e.feature_dim = 1;
    for (int ind : indicators) {
        BinaryModel m;
        m.weights = {0.0};
        m.bias = ind ? 2.0 : -2.0;
        e.models.push_back(m);
    }
    return e;
}

Dataset linear_dataset(int n_classes, int per_grade) {
    // feature 0 IS the grade; feature 1 carries no signal
    Dataset ds;
    ds.num_classes = n_classes;
    ds.feature_dim = 2;
    int id = 0;
    for (int g = 1; g <= n_classes; ++g)
        for (int i = 0; i < per_grade; ++i) {
            Sample s;
            s.id = "lin" + std::to_string(id++);
            s.grade = g;
            s.features = {static_cast<double>(g), (i % 2 == 0) ? 0.25 : -0.25};
            ds.samples.push_back(std::move(s));
        }
    return ds;
}

} // namespace

TEST_SUITE("baselines") {

TEST_CASE("rank ensemble holds one model per threshold") {
    SyntheticSpec spec;
    spec.counts = {6, 6, 6, 6, 6, 6};
    spec.feature_dim = 4;
    spec.separation = 5.0;
    spec.seed = 2;
    Dataset ds = generate_synthetic(spec).dataset;

    TrainConfig cfg;
    cfg.epochs = 10;
    RankEnsemble e = train_rank_ensemble(ds, cfg);
    CHECK(e.models.size() == 5);
    CHECK(e.num_classes == 6);

    // thresholds are distinct problems: the models differ
    CHECK(e.models[0].weights != e.models[4].weights);
}

TEST_CASE("rank prediction with two classes reduces to thresholding one model") {
    SyntheticSpec spec;
    spec.counts = {12, 12};
    spec.feature_dim = 3;
    spec.separation = 6.0;
    spec.seed = 4;
    Dataset ds = generate_synthetic(spec).dataset;

    TrainConfig cfg;
    cfg.epochs = 30;
    RankEnsemble e = train_rank_ensemble(ds, cfg);
    REQUIRE(e.models.size() == 1);
    for (const auto& s : ds.samples) {
        const int direct = e.models[0].score(s.features) > 0.5 ? 2 : 1;
        CHECK(predict_rank(e, s.features) == direct);
    }
}

TEST_CASE("rank aggregation is the indicator sum") {
    CHECK(predict_rank(fixed_indicators({1, 1, 0, 0, 0}), {0.0}) == 3);
    CHECK(predict_rank(fixed_indicators({0, 0, 0, 0, 0}), {0.0}) == 1);
    CHECK(predict_rank(fixed_indicators({1, 1, 1, 1, 1}), {0.0}) == 6);
    // non-monotone sequences use the same sum
    CHECK(predict_rank(fixed_indicators({1, 0, 1, 0, 0}), {0.0}) == 3);

    RankEnsemble empty;
    CHECK_THROWS_AS(predict_rank(empty, {0.0}), DomainError);
}

TEST_CASE("rank prediction equals the crossing point on monotone sequences") {
    std::mt19937_64 rng(64);
    for (int trial = 0; trial < 60; ++trial) {
        const int n_models = 1 + static_cast<int>(rng() % 8);
        const int crossing = static_cast<int>(rng() % (static_cast<std::uint64_t>(n_models) + 1));
        std::vector<int> indicators(static_cast<std::size_t>(n_models), 0);
        for (int j = 0; j < crossing; ++j) indicators[static_cast<std::size_t>(j)] = 1;
        const int got = predict_rank(fixed_indicators(indicators), {0.0});
        CHECK(got == crossing + 1);
        CHECK(got >= 1);
        CHECK(got <= n_models + 1);
    }
}

TEST_CASE("rank training is deterministic per seed") {
    SyntheticSpec spec;
    spec.counts = {8, 8, 8};
    spec.feature_dim = 4;
    spec.separation = 3.0;
    spec.seed = 6;
    Dataset ds = generate_synthetic(spec).dataset;

    TrainConfig cfg;
    cfg.epochs = 15;
    cfg.seed = 900;
    RankEnsemble a = train_rank_ensemble(ds, cfg);
    RankEnsemble b = train_rank_ensemble(ds, cfg);
    for (std::size_t j = 0; j < a.models.size(); ++j) {
        CHECK(a.models[j].weights == b.models[j].weights);
        CHECK(a.models[j].bias == b.models[j].bias);
    }
    cfg.seed = 901;
    RankEnsemble c = train_rank_ensemble(ds, cfg);
    CHECK(a.models[0].weights != c.models[0].weights);
}

TEST_CASE("regression rounding is half-up with clamping") {
    RegressionModel m;
    m.weights = {1.0};
    m.bias = 0.0;
    m.num_classes = 6;
    CHECK(predict_regression(m, {3.49}) == 3);
    CHECK(predict_regression(m, {3.5}) == 4);
    CHECK(predict_regression(m, {0.2}) == 1);
    CHECK(predict_regression(m, {6.8}) == 6);
    CHECK(predict_regression(m, {-3.0}) == 1);
    CHECK(predict_regression(m, {2.5}) == 3);
    CHECK_THROWS_AS(predict_regression(m, {1.0, 2.0}), DimensionError);

    // monotone non-decreasing in the raw output
    int prev = 0;
    for (double x = -1.0; x < 8.0; x += 0.083) {
        const int p = predict_regression(m, {x});
        CHECK(p >= prev);
        prev = p;
    }
}

TEST_CASE("regression recovers an exactly linear grade relation") {
    Dataset ds = linear_dataset(6, 10);
    TrainConfig cfg;
    cfg.epochs = 200;
    cfg.l2 = 0.0;
    cfg.seed = 7;
    RegressionModel m = train_regression(ds, cfg);

    std::vector<int> truth;
    for (const auto& s : ds.samples) truth.push_back(s.grade);
    CHECK(exact_match(predict_regression_batch(m, ds), truth) == 100.0);
    // the fitted map is essentially the identity on feature 0
    CHECK(m.weights[0] == doctest::Approx(1.0).epsilon(0.05));
    CHECK(std::abs(m.weights[1]) < 0.05);
}

TEST_CASE("regression training is deterministic; the binary-loss weighting flag does not touch it") {
    SyntheticSpec spec;
    spec.counts = {4, 30, 5};
    spec.feature_dim = 3;
    spec.separation = 4.0;
    spec.seed = 11;
    Dataset ds = generate_synthetic(spec).dataset;

    TrainConfig cfg;
    cfg.epochs = 25;
    cfg.seed = 3;
    RegressionModel a = train_regression(ds, cfg);
    RegressionModel b = train_regression(ds, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.bias == b.bias);

    cfg.class_weighting = true;
    RegressionModel w1 = train_regression(ds, cfg);
    CHECK(w1.weights == a.weights); // least squares on the grade either way
    CHECK(w1.bias == a.bias);
}

TEST_CASE("multiclass zero model spreads probability uniformly and predicts grade 1") {
    MulticlassModel m;
    m.weights.assign(4, std::vector<double>(3, 0.0));
    m.biases.assign(4, 0.0);
    auto p = m.probabilities({0.5, -1.0, 2.0});
    REQUIRE(p.size() == 4);
    double sum = 0.0;
    for (double v : p) {
        CHECK(v == doctest::Approx(0.25).epsilon(1e-12));
        sum += v;
    }
    CHECK(std::abs(sum - 1.0) < 1e-9);
    CHECK(predict_multiclass(m, {0.5, -1.0, 2.0}) == 1); // tie -> lowest grade
}

TEST_CASE("multiclass probabilities normalize on arbitrary models") {
    std::mt19937_64 rng(15);
    std::uniform_real_distribution<double> unif(-20.0, 20.0);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n_classes = 2 + rng() % 6;
        const std::size_t d = 1 + rng() % 5;
        MulticlassModel m;
        m.weights.assign(n_classes, std::vector<double>(d));
        m.biases.assign(n_classes, 0.0);
        for (auto& wc : m.weights)
            for (auto& v : wc) v = unif(rng);
        for (auto& b : m.biases) b = unif(rng);
        std::vector<double> x(d);
        for (auto& v : x) v = unif(rng);

        auto p = m.probabilities(x);
        double sum = 0.0;
        for (double v : p) {
            CHECK(v >= 0.0);
            sum += v;
        }
        CHECK(std::abs(sum - 1.0) < 1e-9);
        const int pred = predict_multiclass(m, x);
        CHECK(pred >= 1);
        CHECK(pred <= static_cast<int>(n_classes));
    }
}

TEST_CASE("multiclass separable data trains to perfect accuracy") {
    SyntheticSpec spec;
    spec.counts = {10, 10, 10};
    spec.feature_dim = 5;
    spec.separation = 1000.0;
    spec.seed = 21;
    Dataset ds = generate_synthetic(spec).dataset;

    TrainConfig cfg;
    cfg.epochs = 150;
    cfg.seed = 5;
    MulticlassModel m = train_multiclass(ds, cfg);
    std::vector<int> truth;
    for (const auto& s : ds.samples) truth.push_back(s.grade);
    CHECK(exact_match(predict_multiclass_batch(m, ds), truth) == 100.0);
}

TEST_CASE("multiclass training is deterministic and survives missing grades") {
    Dataset ds;
    ds.num_classes = 3;
    ds.feature_dim = 2;
    std::mt19937_64 rng(9);
    std::normal_distribution<double> gauss(0.0, 1.0);
    for (int i = 0; i < 20; ++i) {
        Sample s;
        s.id = "m" + std::to_string(i);
        s.grade = (i % 2 == 0) ? 1 : 3; // grade 2 never appears
        s.features = {gauss(rng) + s.grade, gauss(rng)};
        ds.samples.push_back(std::move(s));
    }

    TrainConfig cfg;
    cfg.epochs = 20;
    cfg.seed = 44;
    cfg.class_weighting = true; // ignored by multiclass, must still train fine
    MulticlassModel a = train_multiclass(ds, cfg);
    MulticlassModel b = train_multiclass(ds, cfg);
    CHECK(a.weights == b.weights);
    CHECK(a.biases == b.biases);
    for (const auto& s : ds.samples) {
        const int p = predict_multiclass(a, s.features);
        CHECK(p >= 1);
        CHECK(p <= 3);
    }

    CHECK_THROWS_AS(a.probabilities({1.0, 2.0, 3.0}), DimensionError);
}

} // TEST_SUITE("baselines")
