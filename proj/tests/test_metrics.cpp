#include <doctest.h>

#include "tourank/errors.hpp"
#include "tourank/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <random>

using namespace tourank;

namespace {

// Independent quadratic-time oracle: concordant pairs plus half the ties.
double pairwise_auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    double num = 0.0;
    std::size_t pairs = 0;
    for (std::size_t i = 0; i < scores.size(); ++i) {
        if (labels[i] != 1) continue;
        for (std::size_t j = 0; j < scores.size(); ++j) {
            if (labels[j] != 0) continue;
            ++pairs;
            if (scores[i] > scores[j]) num += 1.0;
            else if (scores[i] == scores[j]) num += 0.5;
        }
    }
    return num / static_cast<double>(pairs);
}

} // namespace

TEST_SUITE("metrics") {

TEST_CASE("auc fixed examples") {
    CHECK(auc({0.9, 0.8, 0.2, 0.1}, {1, 1, 0, 0}) == 1.0);
    CHECK(auc({0.8, 0.6, 0.4, 0.2}, {1, 0, 1, 0}) == 0.75);
    CHECK(auc({0.3, 0.3, 0.3}, {1, 0, 1}) == 0.5);
    CHECK(auc({0.1, 0.9}, {1, 0}) == 0.0);
}

TEST_CASE("auc matches the pairwise oracle exactly") {
    std::mt19937_64 rng(2024);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 200; ++trial) {
        const std::size_t n = 2 + rng() % 199;
        std::vector<double> scores(n);
        std::vector<int> labels(n);
        bool quantize = (trial % 2) == 0; // force heavy ties on half the trials
        int pos = 0;
        for (std::size_t i = 0; i < n; ++i) {
            double v = unif(rng);
            scores[i] = quantize ? std::round(v * 8.0) / 8.0 : v;
            labels[i] = (rng() % 2) ? 1 : 0;
            pos += labels[i];
        }
        if (pos == 0) labels[0] = 1;
        if (pos == static_cast<int>(n)) labels[0] = 0;
        const double got = auc(scores, labels);
        const double want = pairwise_auc(scores, labels);
        CHECK(std::abs(got - want) < 1e-12);
        CHECK(got >= 0.0);
        CHECK(got <= 1.0);
    }
}

TEST_CASE("auc is invariant under strictly increasing transforms") {
    std::mt19937_64 rng(31);
    std::uniform_real_distribution<double> unif(-3.0, 3.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + rng() % 60;
        std::vector<double> scores(n), warped(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = unif(rng);
            warped[i] = std::exp(0.5 * scores[i]) + 2.0 * scores[i]; // strictly increasing
            labels[i] = (rng() % 3 == 0) ? 1 : 0;
        }
        labels[0] = 1;
        labels[1] = 0;
        CHECK(auc(scores, labels) == doctest::Approx(auc(warped, labels)).epsilon(1e-12));
    }
}

TEST_CASE("auc of negated scores complements when tie-free") {
    std::mt19937_64 rng(77);
    std::uniform_real_distribution<double> unif(0.0, 1.0);
    for (int trial = 0; trial < 40; ++trial) {
        const std::size_t n = 4 + rng() % 100;
        std::vector<double> scores(n), neg(n);
        std::vector<int> labels(n);
        for (std::size_t i = 0; i < n; ++i) {
            scores[i] = unif(rng); // continuous draws: ties have probability ~0
            neg[i] = -scores[i];
            labels[i] = (rng() % 2) ? 1 : 0;
        }
        labels[0] = 1;
        labels[1] = 0;
        CHECK(auc(scores, labels) + auc(neg, labels) == doctest::Approx(1.0).epsilon(1e-12));
    }
}

TEST_CASE("auc error handling") {
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), UndefinedAucError);
    CHECK_THROWS_AS(auc({0.1, 0.2}, {0, 0}), UndefinedAucError);
    CHECK_THROWS_AS(auc({}, {}), UndefinedAucError);
    CHECK_THROWS_AS(auc({0.1}, {1, 0}), DomainError);
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 2}), DomainError);
    CHECK_THROWS_AS(auc({0.1, std::nan("")}, {1, 0}), NumericError);
    // UndefinedAucError is a DomainError so one catch can cover both
    CHECK_THROWS_AS(auc({0.1, 0.2}, {1, 1}), DomainError);
}

TEST_CASE("exact_match and within_one") {
    CHECK(exact_match({2, 3, 5}, {1, 3, 3}) == doctest::Approx(100.0 / 3.0));
    CHECK(within_one({2, 3, 5}, {1, 3, 3}) == doctest::Approx(200.0 / 3.0));
    CHECK(exact_match({4, 4}, {4, 4}) == 100.0);
    CHECK(within_one({4, 4}, {4, 4}) == 100.0);
    CHECK(exact_match({1, 1}, {2, 3}) == 0.0);
    CHECK_THROWS_AS(exact_match({1}, {1, 2}), DomainError);
    CHECK_THROWS_AS(within_one({1}, {1, 2}), DomainError);
    CHECK_THROWS_AS(exact_match({}, {}), DomainError);

    std::mt19937_64 rng(4);
    for (int trial = 0; trial < 50; ++trial) {
        const std::size_t n = 1 + rng() % 64;
        std::vector<int> p(n), t(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = 1 + static_cast<int>(rng() % 6);
            t[i] = 1 + static_cast<int>(rng() % 6);
        }
        CHECK(within_one(p, t) >= exact_match(p, t));
    }
}

TEST_CASE("build_report on the all-grade-3 degenerate predictor") {
    // truth shaped like the reference imbalance: 8,96,105,63,14,8
    std::vector<int> truth;
    const std::vector<int> counts = {8, 96, 105, 63, 14, 8};
    for (int g = 1; g <= 6; ++g)
        for (int i = 0; i < counts[static_cast<std::size_t>(g - 1)]; ++i) truth.push_back(g);
    std::vector<int> pred(truth.size(), 3);

    EvalReport r = build_report(pred, truth, 6);
    CHECK(r.total == 294);
    REQUIRE(r.per_grade_exact.size() == 6);
    for (int g = 0; g < 6; ++g) {
        REQUIRE(r.per_grade_exact[static_cast<std::size_t>(g)].has_value());
        CHECK(*r.per_grade_exact[static_cast<std::size_t>(g)] == (g == 2 ? 100.0 : 0.0));
    }
    // independent arithmetic for the sample-weighted average
    const double expected_avg = 100.0 * 105.0 / 294.0;
    CHECK(r.average_exact == doctest::Approx(expected_avg));
    CHECK(r.average_exact == doctest::Approx(35.71).epsilon(1e-3));
    // predicting 3 lands within one of grades 2..4
    CHECK(r.average_within_one == doctest::Approx(100.0 * (96.0 + 105.0 + 63.0) / 294.0));
    CHECK(*r.per_grade_within_one[0] == 0.0);
    CHECK(*r.per_grade_within_one[1] == 100.0);
    CHECK(*r.per_grade_within_one[3] == 100.0);
    CHECK(*r.per_grade_within_one[4] == 0.0);
}

TEST_CASE("build_report single off-by-one sample") {
    EvalReport r = build_report({6}, {5}, 6);
    CHECK(r.average_exact == 0.0);
    CHECK(r.average_within_one == 100.0);
    CHECK(r.confusion[4][5] == 1); // row = true grade 5, col = predicted 6
    int total = 0;
    for (const auto& row : r.confusion)
        for (int v : row) total += v;
    CHECK(total == 1);
    // grades other than 5 are absent: n/a markers
    CHECK_FALSE(r.per_grade_exact[0].has_value());
    CHECK(r.per_grade_exact[4].has_value());
}

TEST_CASE("build_report identity predictions score 100 everywhere") {
    std::vector<int> truth = {1, 2, 2, 3, 4, 4, 4, 2};
    EvalReport r = build_report(truth, truth, 4);
    CHECK(r.average_exact == 100.0);
    CHECK(r.average_within_one == 100.0);
    for (int g = 0; g < 4; ++g) {
        CHECK(*r.per_grade_exact[static_cast<std::size_t>(g)] == 100.0);
        for (int h = 0; h < 4; ++h)
            if (g != h) CHECK(r.confusion[static_cast<std::size_t>(g)][static_cast<std::size_t>(h)] == 0);
    }
}

TEST_CASE("build_report invariants on random inputs") {
    std::mt19937_64 rng(88);
    for (int trial = 0; trial < 50; ++trial) {
        const int n_classes = 2 + static_cast<int>(rng() % 7);
        const std::size_t n = 1 + rng() % 80;
        std::vector<int> p(n), t(n);
        for (std::size_t i = 0; i < n; ++i) {
            p[i] = 1 + static_cast<int>(rng() % n_classes);
            t[i] = 1 + static_cast<int>(rng() % n_classes);
        }
        EvalReport r = build_report(p, t, n_classes);

        // confusion row sums equal grade counts; grand total is n
        int grand = 0;
        for (int g = 0; g < n_classes; ++g) {
            int row_sum = 0;
            for (int v : r.confusion[static_cast<std::size_t>(g)]) row_sum += v;
            CHECK(row_sum == r.grade_counts[static_cast<std::size_t>(g)]);
            grand += row_sum;
        }
        CHECK(grand == static_cast<int>(n));

        // averages match the standalone ops
        CHECK(r.average_exact == doctest::Approx(exact_match(p, t)));
        CHECK(r.average_within_one == doctest::Approx(within_one(p, t)));
        CHECK(r.average_within_one >= r.average_exact);

        for (int g = 0; g < n_classes; ++g) {
            const auto gi = static_cast<std::size_t>(g);
            CHECK(r.per_grade_exact[gi].has_value() == (r.grade_counts[gi] > 0));
            if (r.per_grade_exact[gi])
                CHECK(*r.per_grade_within_one[gi] >= *r.per_grade_exact[gi]);
        }
    }
}

TEST_CASE("build_report rejects out-of-range grades") {
    CHECK_THROWS_AS(build_report({0}, {1}, 3), DomainError);
    CHECK_THROWS_AS(build_report({1}, {4}, 3), DomainError);
    CHECK_THROWS_AS(build_report({1, 2}, {1}, 3), DomainError);
    CHECK_THROWS_AS(build_report({1}, {1}, 1), DomainError);
}

} // TEST_SUITE("metrics")
