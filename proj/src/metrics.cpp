#include "tourank/metrics.hpp"
#include "tourank/errors.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <numeric>

namespace tourank {

double auc(const std::vector<double>& scores, const std::vector<int>& labels) {
    if (scores.size() != labels.size())
        throw DomainError("auc: " + std::to_string(scores.size()) + " scores vs " +
                          std::to_string(labels.size()) + " labels");
    std::size_t pos = 0, neg = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        if (labels[i] != 0 && labels[i] != 1)
            throw DomainError("auc: label must be 0 or 1, got " + std::to_string(labels[i]));
        if (!std::isfinite(scores[i])) throw NumericError("auc: non-finite score");
        (labels[i] == 1 ? pos : neg)++;
    }
    if (pos == 0 || neg == 0) throw UndefinedAucError("auc undefined: a class is absent");

    std::vector<std::size_t> order(scores.size());
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });

    // average rank within each tie block, ranks are 1-based
    double rank_sum_pos = 0.0;
    std::size_t i = 0;
    while (i < order.size()) {
        std::size_t j = i;
        while (j + 1 < order.size() && scores[order[j + 1]] == scores[order[i]]) ++j;
        const double avg_rank = 0.5 * (static_cast<double>(i + 1) + static_cast<double>(j + 1));
        for (std::size_t k = i; k <= j; ++k)
            if (labels[order[k]] == 1) rank_sum_pos += avg_rank;
        i = j + 1;
    }
    const double p = static_cast<double>(pos);
    return (rank_sum_pos - p * (p + 1.0) / 2.0) / (p * static_cast<double>(neg));
}

namespace {

void check_pair(const std::vector<int>& pred, const std::vector<int>& truth, const char* who) {
    if (pred.size() != truth.size())
        throw DomainError(std::string(who) + ": " + std::to_string(pred.size()) + " predictions vs " +
                          std::to_string(truth.size()) + " truths");
    if (pred.empty()) throw DomainError(std::string(who) + ": empty input");
}

} // namespace

double exact_match(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_pair(pred, truth, "exact_match");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (pred[i] == truth[i]) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

double within_one(const std::vector<int>& pred, const std::vector<int>& truth) {
    check_pair(pred, truth, "within_one");
    std::size_t hits = 0;
    for (std::size_t i = 0; i < pred.size(); ++i)
        if (std::abs(pred[i] - truth[i]) <= 1) ++hits;
    return 100.0 * static_cast<double>(hits) / static_cast<double>(pred.size());
}

EvalReport build_report(const std::vector<int>& pred, const std::vector<int>& truth, int num_classes) {
    check_pair(pred, truth, "build_report");
    if (num_classes < 2) throw DomainError("build_report: need at least 2 classes");

    EvalReport r;
    r.num_classes = num_classes;
    r.total = truth.size();
    r.grade_counts.assign(static_cast<std::size_t>(num_classes), 0);
    r.confusion.assign(static_cast<std::size_t>(num_classes),
                       std::vector<int>(static_cast<std::size_t>(num_classes), 0));

    std::vector<int> near_counts(static_cast<std::size_t>(num_classes), 0);
    std::size_t exact = 0, near = 0;
    for (std::size_t i = 0; i < truth.size(); ++i) {
        const int t = truth[i], p = pred[i];
        if (t < 1 || t > num_classes)
            throw DomainError("build_report: true grade " + std::to_string(t) + " out of range");
        if (p < 1 || p > num_classes)
            throw DomainError("build_report: predicted grade " + std::to_string(p) + " out of range");
        r.grade_counts[static_cast<std::size_t>(t - 1)]++;
        r.confusion[static_cast<std::size_t>(t - 1)][static_cast<std::size_t>(p - 1)]++;
        if (t == p) ++exact;
        if (std::abs(t - p) <= 1) {
            ++near;
            near_counts[static_cast<std::size_t>(t - 1)]++;
        }
    }

    r.per_grade_exact.assign(static_cast<std::size_t>(num_classes), std::nullopt);
    r.per_grade_within_one.assign(static_cast<std::size_t>(num_classes), std::nullopt);
    for (int g = 0; g < num_classes; ++g) {
        const int n_g = r.grade_counts[static_cast<std::size_t>(g)];
        if (n_g == 0) continue; // absent grade: n/a, never 0
        const auto gi = static_cast<std::size_t>(g);
        r.per_grade_exact[gi] = 100.0 * r.confusion[gi][gi] / static_cast<double>(n_g);
        r.per_grade_within_one[gi] = 100.0 * near_counts[gi] / static_cast<double>(n_g);
    }
    r.average_exact = 100.0 * static_cast<double>(exact) / static_cast<double>(r.total);
    r.average_within_one = 100.0 * static_cast<double>(near) / static_cast<double>(r.total);
    return r;
}

} // namespace tourank
