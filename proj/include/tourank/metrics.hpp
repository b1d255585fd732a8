#pragma once

#include <optional>
#include <vector>

namespace tourank {

// Area under the ROC curve via the Mann-Whitney statistic. Tied scores get
// average ranks, so each tied positive/negative pair contributes 1/2. Labels
// are 0/1. Throws UndefinedAucError when either class is absent.
double auc(const std::vector<double>& scores, const std::vector<int>& labels);

// Percentage of positions where pred equals truth / lands within one grade.
double exact_match(const std::vector<int>& pred, const std::vector<int>& truth);
double within_one(const std::vector<int>& pred, const std::vector<int>& truth);

// Evaluation summary for ordinal predictions. All rates are percentages.
// Averages are sample-weighted (total correct over total samples), not means
// of the per-grade columns. Grades absent from truth report nullopt, not 0.
struct EvalReport {
    int num_classes = 0;
    std::size_t total = 0;
    std::vector<int> grade_counts;                           // per true grade
    std::vector<std::optional<double>> per_grade_exact;      // recall of each grade
    std::vector<std::optional<double>> per_grade_within_one;
    std::vector<std::vector<int>> confusion;                 // [true-1][pred-1]
    double average_exact = 0.0;
    double average_within_one = 0.0;
};

EvalReport build_report(const std::vector<int>& pred, const std::vector<int>& truth, int num_classes);

} // namespace tourank
