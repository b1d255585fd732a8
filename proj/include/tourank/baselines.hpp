#pragma once

#include "tourank/data.hpp"
#include "tourank/learner.hpp"

#include <vector>

namespace tourank {

// N-1 threshold models, each trained on the whole training set (unlike the
// tournament, which restricts every node to its own grade range).
struct RankEnsemble {
    std::vector<BinaryModel> models; // models[j-1] answers "grade > j"
    int num_classes = 0;
    int feature_dim = 0;
};

RankEnsemble train_rank_ensemble(const Dataset& ds, const TrainConfig& cfg);

// grade = 1 + number of models voting "over"; non-monotone indicator
// sequences aggregate through the same sum.
int predict_rank(const RankEnsemble& e, const std::vector<double>& x);
std::vector<int> predict_rank_batch(const RankEnsemble& e, const Dataset& ds);

// Least squares on the grade as a real-valued target.
struct RegressionModel {
    std::vector<double> weights;
    double bias = 0.0;
    int num_classes = 0;
    TrainMeta meta;

    double raw(const std::vector<double>& x) const; // w.x + b, before rounding
};

RegressionModel train_regression(const Dataset& ds, const TrainConfig& cfg);

// Half-up rounding of the raw output, clamped into [1, N].
int predict_regression(const RegressionModel& m, const std::vector<double>& x);
std::vector<int> predict_regression_batch(const RegressionModel& m, const Dataset& ds);

// Flat softmax classifier over all N grades.
struct MulticlassModel {
    std::vector<std::vector<double>> weights; // [class][feature]
    std::vector<double> biases;               // [class]
    TrainMeta meta;

    std::vector<double> probabilities(const std::vector<double>& x) const; // sums to 1
};

MulticlassModel train_multiclass(const Dataset& ds, const TrainConfig& cfg);

// argmax probability; exact ties resolve to the lowest grade.
int predict_multiclass(const MulticlassModel& m, const std::vector<double>& x);
std::vector<int> predict_multiclass_batch(const MulticlassModel& m, const Dataset& ds);

} // namespace tourank
