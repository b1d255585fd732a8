#pragma once

#include "tourank/data.hpp"

#include <cstdint>
#include <vector>

namespace tourank {

struct TrainConfig {
    double learning_rate = 0.05;
    double l2 = 1e-4;
    int epochs = 100;
    int batch_size = 32;
    std::uint64_t seed = 0;
    bool class_weighting = false;
};

void validate_train_config(const TrainConfig& cfg);

struct TrainMeta {
    int epochs_run = 0;
    double final_loss = 0.0;
    std::uint64_t seed = 0;
    bool degenerate = false;          // trained on a single class
    std::vector<double> loss_history; // full training loss after each epoch (not serialized)
};

// Linear logistic scorer for one "grade > K" question.
struct BinaryModel {
    std::vector<double> weights;
    double bias = 0.0;
    TrainMeta meta;

    // sigmoid(w.x + b); strictly inside (0,1) for finite inputs
    double score(const std::vector<double>& x) const;
};

double sigmoid(double z);

// label_i = 1 iff grade_i > K. K must satisfy 1 <= K <= num_classes-1.
std::vector<int> make_binary_labels(const Dataset& ds, int k);

// Per-sample weights n/(2*n_c): both classes contribute equally to the loss.
std::vector<double> class_balanced_weights(const std::vector<int>& labels);

// Weighted mean logistic loss plus l2*|w|^2/2 (bias unregularized). Empty
// sample_weights means uniform. Exposed so tests can finite-difference it.
double logistic_loss(const Dataset& ds, const std::vector<int>& labels, const std::vector<double>& weights,
                     double bias, double l2, const std::vector<double>& sample_weights = {});

// Analytic gradient of logistic_loss at (weights, bias).
void logistic_gradient(const Dataset& ds, const std::vector<int>& labels, const std::vector<double>& weights,
                       double bias, double l2, const std::vector<double>& sample_weights,
                       std::vector<double>& grad_w, double& grad_b);

// Seeded mini-batch SGD on the regularized logistic loss. Single-class label
// vectors yield a constant-score model (weights 0, bias +-25) with the
// degenerate flag set instead of an error.
BinaryModel train_binary(const Dataset& ds, const std::vector<int>& labels, const TrainConfig& cfg);

} // namespace tourank
