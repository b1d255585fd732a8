#include "tourank/learner.hpp"
#include "tourank/errors.hpp"

#include "sgd_driver.hpp"

#include <cmath>

namespace tourank {

double sigmoid(double z) {
    if (z >= 0.0) return 1.0 / (1.0 + std::exp(-z));
    const double e = std::exp(z);
    return e / (1.0 + e);
}

namespace {

// log(1 + e^z), overflow-safe
double softplus(double z) {
    return std::log1p(std::exp(-std::abs(z))) + std::max(z, 0.0);
}

double dot(const std::vector<double>& w, const std::vector<double>& x) {
    double s = 0.0;
    for (std::size_t i = 0; i < w.size(); ++i) s += w[i] * x[i];
    return s;
}

void check_labels(const Dataset& ds, const std::vector<int>& labels) {
    if (labels.size() != ds.samples.size())
        throw DimensionError("labels: " + std::to_string(labels.size()) + " for " +
                             std::to_string(ds.samples.size()) + " samples");
    for (int y : labels)
        if (y != 0 && y != 1) throw DomainError("labels must be 0/1, got " + std::to_string(y));
}

} // namespace

void validate_train_config(const TrainConfig& cfg) {
    if (!(cfg.learning_rate > 0.0)) throw ConfigError("learning_rate must be > 0");
    if (cfg.l2 < 0.0) throw ConfigError("l2 must be >= 0");
    if (cfg.epochs < 1) throw ConfigError("epochs must be >= 1");
    if (cfg.batch_size < 1) throw ConfigError("batch_size must be >= 1");
}

double BinaryModel::score(const std::vector<double>& x) const {
    if (x.size() != weights.size())
        throw DimensionError("score: input has " + std::to_string(x.size()) + " features, model expects " +
                             std::to_string(weights.size()));
    return sigmoid(dot(weights, x) + bias);
}

std::vector<int> make_binary_labels(const Dataset& ds, int k) {
    if (k < 1 || k > ds.num_classes - 1)
        throw DomainError("threshold K=" + std::to_string(k) + " outside [1, " +
                          std::to_string(ds.num_classes - 1) + "]");
    std::vector<int> labels(ds.samples.size());
    for (std::size_t i = 0; i < ds.samples.size(); ++i) labels[i] = ds.samples[i].grade > k ? 1 : 0;
    return labels;
}

std::vector<double> class_balanced_weights(const std::vector<int>& labels) {
    std::size_t pos = 0;
    for (int y : labels) pos += static_cast<std::size_t>(y);
    const std::size_t neg = labels.size() - pos;
    if (pos == 0 || neg == 0) throw DomainError("class weights undefined with a single class");
    const double n = static_cast<double>(labels.size());
    const double w_pos = n / (2.0 * static_cast<double>(pos));
    const double w_neg = n / (2.0 * static_cast<double>(neg));
    std::vector<double> w(labels.size());
    for (std::size_t i = 0; i < labels.size(); ++i) w[i] = labels[i] == 1 ? w_pos : w_neg;
    return w;
}

double logistic_loss(const Dataset& ds, const std::vector<int>& labels, const std::vector<double>& weights,
                     double bias, double l2, const std::vector<double>& sample_weights) {
    check_labels(ds, labels);
    if (static_cast<int>(weights.size()) != ds.feature_dim)
        throw DimensionError("logistic_loss: weight size mismatch");
    if (!sample_weights.empty() && sample_weights.size() != labels.size())
        throw DimensionError("logistic_loss: sample weight size mismatch");

    double acc = 0.0, wsum = 0.0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const double z = dot(weights, ds.samples[i].features) + bias;
        const double sw = sample_weights.empty() ? 1.0 : sample_weights[i];
        acc += sw * (softplus(z) - static_cast<double>(labels[i]) * z);
        wsum += sw;
    }
    double reg = 0.0;
    for (double w : weights) reg += w * w;
    return acc / wsum + 0.5 * l2 * reg;
}

void logistic_gradient(const Dataset& ds, const std::vector<int>& labels, const std::vector<double>& weights,
                       double bias, double l2, const std::vector<double>& sample_weights,
                       std::vector<double>& grad_w, double& grad_b) {
    check_labels(ds, labels);
    if (static_cast<int>(weights.size()) != ds.feature_dim)
        throw DimensionError("logistic_gradient: weight size mismatch");
    if (!sample_weights.empty() && sample_weights.size() != labels.size())
        throw DimensionError("logistic_gradient: sample weight size mismatch");

    grad_w.assign(weights.size(), 0.0);
    grad_b = 0.0;
    double wsum = 0.0;
    for (std::size_t i = 0; i < ds.samples.size(); ++i) {
        const double z = dot(weights, ds.samples[i].features) + bias;
        const double sw = sample_weights.empty() ? 1.0 : sample_weights[i];
        const double resid = sw * (sigmoid(z) - static_cast<double>(labels[i]));
        const auto& x = ds.samples[i].features;
        for (std::size_t j = 0; j < weights.size(); ++j) grad_w[j] += resid * x[j];
        grad_b += resid;
        wsum += sw;
    }
    for (std::size_t j = 0; j < weights.size(); ++j) grad_w[j] = grad_w[j] / wsum + l2 * weights[j];
    grad_b /= wsum;
}

BinaryModel train_binary(const Dataset& ds, const std::vector<int>& labels, const TrainConfig& cfg) {
    validate_dataset(ds);
    check_labels(ds, labels);
    validate_train_config(cfg);

    BinaryModel model;
    model.meta.seed = cfg.seed;

    std::size_t pos = 0;
    for (int y : labels) pos += static_cast<std::size_t>(y);
    if (pos == 0 || pos == labels.size()) {
        // One-class node data (possible under heavy imbalance): constant score.
        model.weights.assign(static_cast<std::size_t>(ds.feature_dim), 0.0);
        model.bias = pos == 0 ? -25.0 : 25.0;
        model.meta.degenerate = true;
        model.meta.epochs_run = 0;
        model.meta.final_loss = logistic_loss(ds, labels, model.weights, model.bias, cfg.l2);
        return model;
    }

    std::vector<double> sample_weights;
    if (cfg.class_weighting) sample_weights = class_balanced_weights(labels);

    const std::size_t d = static_cast<std::size_t>(ds.feature_dim);
    std::vector<double> params(d + 1, 0.0); // [w..., b]

    auto batch_grad = [&](const std::vector<std::size_t>& batch, const std::vector<double>& p,
                          std::vector<double>& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        double wsum = 0.0;
        for (std::size_t i : batch) {
            const auto& x = ds.samples[i].features;
            double z = p[d];
            for (std::size_t j = 0; j < d; ++j) z += p[j] * x[j];
            const double sw = sample_weights.empty() ? 1.0 : sample_weights[i];
            const double resid = sw * (sigmoid(z) - static_cast<double>(labels[i]));
            for (std::size_t j = 0; j < d; ++j) grad[j] += resid * x[j];
            grad[d] += resid;
            wsum += sw;
        }
        for (std::size_t j = 0; j < d; ++j) grad[j] = grad[j] / wsum + cfg.l2 * p[j];
        grad[d] /= wsum;
    };
    auto full_loss = [&](const std::vector<double>& p) {
        std::vector<double> w(p.begin(), p.begin() + static_cast<std::ptrdiff_t>(d));
        return logistic_loss(ds, labels, w, p[d], cfg.l2, sample_weights);
    };

    model.meta.loss_history = detail::run_sgd(params, ds.samples.size(), cfg.learning_rate, cfg.epochs,
                                              cfg.batch_size, cfg.seed, batch_grad, full_loss);

    model.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    model.bias = params[d];
    for (double w : model.weights)
        if (!std::isfinite(w)) throw NumericError("training diverged: non-finite weight");
    if (!std::isfinite(model.bias)) throw NumericError("training diverged: non-finite bias");
    model.meta.epochs_run = cfg.epochs;
    model.meta.final_loss = model.meta.loss_history.back();
    return model;
}

} // namespace tourank
