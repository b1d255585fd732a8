#include "tourank/baselines.hpp"
#include "tourank/errors.hpp"
#include "tourank/rng.hpp"

#include "sgd_driver.hpp"

#include <algorithm>
#include <cmath>

namespace tourank {

namespace {

void check_finite_params(const std::vector<double>& params, const char* who) {
    for (double v : params)
        if (!std::isfinite(v)) throw NumericError(std::string(who) + ": training diverged");
}

} // namespace

RankEnsemble train_rank_ensemble(const Dataset& ds, const TrainConfig& cfg) {
    validate_dataset(ds);
    validate_train_config(cfg);
    RankEnsemble e;
    e.num_classes = ds.num_classes;
    e.feature_dim = ds.feature_dim;
    e.models.reserve(static_cast<std::size_t>(ds.num_classes - 1));
    for (int j = 1; j <= ds.num_classes - 1; ++j) {
        TrainConfig tc = cfg;
        tc.seed = derive_seed(cfg.seed, {static_cast<std::uint64_t>(j)});
        e.models.push_back(train_binary(ds, make_binary_labels(ds, j), tc));
    }
    return e;
}

int predict_rank(const RankEnsemble& e, const std::vector<double>& x) {
    if (e.models.empty()) throw DomainError("predict_rank: empty ensemble");
    int grade = 1;
    for (const BinaryModel& m : e.models)
        if (m.score(x) > 0.5) ++grade;
    return grade;
}

std::vector<int> predict_rank_batch(const RankEnsemble& e, const Dataset& ds) {
    std::vector<int> out;
    out.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) out.push_back(predict_rank(e, s.features));
    return out;
}

// ---------------------------------------------------------------------------

double RegressionModel::raw(const std::vector<double>& x) const {
    if (x.size() != weights.size())
        throw DimensionError("regression: input has " + std::to_string(x.size()) + " features, model expects " +
                             std::to_string(weights.size()));
    double z = bias;
    for (std::size_t j = 0; j < weights.size(); ++j) z += weights[j] * x[j];
    return z;
}

RegressionModel train_regression(const Dataset& ds, const TrainConfig& cfg) {
    validate_dataset(ds);
    validate_train_config(cfg);

    // class_weighting is a binary-loss knob; the regression objective is
    // plain least squares on the grade regardless of the flag.
    const std::size_t d = static_cast<std::size_t>(ds.feature_dim);
    std::vector<double> params(d + 1, 0.0); // [w..., b]
    auto residual = [&](const std::vector<double>& p, std::size_t i) {
        double z = p[d];
        const auto& x = ds.samples[i].features;
        for (std::size_t j = 0; j < d; ++j) z += p[j] * x[j];
        return z - static_cast<double>(ds.samples[i].grade);
    };
    auto batch_grad = [&](const std::vector<std::size_t>& batch, const std::vector<double>& p,
                          std::vector<double>& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i : batch) {
            const double r = residual(p, i);
            const auto& x = ds.samples[i].features;
            for (std::size_t j = 0; j < d; ++j) grad[j] += r * x[j];
            grad[d] += r;
        }
        const double n_b = static_cast<double>(batch.size());
        for (std::size_t j = 0; j < d; ++j) grad[j] = grad[j] / n_b + cfg.l2 * p[j];
        grad[d] /= n_b;
    };
    auto full_loss = [&](const std::vector<double>& p) {
        double acc = 0.0;
        for (std::size_t i = 0; i < ds.samples.size(); ++i) {
            const double r = residual(p, i);
            acc += 0.5 * r * r;
        }
        double reg = 0.0;
        for (std::size_t j = 0; j < d; ++j) reg += p[j] * p[j];
        return acc / static_cast<double>(ds.samples.size()) + 0.5 * cfg.l2 * reg;
    };

    RegressionModel m;
    m.meta.seed = cfg.seed;
    m.meta.loss_history = detail::run_sgd(params, ds.samples.size(), cfg.learning_rate, cfg.epochs,
                                          cfg.batch_size, cfg.seed, batch_grad, full_loss);
    check_finite_params(params, "regression");
    m.weights.assign(params.begin(), params.begin() + static_cast<std::ptrdiff_t>(d));
    m.bias = params[d];
    m.num_classes = ds.num_classes;
    m.meta.epochs_run = cfg.epochs;
    m.meta.final_loss = m.meta.loss_history.back();
    return m;
}

int predict_regression(const RegressionModel& m, const std::vector<double>& x) {
    const double z = m.raw(x);
    const int rounded = static_cast<int>(std::floor(z + 0.5)); // half-up
    return std::clamp(rounded, 1, m.num_classes);
}

std::vector<int> predict_regression_batch(const RegressionModel& m, const Dataset& ds) {
    std::vector<int> out;
    out.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) out.push_back(predict_regression(m, s.features));
    return out;
}

// ---------------------------------------------------------------------------

std::vector<double> MulticlassModel::probabilities(const std::vector<double>& x) const {
    if (weights.empty()) throw DomainError("multiclass: empty model");
    if (x.size() != weights[0].size())
        throw DimensionError("multiclass: input has " + std::to_string(x.size()) + " features, model expects " +
                             std::to_string(weights[0].size()));
    std::vector<double> z(weights.size());
    for (std::size_t c = 0; c < weights.size(); ++c) {
        double v = biases[c];
        for (std::size_t j = 0; j < x.size(); ++j) v += weights[c][j] * x[j];
        z[c] = v;
    }
    const double zmax = *std::max_element(z.begin(), z.end());
    double denom = 0.0;
    for (double& v : z) {
        v = std::exp(v - zmax);
        denom += v;
    }
    for (double& v : z) v /= denom;
    return z;
}

MulticlassModel train_multiclass(const Dataset& ds, const TrainConfig& cfg) {
    validate_dataset(ds);
    validate_train_config(cfg);

    const std::size_t d = static_cast<std::size_t>(ds.feature_dim);
    const std::size_t n_classes = static_cast<std::size_t>(ds.num_classes);

    // layout: class-major weights, then all biases; plain cross-entropy,
    // the class_weighting flag only applies to the binary learner family
    std::vector<double> params(n_classes * d + n_classes, 0.0);
    auto logits = [&](const std::vector<double>& p, const std::vector<double>& x, std::vector<double>& z) {
        for (std::size_t c = 0; c < n_classes; ++c) {
            double v = p[n_classes * d + c];
            const double* wc = p.data() + c * d;
            for (std::size_t j = 0; j < d; ++j) v += wc[j] * x[j];
            z[c] = v;
        }
    };
    auto softmax_inplace = [&](std::vector<double>& z) {
        const double zmax = *std::max_element(z.begin(), z.end());
        double denom = 0.0;
        for (double& v : z) {
            v = std::exp(v - zmax);
            denom += v;
        }
        for (double& v : z) v /= denom;
    };

    std::vector<double> z(n_classes);
    auto batch_grad = [&](const std::vector<std::size_t>& batch, const std::vector<double>& p,
                          std::vector<double>& grad) {
        std::fill(grad.begin(), grad.end(), 0.0);
        for (std::size_t i : batch) {
            const auto& x = ds.samples[i].features;
            logits(p, x, z);
            softmax_inplace(z);
            const std::size_t y = static_cast<std::size_t>(ds.samples[i].grade - 1);
            for (std::size_t c = 0; c < n_classes; ++c) {
                const double delta = z[c] - (c == y ? 1.0 : 0.0);
                double* gc = grad.data() + c * d;
                for (std::size_t j = 0; j < d; ++j) gc[j] += delta * x[j];
                grad[n_classes * d + c] += delta;
            }
        }
        const double n_b = static_cast<double>(batch.size());
        for (std::size_t c = 0; c < n_classes; ++c)
            for (std::size_t j = 0; j < d; ++j) {
                grad[c * d + j] = grad[c * d + j] / n_b + cfg.l2 * p[c * d + j];
            }
        for (std::size_t c = 0; c < n_classes; ++c) grad[n_classes * d + c] /= n_b;
    };
    auto full_loss = [&](const std::vector<double>& p) {
        double acc = 0.0;
        std::vector<double> zz(n_classes);
        for (std::size_t i = 0; i < ds.samples.size(); ++i) {
            logits(p, ds.samples[i].features, zz);
            const double zmax = *std::max_element(zz.begin(), zz.end());
            double lse = 0.0;
            for (double v : zz) lse += std::exp(v - zmax);
            lse = zmax + std::log(lse);
            const std::size_t y = static_cast<std::size_t>(ds.samples[i].grade - 1);
            acc += lse - zz[y];
        }
        double reg = 0.0;
        for (std::size_t c = 0; c < n_classes; ++c)
            for (std::size_t j = 0; j < d; ++j) reg += p[c * d + j] * p[c * d + j];
        return acc / static_cast<double>(ds.samples.size()) + 0.5 * cfg.l2 * reg;
    };

    MulticlassModel m;
    m.meta.seed = cfg.seed;
    m.meta.loss_history = detail::run_sgd(params, ds.samples.size(), cfg.learning_rate, cfg.epochs,
                                          cfg.batch_size, cfg.seed, batch_grad, full_loss);
    check_finite_params(params, "multiclass");
    m.weights.assign(n_classes, std::vector<double>(d));
    m.biases.assign(n_classes, 0.0);
    for (std::size_t c = 0; c < n_classes; ++c) {
        for (std::size_t j = 0; j < d; ++j) m.weights[c][j] = params[c * d + j];
        m.biases[c] = params[n_classes * d + c];
    }
    m.meta.epochs_run = cfg.epochs;
    m.meta.final_loss = m.meta.loss_history.back();
    return m;
}

int predict_multiclass(const MulticlassModel& m, const std::vector<double>& x) {
    const std::vector<double> p = m.probabilities(x);
    std::size_t best = 0;
    for (std::size_t c = 1; c < p.size(); ++c)
        if (p[c] > p[best]) best = c; // strict: ties keep the lowest grade
    return static_cast<int>(best) + 1;
}

std::vector<int> predict_multiclass_batch(const MulticlassModel& m, const Dataset& ds) {
    std::vector<int> out;
    out.reserve(ds.samples.size());
    for (const Sample& s : ds.samples) out.push_back(predict_multiclass(m, s.features));
    return out;
}

} // namespace tourank
