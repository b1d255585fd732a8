#pragma once

#include <algorithm>
#include <cstdint>
#include <numeric>
#include <random>
#include <vector>

namespace tourank::detail {

// Shared mini-batch SGD loop over a flattened parameter vector. BatchGrad
// fills `grad` for the given sample indices at the current params; FullLoss
// evaluates the training objective on everything. Returns the loss after each
// epoch. The caller owns parameter layout and regularization.
template <class BatchGrad, class FullLoss>
std::vector<double> run_sgd(std::vector<double>& params, std::size_t n_samples, double lr, int epochs,
                            int batch_size, std::uint64_t seed, BatchGrad&& batch_grad, FullLoss&& full_loss) {
    std::mt19937_64 rng(seed);
    std::vector<std::size_t> order(n_samples);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::vector<double> grad(params.size(), 0.0);
    std::vector<std::size_t> batch;
    std::vector<double> history;
    history.reserve(static_cast<std::size_t>(epochs));
    for (int e = 0; e < epochs; ++e) {
        std::shuffle(order.begin(), order.end(), rng);
        for (std::size_t start = 0; start < n_samples; start += static_cast<std::size_t>(batch_size)) {
            const std::size_t stop = std::min(n_samples, start + static_cast<std::size_t>(batch_size));
            batch.assign(order.begin() + static_cast<std::ptrdiff_t>(start),
                         order.begin() + static_cast<std::ptrdiff_t>(stop));
            batch_grad(batch, params, grad);
            for (std::size_t i = 0; i < params.size(); ++i) params[i] -= lr * grad[i];
        }
        history.push_back(full_loss(params));
    }
    return history;
}

} // namespace tourank::detail
