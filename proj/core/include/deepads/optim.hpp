#pragma once

#include <cstdint>
#include <functional>
#include <vector>

#include "deepads/data.hpp"
#include "deepads/model.hpp"

namespace deepads {

// Bias-corrected Adam. m/v mirror the parameter tensor shapes; t counts
// completed steps.
struct AdamState {
    std::vector<Tensor> m;
    std::vector<Tensor> v;
    std::int64_t t = 0;
    double lr = 1e-3;
    double beta1 = 0.9;
    double beta2 = 0.999;
    double eps = 1e-8;
};

AdamState adam_init(const std::vector<const Tensor*>& params, double lr = 1e-3,
                    double beta1 = 0.9, double beta2 = 0.999, double eps = 1e-8);

// p -= lr * m_hat / (sqrt(v_hat) + eps), with m_hat = m/(1-beta1^t) and
// v_hat = v/(1-beta2^t)
void adam_step(const std::vector<Tensor*>& params, const std::vector<Tensor>& grads,
               AdamState& state);

struct TrainConfig {
    int epochs = 1;
    int batch_size = 4;
    std::uint64_t seed = 1;
    double pos_weight = 1.0;
    bool shuffle = true;
};

// One pass over the dataset: per mini-batch, gradients are averaged over
// the batch and a single adam_step is applied. The visit order is a
// deterministic permutation of (cfg.seed, epoch_index). Returns the mean
// per-pixel BCE loss over the epoch.
double train_epoch(DeepAdsModel& model, const std::vector<Sample>& data, const TrainConfig& cfg,
                   AdamState& state, int epoch_index);

// runs cfg.epochs epochs; returns the per-epoch mean losses
std::vector<double> train(DeepAdsModel& model, const std::vector<Sample>& data,
                          const TrainConfig& cfg, AdamState& state,
                          const std::function<void(int, double)>& on_epoch = {});

}  // namespace deepads
