#include <benchmark/benchmark.h>

#include "deepads/data.hpp"
#include "deepads/model.hpp"
#include "deepads/optim.hpp"
#include "deepads/rng.hpp"

using namespace deepads;

static void BM_ModelForward(benchmark::State& state) {
    const int hw = static_cast<int>(state.range(0));
    Rng rng(1);
    const DeepAdsModel model(1, hw, hw);
    Tensor x({hw, hw, 3});
    for (auto& v : x.values()) v = rng.uniform(0.0, 1.0);
    for (auto _ : state) {
        Tensor y = model.forward(x);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_ModelForward)->Arg(64)->Arg(200);

static void BM_ModelForwardBackward(benchmark::State& state) {
    const int hw = static_cast<int>(state.range(0));
    Rng rng(2);
    DeepAdsModel model(2, hw, hw);
    Tensor x({hw, hw, 3});
    for (auto& v : x.values()) v = rng.uniform(0.0, 1.0);
    Tensor truth({hw, hw});
    for (auto& v : truth.values()) v = rng.coin() ? 1.0 : 0.0;

    for (auto _ : state) {
        ModelCaches caches;
        const Tensor heat = model.forward(x, &caches);
        const BceResult bce = bce_loss(heat.reshaped({hw, hw}), truth, 4.0);
        auto grads = model.backward(caches, bce.grad_pred.reshaped({hw, hw, 1}));
        benchmark::DoNotOptimize(grads.data());
    }
}
BENCHMARK(BM_ModelForwardBackward)->Arg(64);

static void BM_TrainEpoch(benchmark::State& state) {
    const auto data = to_samples(gen_synthetic(8, 64, 64, 1));
    DeepAdsModel model(1, 64, 64);
    AdamState adam = adam_init(std::as_const(model).parameters());
    TrainConfig cfg;
    cfg.pos_weight = 4.0;
    int epoch = 0;
    for (auto _ : state) {
        const double loss = train_epoch(model, data, cfg, adam, epoch++);
        benchmark::DoNotOptimize(loss);
    }
}
BENCHMARK(BM_TrainEpoch);
