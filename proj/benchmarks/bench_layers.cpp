#include <benchmark/benchmark.h>

#include "deepads/layers.hpp"
#include "deepads/rng.hpp"

using namespace deepads;

namespace {

Tensor random_tensor(std::vector<int> shape, Rng& rng) {
    Tensor t(std::move(shape));
    for (auto& v : t.values()) v = rng.uniform(-1.0, 1.0);
    return t;
}

ConvParams random_conv(int cin, int cout, Rng& rng) {
    ConvParams p(cin, cout);
    for (auto& v : p.weights.values()) v = rng.uniform(-0.3, 0.3);
    return p;
}

}  // namespace

static void BM_Conv2dForward(benchmark::State& state) {
    const int hw = static_cast<int>(state.range(0));
    const int cin = static_cast<int>(state.range(1));
    const int cout = static_cast<int>(state.range(2));
    Rng rng(1);
    const Tensor x = random_tensor({hw, hw, cin}, rng);
    const ConvParams p = random_conv(cin, cout, rng);
    for (auto _ : state) {
        Tensor y = conv2d_forward(x, p);
        benchmark::DoNotOptimize(y.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hw) * hw * 9 * cin *
                            cout);
}
BENCHMARK(BM_Conv2dForward)->Args({64, 3, 16})->Args({64, 16, 8})->Args({200, 3, 16});

static void BM_Conv2dBackward(benchmark::State& state) {
    const int hw = static_cast<int>(state.range(0));
    const int cin = static_cast<int>(state.range(1));
    const int cout = static_cast<int>(state.range(2));
    Rng rng(2);
    const Tensor x = random_tensor({hw, hw, cin}, rng);
    const ConvParams p = random_conv(cin, cout, rng);
    const Tensor g = random_tensor({hw, hw, cout}, rng);
    ConvCache cache;
    conv2d_forward(x, p, &cache);
    for (auto _ : state) {
        ConvBackward grads = conv2d_backward(g, cache, p);
        benchmark::DoNotOptimize(grads.grad_x.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(hw) * hw * 9 * cin *
                            cout);
}
BENCHMARK(BM_Conv2dBackward)->Args({64, 3, 16})->Args({64, 16, 8});

static void BM_MaxPool(benchmark::State& state) {
    Rng rng(3);
    const Tensor x = random_tensor({200, 200, 16}, rng);
    for (auto _ : state) {
        PoolCache cache;
        Tensor y = maxpool2_forward(x, &cache);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_MaxPool);

static void BM_Upsample(benchmark::State& state) {
    Rng rng(4);
    const Tensor x = random_tensor({100, 100, 16}, rng);
    for (auto _ : state) {
        Tensor y = upsample2_forward(x);
        benchmark::DoNotOptimize(y.data());
    }
}
BENCHMARK(BM_Upsample);
