#include <benchmark/benchmark.h>

#include "deepads/data.hpp"
#include "deepads/metrics.hpp"
#include "deepads/rng.hpp"

using namespace deepads;

static void BM_RasterizeQuad(benchmark::State& state) {
    const int hw = static_cast<int>(state.range(0));
    const QuadAnnotation q{{Point{hw * 0.2, hw * 0.3}, Point{hw * 0.8, hw * 0.25},
                            Point{hw * 0.75, hw * 0.7}, Point{hw * 0.15, hw * 0.8}}};
    for (auto _ : state) {
        Tensor mask = rasterize_quad(q, hw, hw);
        benchmark::DoNotOptimize(mask.data());
    }
}
BENCHMARK(BM_RasterizeQuad)->Arg(200)->Arg(1000);

static void BM_ResizeImage(benchmark::State& state) {
    Rng rng(1);
    Tensor img({256, 256, 3});
    for (auto& v : img.values()) v = rng.uniform(0.0, 1.0);
    for (auto _ : state) {
        Tensor out = resize_image(img, 200, 200);
        benchmark::DoNotOptimize(out.data());
    }
}
BENCHMARK(BM_ResizeImage);

static void BM_RocSweep(benchmark::State& state) {
    Rng rng(2);
    std::vector<Tensor> heatmaps;
    std::vector<Tensor> truths;
    for (int k = 0; k < 8; ++k) {
        Tensor hm({200, 200});
        for (auto& v : hm.values()) v = rng.uniform(0.0, 1.0);
        Tensor t({200, 200});
        for (auto& v : t.values()) v = rng.coin() ? 1.0 : 0.0;
        heatmaps.push_back(std::move(hm));
        truths.push_back(std::move(t));
    }
    for (auto _ : state) {
        auto points = roc_sweep(heatmaps, truths);
        benchmark::DoNotOptimize(points.data());
    }
}
BENCHMARK(BM_RocSweep);

static void BM_GenSynthetic(benchmark::State& state) {
    std::uint64_t seed = 1;
    for (auto _ : state) {
        auto items = gen_synthetic(1, 200, 200, seed++);
        benchmark::DoNotOptimize(items.data());
    }
}
BENCHMARK(BM_GenSynthetic);
