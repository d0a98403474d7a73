#include "vmstain/colorspace.hpp"
#include "vmstain/tiling.hpp"

#include <benchmark/benchmark.h>

#include <random>

using namespace vmstain;

namespace {

PlanarImage make_image(int side) {
    std::mt19937_64 rng(1);
    std::uniform_real_distribution<double> dist(0.0, 1.0);
    PlanarImage img(side, side, 3);
    for (double& v : img.data()) v = dist(rng);
    return img;
}

void bm_weight_matrix(benchmark::State& state) {
    const GridSpec spec = GridSpec::square(static_cast<int>(state.range(0)), 512, 128);
    for (auto _ : state) {
        WeightMatrix w(spec);
        benchmark::DoNotOptimize(w.at(0, 0));
    }
}
BENCHMARK(bm_weight_matrix)->Arg(4608);

void bm_split(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const GridSpec spec = GridSpec::square(side, 128, 32);
    const PlanarImage img = make_image(side);
    for (auto _ : state) {
        auto patches = split(img, spec);
        benchmark::DoNotOptimize(patches.size());
    }
    state.SetBytesProcessed(state.iterations() * img.data().size() * sizeof(double));
}
BENCHMARK(bm_split)->Arg(512)->Arg(1024);

void bm_blend_streaming(benchmark::State& state) {
    const int side = static_cast<int>(state.range(0));
    const int workers = static_cast<int>(state.range(1));
    const GridSpec spec = GridSpec::square(side, 128, 32);
    const PlanarImage img = make_image(side);
    const auto patches = split(img, spec);
    for (auto _ : state) {
        std::size_t index = 0;
        PatchSource source = [&]() -> std::optional<PatchRecord> {
            if (index >= patches.size()) return std::nullopt;
            return patches[index++];
        };
        auto out = blend_streaming(source, spec, workers);
        benchmark::DoNotOptimize(out.image.data().data());
    }
    state.SetBytesProcessed(state.iterations() * img.data().size() * sizeof(double));
}
BENCHMARK(bm_blend_streaming)->Args({512, 1})->Args({1024, 1})->Args({1024, 4});

void bm_value_channel(benchmark::State& state) {
    const PlanarImage img = make_image(static_cast<int>(state.range(0)));
    for (auto _ : state) {
        auto v = value_channel(img);
        benchmark::DoNotOptimize(v.data().data());
    }
}
BENCHMARK(bm_value_channel)->Arg(1024);

} // namespace

BENCHMARK_MAIN();
