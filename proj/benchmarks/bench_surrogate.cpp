#include "s4is/probability.hpp"
#include "s4is/surrogate.hpp"

#include <benchmark/benchmark.h>

#include <cmath>

namespace {

s4is::Vector smooth_outputs(const s4is::PointMatrix& x) {
    s4is::Vector y(x.rows());
    for (Eigen::Index i = 0; i < x.rows(); ++i) y[i] = std::sin(x(i, 0)) + 0.5 * x.row(i).squaredNorm();
    return y;
}

void BM_GpFit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const auto d = static_cast<std::size_t>(state.range(1));
    s4is::Rng rng = s4is::substream(7, 0);
    const s4is::PointMatrix x = s4is::sample_std_normal(d, n, rng);
    const s4is::Vector y = smooth_outputs(x);
    for (auto _ : state) benchmark::DoNotOptimize(s4is::GpSurrogate::fit(x, y, s4is::GpOptions{}));
}
BENCHMARK(BM_GpFit)->Args({20, 2})->Args({50, 2})->Args({50, 10})->Args({100, 10})->Unit(benchmark::kMillisecond);

void BM_GpPredictBatch(benchmark::State& state) {
    s4is::Rng rng = s4is::substream(7, 1);
    const s4is::PointMatrix x = s4is::sample_std_normal(10, 60, rng);
    const auto gp = s4is::GpSurrogate::fit(x, smooth_outputs(x), s4is::GpOptions{});
    const s4is::PointMatrix pts = s4is::sample_std_normal(10, static_cast<std::size_t>(state.range(0)), rng);
    for (auto _ : state) {
        benchmark::DoNotOptimize(gp.predict_mean(pts));
        benchmark::DoNotOptimize(gp.predict_sd(pts));
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GpPredictBatch)->Arg(1000)->Arg(10000)->Unit(benchmark::kMillisecond);

}  // namespace
