#include "s4is/learning.hpp"
#include "s4is/probability.hpp"

#include <benchmark/benchmark.h>

namespace {

void BM_MinDistances(benchmark::State& state) {
    s4is::Rng rng = s4is::substream(11, 0);
    const s4is::PointMatrix pool = s4is::sample_std_normal(10, static_cast<std::size_t>(state.range(0)), rng);
    const s4is::PointMatrix support = s4is::sample_std_normal(10, 100, rng);
    for (auto _ : state) benchmark::DoNotOptimize(s4is::min_distances(pool, support));
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_MinDistances)->Arg(10000)->Arg(100000)->Unit(benchmark::kMillisecond);

void BM_CandidateScores(benchmark::State& state) {
    const auto n = state.range(0);
    s4is::Rng rng = s4is::substream(11, 1);
    const s4is::PointMatrix draws = s4is::sample_std_normal(4, static_cast<std::size_t>(n), rng);
    const s4is::Vector mean = draws.col(0);
    const s4is::Vector dist = draws.col(1).cwiseAbs();
    const s4is::Vector log_pn = draws.col(2);
    const s4is::Vector log_q2 = draws.col(3);
    for (auto _ : state) {
        benchmark::DoNotOptimize(s4is::lf1_scores(mean, dist, 2.0));
        benchmark::DoNotOptimize(s4is::lf2_scores(mean, dist, 2.0, log_pn, log_q2));
    }
    state.SetItemsProcessed(state.iterations() * n);
}
BENCHMARK(BM_CandidateScores)->Arg(100000)->Arg(1000000);

}  // namespace
