#include <benchmark/benchmark.h>

#include <limits>

#include "truecluster/baselearn.hpp"
#include "truecluster/generate.hpp"
#include "truecluster/kdtree.hpp"
#include "truecluster/matching.hpp"
#include "truecluster/mmcc.hpp"

namespace tc = truecluster;

namespace {

tc::Matrix<double> normal_points(std::size_t n, std::size_t m, std::uint64_t seed) {
    tc::Rng rng(seed);
    tc::Matrix<double> x(n, m);
    for (auto& v : x.data()) v = rng.normal();
    return x;
}

void BM_KdTreeQuery(benchmark::State& state) {
    const auto dims = static_cast<std::size_t>(state.range(0));
    const tc::KdTree tree(normal_points(4000, dims, 1));
    const tc::Matrix<double> queries = normal_points(256, dims, 2);
    for (auto _ : state)
        for (std::size_t q = 0; q < queries.rows(); ++q) benchmark::DoNotOptimize(tree.nearest(queries.row(q)));
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_KdTreeQuery)->Arg(2)->Arg(5)->Arg(20);

void BM_LinearScan(benchmark::State& state) {
    const auto dims = static_cast<std::size_t>(state.range(0));
    const tc::Matrix<double> pts = normal_points(4000, dims, 1);
    const tc::Matrix<double> queries = normal_points(256, dims, 2);
    for (auto _ : state) {
        for (std::size_t q = 0; q < queries.rows(); ++q) {
            double best = std::numeric_limits<double>::infinity();
            for (std::size_t j = 0; j < pts.rows(); ++j) best = std::min(best, tc::squared_distance(pts.row(j), queries.row(q)));
            benchmark::DoNotOptimize(best);
        }
    }
    state.SetItemsProcessed(state.iterations() * 256);
}
BENCHMARK(BM_LinearScan)->Arg(2)->Arg(5)->Arg(20);

void BM_PamFit(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const tc::Matrix<double> x = normal_points(n, 5, 3);
    const tc::PairwiseDistances d(x);
    tc::Rng rng(4);
    const auto r = tc::draw_resample(n, n, tc::ResampleScheme::bootstrap, rng);
    for (auto _ : state) benchmark::DoNotOptimize(tc::fit_pam(x, r.indices, 4, &d));
}
BENCHMARK(BM_PamFit)->Arg(200)->Arg(1000);

void BM_HungarianMatch(benchmark::State& state) {
    const auto k = static_cast<std::size_t>(state.range(0));
    tc::Rng rng(5);
    tc::ContingencyTable t(k, k);
    for (auto& v : t.data()) v = static_cast<std::int64_t>(rng.uniform_index(100));
    for (auto _ : state) benchmark::DoNotOptimize(tc::max_trace_assignment(t));
}
BENCHMARK(BM_HungarianMatch)->Arg(4)->Arg(10);

void BM_MmccRounds(benchmark::State& state) {
    tc::GenerateConfig g;
    g.shape = tc::Shape::flipper4;
    g.n = 200;
    const tc::MmccContext ctx(tc::generate(g).points, tc::BaseKind::pam, tc::PredictKind::representative);
    tc::MmccConfig cfg;
    cfg.k = 4;
    cfg.resamples = 100;
    for (auto _ : state) benchmark::DoNotOptimize(tc::mmcc_fit(ctx, cfg));
    state.SetItemsProcessed(state.iterations() * 100);
}
BENCHMARK(BM_MmccRounds)->Unit(benchmark::kMillisecond);

}  // namespace
BENCHMARK_MAIN();
