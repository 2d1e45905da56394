#include <benchmark/benchmark.h>

#include "gridmotion/pipeline.hpp"
#include "gridmotion/pose.hpp"

namespace {

gmc::Scene make_scene(int size) {
    gmc::SceneConfig cfg = gmc::default_scene();
    cfg.seed = 9;
    cfg.objects[0].n_points = size * 15 / 100;
    cfg.n_static = size - cfg.objects[0].n_points;
    return gmc::generate(cfg);
}

void BM_FilterPipeline(benchmark::State& state) {
    const gmc::Scene scene = make_scene(static_cast<int>(state.range(0)));
    const gmc::PipelineConfig cfg;
    for (auto _ : state) {
        auto result = gmc::run_filter_pipeline(scene.matches, scene.truth.pose, cfg);
        benchmark::DoNotOptimize(result);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_FilterPipeline)->Arg(1000)->Arg(2000)->Arg(4000)->Arg(8000)
    ->Unit(benchmark::kMillisecond);

void BM_GridPasses(benchmark::State& state) {
    const gmc::Scene scene = make_scene(static_cast<int>(state.range(0)));
    const gmc::PipelineConfig cfg;
    const gmc::StatModel model = cfg.effective_stat();
    for (auto _ : state) {
        auto passes =
            gmc::run_passes(scene.matches, scene.truth.pose, cfg.grid, model);
        benchmark::DoNotOptimize(passes);
    }
    state.SetItemsProcessed(state.iterations() * state.range(0));
}
BENCHMARK(BM_GridPasses)->Arg(2000)->Arg(8000)->Unit(benchmark::kMillisecond);

void BM_EstimatePose(benchmark::State& state) {
    const gmc::Scene scene = make_scene(2000);
    for (auto _ : state) {
        auto est = gmc::estimate_pose(scene.matches, {});
        benchmark::DoNotOptimize(est);
    }
}
BENCHMARK(BM_EstimatePose)->Unit(benchmark::kMillisecond);

} // namespace

BENCHMARK_MAIN();
