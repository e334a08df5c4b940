#include "hdmd/hankel.hpp"
#include "hdmd/metrics.hpp"
#include "hdmd/synth.hpp"

#include <benchmark/benchmark.h>

using namespace hdmd;

namespace {

const MultivariateSeries& composite() {
    static const auto s = [] {
        CompositeSpec cs;
        cs.duration = 600.0;
        cs.noise_std = 0.3;
        return generate_composite(cs).series;
    }();
    return s;
}

// Exact DMD on the block-Hankel pair of the 15-channel record; args are (n_tr, n_d).
void bm_dmd_fit(benchmark::State& state) {
    const auto n_tr = static_cast<Eigen::Index>(state.range(0));
    const auto n_d = static_cast<std::size_t>(state.range(1));
    const auto pair = build_hankel_pair(composite().values().leftCols(n_tr), n_d, 0.1);
    for (auto _ : state) benchmark::DoNotOptimize(fit_exact_dmd(pair).rank());
    state.SetLabel(std::to_string(pair.x.rows()) + "x" + std::to_string(pair.x.cols()));
}
BENCHMARK(bm_dmd_fit)->Args({293, 37})->Args({293, 146})->Args({585, 146})->Args({731, 411})->Unit(benchmark::kMillisecond);

void bm_hdmd_forecast(benchmark::State& state) {
    const auto& s = composite();
    const HdmdConfig config{static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1))};
    for (auto _ : state) {
        const auto f = fit_hdmd(s, config, s.time(4000));
        benchmark::DoNotOptimize(predict_steps(f, 73).values().data());
    }
}
BENCHMARK(bm_hdmd_forecast)->Args({146, 37})->Args({731, 411})->Unit(benchmark::kMillisecond);

void bm_metrics(benchmark::State& state) {
    const auto n = static_cast<Eigen::Index>(state.range(0));
    const Eigen::MatrixXd truth = composite().values().leftCols(n);
    const Eigen::MatrixXd pred = composite().values().middleCols(n, n);
    for (auto _ : state) benchmark::DoNotOptimize(evaluate_all(pred, truth, {}).jsd_avg);
}
BENCHMARK(bm_metrics)->Arg(73)->Arg(293);

}  // namespace
BENCHMARK_MAIN();
