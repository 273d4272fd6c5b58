#include "robochess/engine.hpp"
#include "robochess/notation.hpp"

#include <benchmark/benchmark.h>

using namespace robochess;

namespace {

void BM_perft_parallel(benchmark::State& state) {
    const auto board = BoardState::initial();
    for (auto _ : state) benchmark::DoNotOptimize(perft(board, static_cast<int>(state.range(0))));
}

void BM_perft_serial(benchmark::State& state) {
    const auto board = BoardState::initial();
    for (auto _ : state) benchmark::DoNotOptimize(perft_serial(board, static_cast<int>(state.range(0))));
}

const ParameterGrid& bench_grid() {
    static const ParameterGrid grid = parse_grid("arm.l1 = 0.33, 0.35, 0.37\narm.l2 = 0.33, 0.35, 0.37\n");
    return grid;
}

const GameScript& bench_game() {
    static const GameScript script = load_game_file(ROBOCHESS_DATA_DIR "/games/morphy_opera_1858.pgn");
    return script;
}

void BM_sweep_parallel(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sweep(SimConfig{}, bench_game(), bench_grid()));
}

void BM_sweep_serial(benchmark::State& state) {
    for (auto _ : state) benchmark::DoNotOptimize(sweep_serial(SimConfig{}, bench_game(), bench_grid()));
}

}  // namespace

BENCHMARK(BM_perft_parallel)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_perft_serial)->Arg(3)->Arg(4)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_parallel)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_sweep_serial)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
