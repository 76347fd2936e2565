// Microbenchmarks for the hot paths: power solvers across cell counts,
// the bandwidth solver across user counts, text embedding, memory
// retrieval across archive sizes, and envelope encoding.

#include <benchmark/benchmark.h>

#include <string>
#include <vector>

#include "netorch/embedding.hpp"
#include "netorch/executor.hpp"
#include "netorch/memory.hpp"
#include "netorch/rng.hpp"
#include "netorch/simenv.hpp"
#include "netorch/solvers.hpp"

using namespace netorch;

namespace {

PowerProblem power_problem(std::size_t cells) {
  return scenario_to_power_problem(generate_scenario(cells, 10, 96, /*seed=*/1), 1000.0);
}

BandwidthProblem bandwidth_problem(std::size_t users) {
  SplitMix64 rng(substream(1, "bench_snr", 0));
  BandwidthProblem problem{100.0, {}};
  for (std::size_t k = 0; k < users; ++k) {
    problem.effective_snr.push_back(0.5 + 499.5 * rng.uniform());
  }
  return problem;
}

std::string random_sentence(SplitMix64& rng) {
  static const std::vector<std::string> kWords = {
      "allocate", "power", "bandwidth", "for",  "the",     "worst",
      "user",     "cell",  "edge",      "beam", "downlink", "fairness"};
  std::string text = kWords[rng.next() % kWords.size()];
  for (int w = 0; w < 6; ++w) text += ' ' + kWords[rng.next() % kWords.size()];
  return text;
}

void BM_PowerMaxMin(benchmark::State& state) {
  const PowerProblem problem = power_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_power_maxmin(problem));
}
BENCHMARK(BM_PowerMaxMin)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_PowerMaxProd(benchmark::State& state) {
  const PowerProblem problem = power_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_power_maxprod(problem));
}
BENCHMARK(BM_PowerMaxProd)->Arg(1)->Arg(4)->Arg(16)->Unit(benchmark::kMillisecond);

void BM_SinrEvaluation(benchmark::State& state) {
  const PowerProblem problem = power_problem(state.range(0));
  const Allocation uniform = solve_power_uniform(problem);
  const Matrix p = as_power_matrix(problem, uniform.values);
  for (auto _ : state) benchmark::DoNotOptimize(sinr_all(problem, p));
}
BENCHMARK(BM_SinrEvaluation)->Arg(1)->Arg(4)->Arg(16);

void BM_BandwidthPf(benchmark::State& state) {
  const BandwidthProblem problem = bandwidth_problem(state.range(0));
  for (auto _ : state) benchmark::DoNotOptimize(solve_bandwidth_pf(problem));
}
BENCHMARK(BM_BandwidthPf)->Arg(10)->Arg(100)->Arg(1000);

void BM_WaterFilling(benchmark::State& state) {
  const BandwidthProblem source = bandwidth_problem(state.range(0));
  for (auto _ : state) {
    benchmark::DoNotOptimize(solve_waterfilling(source.effective_snr, 1.0, 100.0));
  }
}
BENCHMARK(BM_WaterFilling)->Arg(10)->Arg(100)->Arg(1000);

void BM_EmbedText(benchmark::State& state) {
  const std::string query = "optimize power allocation for the worst user in cell 3";
  for (auto _ : state) benchmark::DoNotOptimize(embed_text(query));
}
BENCHMARK(BM_EmbedText);

void BM_MemoryRetrieve(benchmark::State& state) {
  SplitMix64 rng(substream(2, "bench_memory", 0));
  MemoryStore store;
  for (int64_t i = 0; i < state.range(0); ++i) {
    store.store_record(random_sentence(rng), "{}", "summary", {});
  }
  for (auto _ : state) {
    benchmark::DoNotOptimize(store.retrieve("allocate power for the worst user", 5));
  }
}
BENCHMARK(BM_MemoryRetrieve)->Arg(100)->Arg(1000)->Arg(10000);

void BM_EnvelopeRoundTrip(benchmark::State& state) {
  ToolCall call;
  call.call_id = "call_0";
  call.tool = "maxmin_power_v1";
  call.arguments["signal_gain"] = Matrix(4, 10, 1.5);
  call.arguments["cross_gain"] = Matrix(4, 40, 0.1);
  call.arguments["noise"] = 1.0;
  call.arguments["p_max"] = 1000.0;
  for (auto _ : state) {
    benchmark::DoNotOptimize(decode_tool_call(encode_tool_call(call)));
  }
}
BENCHMARK(BM_EnvelopeRoundTrip);

}  // namespace

BENCHMARK_MAIN();
