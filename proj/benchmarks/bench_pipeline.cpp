// End-to-end pipeline benchmarks on the shipped example programs, plus
// a simulator benchmark to track oracle exploration cost.
#include <benchmark/benchmark.h>

#include <fstream>
#include <sstream>

#include "loopbound/analysis.hpp"

namespace {

std::string read_program(const std::string &name) {
  std::ifstream in(std::string(TEST_PROGRAMS_DIR) + "/" + name);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void bench_analyze(benchmark::State &state, const std::string &name) {
  std::string src = read_program(name);
  for (auto _ : state) {
    lb::AnalysisResult r = lb::analyze_source(src, {});
    benchmark::DoNotOptimize(r.total);
  }
}

void bench_simulate(benchmark::State &state, const std::string &name,
                    lb::Valuation params) {
  lb::AnalysisResult r = lb::analyze_source(read_program(name), {});
  lb::Oracle oracle = lb::make_oracle(r);
  for (auto _ : state) {
    lb::TraceStats st = oracle.simulate(params, 100000);
    benchmark::DoNotOptimize(st.total_max);
  }
}

} // namespace

BENCHMARK_CAPTURE(bench_analyze, three_level_nest, "fig1.imp");
BENCHMARK_CAPTURE(bench_analyze, amortized_two_phase, "fig2.imp");
BENCHMARK_CAPTURE(bench_analyze, growing_reset, "example1.imp");
BENCHMARK_CAPTURE(bench_analyze, halving_times_linear, "divstep.imp");
BENCHMARK_CAPTURE(bench_analyze, sequential_chain, "chain3.imp");

BENCHMARK_CAPTURE(bench_simulate, three_level_nest_n6, "fig1.imp",
                  lb::Valuation{{"n", 6}});
BENCHMARK_CAPTURE(bench_simulate, amortized_two_phase_m8, "fig2.imp",
                  lb::Valuation{{"m", 8}});

BENCHMARK_MAIN();
