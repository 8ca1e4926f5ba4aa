#include <benchmark/benchmark.h>

#include <random>

#include "regionq/box_learner.hpp"
#include "regionq/halfspace_sdl.hpp"
#include "regionq/harness.hpp"
#include "regionq/interval_learner.hpp"
#include "regionq/learning_ltf.hpp"
#include "regionq/oracle.hpp"

namespace {

using namespace regionq;

Instance make(InstanceKind kind, std::size_t n, std::size_t k, std::size_t d, std::size_t extra = 0) {
  InstanceParams p;
  p.kind = kind;
  p.n = n;
  p.k = k;
  p.d = d;
  p.extra = extra;
  return generate_instance(p, 42);
}

void BM_OracleIntervalQuery(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto inst = make(InstanceKind::Intervals, n, 4, 1, 10 * n);
  Oracle oracle(inst.target, inst.s, inst.l);
  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> u(0, 1);
  for (auto _ : state) {
    double a = u(rng), b = u(rng);
    if (b < a) std::swap(a, b);
    benchmark::DoNotOptimize(oracle.peek({Interval(a, b), Sign::Positive}));
  }
}
BENCHMARK(BM_OracleIntervalQuery)->RangeMultiplier(8)->Range(1 << 8, 1 << 14);

void BM_LabelKIntervals(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  const auto k = static_cast<std::size_t>(state.range(1));
  auto inst = make(InstanceKind::Intervals, n, k, 1);
  for (auto _ : state) {
    Oracle oracle(inst.target, inst.s);
    benchmark::DoNotOptimize(label_k_intervals(inst.s, oracle));
  }
}
BENCHMARK(BM_LabelKIntervals)->ArgsProduct({{1 << 8, 1 << 11, 1 << 14}, {1, 8}})->Unit(benchmark::kMicrosecond);

void BM_LabelBox(benchmark::State& state) {
  const auto d = static_cast<std::size_t>(state.range(0));
  auto inst = make(InstanceKind::Box, 1 << 12, 1, d);
  for (auto _ : state) {
    Oracle oracle(inst.target, inst.s);
    benchmark::DoNotOptimize(label_box(inst.s, oracle));
  }
}
BENCHMARK(BM_LabelBox)->Arg(1)->Arg(4)->Arg(8)->Unit(benchmark::kMicrosecond);

void BM_MaxMarginFit(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto inst = make(InstanceKind::Halfspace, n, 1, 3);
  std::vector<LabeledPoint> pts;
  for (std::size_t i = 0; i < inst.s.size(); ++i) {
    Eigen::VectorXd x = Eigen::Map<const Eigen::VectorXd>(inst.s[i].data(), 3);
    pts.push_back({x.normalized(), evaluate(inst.target, inst.s[i])});
  }
  for (auto _ : state) benchmark::DoNotOptimize(max_margin_fit(pts, 3));
}
BENCHMARK(BM_MaxMarginFit)->Arg(64)->Arg(512)->Unit(benchmark::kMicrosecond);

void BM_RandomizedSvmLearn(benchmark::State& state) {
  auto inst = make(InstanceKind::Halfspace, static_cast<std::size_t>(state.range(0)), 1, 3);
  for (auto _ : state) {
    Oracle oracle(inst.target, inst.s);
    benchmark::DoNotOptimize(randomized_svm_learn(inst.s, oracle, 7));
  }
}
BENCHMARK(BM_RandomizedSvmLearn)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

void BM_LearningLtf(benchmark::State& state) {
  const auto n = static_cast<std::size_t>(state.range(0));
  auto inst = make(InstanceKind::Halfspace, n, 1, 3);
  for (auto _ : state) {
    Oracle oracle(inst.target, inst.s);
    benchmark::DoNotOptimize(learning_ltf(inst.s, 1.0 / (2.0 * static_cast<double>(n)), oracle, 3));
  }
}
BENCHMARK(BM_LearningLtf)->Arg(128)->Arg(512)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
