// Serial reference vs OpenMP kernels, plus the end-to-end estimators they feed.

#include <benchmark/benchmark.h>

#include <map>
#include <random>
#include <vector>

#include "digitime/econometrics.hpp"
#include "digitime/kernels.hpp"
#include "digitime/model.hpp"
#include "digitime/synthpanel.hpp"

using namespace digitime;

namespace {

struct Panel {
  std::vector<std::int64_t> ids;
  std::vector<double> values;
  kernels::GroupIndex groups;
};

Panel make_panel(std::size_t rows, std::size_t n_groups) {
  std::mt19937_64 rng(42);
  std::uniform_int_distribution<std::int64_t> g(0, static_cast<std::int64_t>(n_groups) - 1);
  std::normal_distribution<double> n;
  Panel p;
  for (std::size_t i = 0; i < rows; ++i) {
    p.ids.push_back(g(rng));
    p.values.push_back(n(rng));
  }
  p.groups = kernels::build_groups(p.ids, n_groups);
  return p;
}

template <bool Parallel>
void BM_demean(benchmark::State& state) {
  auto p = make_panel(static_cast<std::size_t>(state.range(0)), static_cast<std::size_t>(state.range(1)));
  for (auto _ : state) {
    auto col = p.values;
    if constexpr (Parallel)
      kernels::omp::demean(col, p.groups, {});
    else
      kernels::serial::demean(col, p.groups, {});
    benchmark::DoNotOptimize(col.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_cluster_scores(benchmark::State& state) {
  auto p = make_panel(static_cast<std::size_t>(state.range(0)), 36);
  Eigen::MatrixXd X = Eigen::MatrixXd::Random(state.range(0), 4);
  Eigen::VectorXd e = Eigen::Map<Eigen::VectorXd>(p.values.data(), state.range(0));
  for (auto _ : state) {
    auto s = Parallel ? kernels::omp::cluster_score_sums(X, e, p.groups)
                      : kernels::serial::cluster_score_sums(X, e, p.groups);
    benchmark::DoNotOptimize(s.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

template <bool Parallel>
void BM_evaluate_points(benchmark::State& state) {
  auto prefs = Preferences::three({1, 1, 1.2366}, {1, 1, 0.8379}, {1, 1, 0.999});
  std::size_t n = static_cast<std::size_t>(state.range(0));
  std::vector<double> pts(3 * n), vals(n);
  std::mt19937_64 rng(3);
  std::uniform_real_distribution<double> u(0.01, 1.0);
  for (auto& x : pts) x = u(rng);
  kernels::PointObjective f = [&](std::span<const double> h) {
    return total_utility(prefs, std::vector<double>(h.begin(), h.end()));
  };
  for (auto _ : state) {
    if constexpr (Parallel)
      kernels::omp::evaluate_points(f, pts, 3, vals);
    else
      kernels::serial::evaluate_points(f, pts, 3, vals);
    benchmark::DoNotOptimize(vals.data());
  }
  state.SetItemsProcessed(state.iterations() * state.range(0));
}

void BM_solve_allocation(benchmark::State& state) {
  auto prefs = Preferences::three({1, 1, 1.2366}, {1, 1, 0.8379}, {1, 1, 0.999});
  for (auto _ : state) benchmark::DoNotOptimize(solve_allocation(prefs, 1.0).shadow_price);
}

void BM_long_difference(benchmark::State& state) {
  synth::DgpConfig cfg;
  cfg.n_households = state.range(0);
  auto data = synth::generate_long_difference(cfg);
  std::map<std::int64_t, econ::HouseholdInputs> hh;
  for (const auto& h : data.households) hh[h.household_id] = {h.exposure, h.coverage, h.adopted};
  for (auto _ : state) benchmark::DoNotOptimize(econ::long_difference(data.records, hh, false).households);
}

}  // namespace

BENCHMARK(BM_demean<false>)->Args({480000, 10000})->Args({480000, 36})->Name("demean/serial");
BENCHMARK(BM_demean<true>)->Args({480000, 10000})->Args({480000, 36})->Name("demean/omp");
BENCHMARK(BM_cluster_scores<false>)->Arg(480000)->Name("cluster_score_sums/serial");
BENCHMARK(BM_cluster_scores<true>)->Arg(480000)->Name("cluster_score_sums/omp");
BENCHMARK(BM_evaluate_points<false>)->Arg(20000)->Name("evaluate_points/serial");
BENCHMARK(BM_evaluate_points<true>)->Arg(20000)->Name("evaluate_points/omp");
BENCHMARK(BM_solve_allocation);
BENCHMARK(BM_long_difference)->Arg(10000)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
