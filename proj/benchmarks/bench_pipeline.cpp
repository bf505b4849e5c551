#include <benchmark/benchmark.h>

#include "sob/io.hpp"

using namespace sob;

namespace {

std::shared_ptr<const Domain> corpus(const std::string& name) {
    return std::make_shared<const Domain>(load_domain_file(std::string(SOB_DATA_DIR) + "/" + name + ".json"));
}

std::shared_ptr<const Decomposition> decomposed(const std::string& name, int L) {
    return std::make_shared<const Decomposition>(whitney_decompose(corpus(name), L));
}

void BM_Decompose(benchmark::State& st) {
    const auto d = corpus("spiral");
    const int L = static_cast<int>(st.range(0));
    size_t n = 0;
    for (auto _ : st) {
        const Decomposition w = whitney_decompose(d, L);
        n = w.size();
        benchmark::DoNotOptimize(n);
    }
    st.counters["squares"] = static_cast<double>(n);
}
BENCHMARK(BM_Decompose)->DenseRange(6, 10, 2)->Unit(benchmark::kMillisecond);

void BM_CoreRegion(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto w = decomposed("comb", n + 1);
    for (auto _ : st) benchmark::DoNotOptimize(core_region(w, n).squares.size());
}
BENCHMARK(BM_CoreRegion)->DenseRange(5, 8, 1)->Unit(benchmark::kMillisecond);

void BM_Collar(benchmark::State& st) {
    const int n = static_cast<int>(st.range(0));
    const auto w = decomposed("comb", n + 1);
    const CoreRegion c = core_region(w, n);
    CollarConfig cfg;
    cfg.C = 8;
    for (auto _ : st) {
        Raster r(w->domain, c, 7);
        benchmark::DoNotOptimize(partition_collar(c, *w->domain, cfg, r).regions.size());
    }
}
BENCHMARK(BM_Collar)->DenseRange(5, 6, 1)->Unit(benchmark::kMillisecond);

void BM_Separation(benchmark::State& st) {
    const auto w = decomposed("comb", 7);
    const CoreRegion c = core_region(w, 6);
    CollarConfig cfg;
    cfg.C = 64;
    SeparationOptions opt;
    opt.pairs = static_cast<size_t>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(verify_separation(c, *w->domain, cfg, opt).tested);
}
BENCHMARK(BM_Separation)->Arg(32)->Arg(128)->Unit(benchmark::kMillisecond);

void BM_Mollifier(benchmark::State& st) {
    const double r = std::ldexp(1.0, -10), h = r / static_cast<double>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(mollifier(r, h, 2).support_cells());
}
BENCHMARK(BM_Mollifier)->RangeMultiplier(2)->Range(4, 32);

void BM_PolyFit(benchmark::State& st) {
    const auto u = builtin_field("trig_exp");
    const int k = static_cast<int>(st.range(0));
    for (auto _ : st) benchmark::DoNotOptimize(poly_fit(*u, Square{5, 11, 7}, k).c.data());
}
BENCHMARK(BM_PolyFit)->DenseRange(1, 4, 1);

void BM_ApproximantJet(benchmark::State& st) {
    const auto w = decomposed("unit_square", 5);
    ApproxConfig cfg;
    cfg.collar.C = 8;
    const Approximant a = build_approximant(builtin_field("trig_exp"), w, 4, static_cast<int>(st.range(0)), cfg);
    // a strip across the collar: mixed cells next to the boundary and the core
    int64_t i = 0;
    for (auto _ : st) {
        benchmark::DoNotOptimize(a.jet(1 + i % 300, 1024).value());
        ++i;
    }
}
BENCHMARK(BM_ApproximantJet)->DenseRange(1, 2, 1);

void BM_ConvergenceRow(benchmark::State& st) {
    const auto d = corpus("unit_square");
    ApproxConfig cfg;
    cfg.collar.C = 8;
    const std::vector<int> ns{static_cast<int>(st.range(0))};
    for (auto _ : st) benchmark::DoNotOptimize(convergence_study(builtin_field("trig_exp"), d, 1, 2, ns, cfg).rows[0].E);
}
BENCHMARK(BM_ConvergenceRow)->DenseRange(3, 5, 1)->Unit(benchmark::kSecond)->Iterations(1);

}  // namespace

BENCHMARK_MAIN();
