// Serial reference against the OpenMP kernels on the N-body tensor grid (M = 16).
#include <random>

#include <benchmark/benchmark.h>

#include "mfl/fft.hpp"
#include "mfl/kernels.hpp"

using namespace mfl;

namespace {

struct Data {
    int M = 16, N;
    std::vector<cplx> amps;
    std::vector<double> vdiff;
    std::vector<cplx> mult;

    explicit Data(int n) : N(n) {
        std::mt19937_64 rng(1);
        std::normal_distribution<double> z;
        amps.resize(kernels::tensor_size(M, N));
        for (auto& a : amps) a = {z(rng), z(rng)};
        for (int j = 0; j < M; ++j) {
            vdiff.push_back(z(rng));
            mult.push_back(std::polar(1.0 / M, z(rng)));
        }
    }
};

template <bool Par>
void BM_pair_phase(benchmark::State& st) {
    Data d(int(st.range(0)));
    for (auto _ : st) {
        if constexpr (Par) kernels::parallel::pair_phase(d.amps, d.M, d.N, d.vdiff, 1e-3);
        else kernels::serial::pair_phase(d.amps, d.M, d.N, d.vdiff, 1e-3);
        benchmark::DoNotOptimize(d.amps.data());
    }
    st.SetItemsProcessed(st.iterations() * int64_t(d.amps.size()));
}

template <bool Par>
void BM_axis_multiplier(benchmark::State& st) {
    Data d(int(st.range(0)));
    Fft1d fft(d.M);
    for (auto _ : st) {
        if constexpr (Par) kernels::parallel::axis_multiplier(d.amps, d.M, d.N, d.mult, fft);
        else kernels::serial::axis_multiplier(d.amps, d.M, d.N, d.mult, fft);
        benchmark::DoNotOptimize(d.amps.data());
    }
    st.SetItemsProcessed(st.iterations() * int64_t(d.amps.size()));
}

template <bool Par>
void BM_contract(benchmark::State& st) {
    Data d(int(st.range(0)));
    for (auto _ : st) {
        CMatrix F = Par ? kernels::parallel::contract(d.amps, d.M, d.N, 1, 1.0)
                        : kernels::serial::contract(d.amps, d.M, d.N, 1, 1.0);
        benchmark::DoNotOptimize(F.data());
    }
    st.SetItemsProcessed(st.iterations() * int64_t(d.amps.size()));
}

}  // namespace

BENCHMARK(BM_pair_phase<false>)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_pair_phase<true>)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_axis_multiplier<false>)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_axis_multiplier<true>)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_contract<false>)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_contract<true>)->DenseRange(3, 5)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
