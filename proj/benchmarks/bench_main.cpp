#include <benchmark/benchmark.h>

#include <cmath>

#include "circlelab/expsums.hpp"
#include "circlelab/quadrature.hpp"
#include "circlelab/representations.hpp"
#include "circlelab/sieve.hpp"
#include "circlelab/special.hpp"

using namespace circlelab;

namespace {

void BM_SievePrimes(benchmark::State& state) {
    const auto limit = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto t = sieve::sieve_primes(limit);
        benchmark::DoNotOptimize(t.primes.data());
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(limit));
}
BENCHMARK(BM_SievePrimes)->Arg(100000)->Arg(1000000)->Arg(10000000);

void BM_BuildStilde(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    for (auto _ : state) {
        auto s = expsums::build_s_tilde(2, n, 1e-8);
        benchmark::DoNotOptimize(s.size());
    }
}
BENCHMARK(BM_BuildStilde)->Arg(10000)->Arg(100000)->Arg(1000000);

void BM_ValueAt(benchmark::State& state) {
    const auto n = static_cast<std::uint64_t>(state.range(0));
    const auto s = expsums::build_s_tilde(2, n, 1e-8);
    double alpha = 0.123456;
    for (auto _ : state) {
        benchmark::DoNotOptimize(s.value_at(alpha));
        alpha += 1e-6;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(s.size()));
}
BENCHMARK(BM_ValueAt)->Arg(10000)->Arg(100000)->Arg(1000000);

void BM_ValueAtContiguous(benchmark::State& state) {
    // f_k runs through the rotation recurrence
    const auto f = expsums::build_finite(expsums::SeriesKind::Ffinite, 2.0,
                                         static_cast<std::uint64_t>(state.range(0)), 8.0);
    double alpha = 0.123456;
    for (auto _ : state) {
        benchmark::DoNotOptimize(f.value_at(alpha));
        alpha += 1e-6;
    }
    state.SetItemsProcessed(state.iterations() * static_cast<std::int64_t>(f.size()));
}
BENCHMARK(BM_ValueAtContiguous)->Arg(100000)->Arg(1000000);

void BM_MeanSquareKernel(benchmark::State& state) {
    const auto s = expsums::build_s_tilde(2, static_cast<std::uint64_t>(state.range(0)), 1e-8);
    const double tau = std::pow(static_cast<double>(state.range(0)), -0.5);
    for (auto _ : state) benchmark::DoNotOptimize(quadrature::mean_square(s, tau));
    state.SetItemsProcessed(state.iterations() *
                            static_cast<std::int64_t>(s.size() * s.size() / 2));
}
BENCHMARK(BM_MeanSquareKernel)->Arg(10000)->Arg(100000);

void BM_WindowConvolution(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    const auto v1 = expsums::build_v_tilde(2, n, 1e-12);
    const auto v2 = expsums::build_v_tilde(3, n, 1e-12);
    const auto u = expsums::build_u(100);
    const quadrature::Factor fs[] = {{&v1, false}, {&v2, false}, {&u, true}};
    for (auto _ : state)
        benchmark::DoNotOptimize(quadrature::integral_product(fs, static_cast<std::int64_t>(n)));
}
BENCHMARK(BM_WindowConvolution)->Arg(5000)->Arg(50000);

void BM_CountR(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    const representations::Window w{n, special::ProblemParams::h_from_exponent(n, 0.9)};
    for (auto _ : state) {
        auto r = representations::count_R(w, 2, 3);
        benchmark::DoNotOptimize(r.values.data());
    }
}
BENCHMARK(BM_CountR)->Arg(100000)->Arg(1000000)->Arg(10000000);

void BM_LaplaceLhs(benchmark::State& state) {
    for (auto _ : state)
        benchmark::DoNotOptimize(quadrature::laplace_lhs(10000, 10000, 0.5, 0.5));
}
BENCHMARK(BM_LaplaceLhs);

void BM_MainTermM(benchmark::State& state) {
    const std::uint64_t n = static_cast<std::uint64_t>(state.range(0));
    const representations::Window w{n, special::ProblemParams::h_from_exponent(n, 0.8)};
    const double a = special::a_factor(n, 1.0);
    for (auto _ : state)
        benchmark::DoNotOptimize(representations::main_term_M(w, 2, 3, a));
}
BENCHMARK(BM_MainTermM)->Arg(10000)->Arg(100000);

}  // namespace

BENCHMARK_MAIN();
