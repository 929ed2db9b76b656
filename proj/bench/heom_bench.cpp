// Parallel vs serial HEOM right-hand side.

#include <benchmark/benchmark.h>

#include <cmath>
#include <vector>

#include "sbrc/heom.hpp"

namespace {

struct Fixture {
    sbrc::Hierarchy h;
    sbrc::HeomOperator op;
    std::vector<sbrc::cplx> in, out;

    Fixture(int Nc, int K) : h(sbrc::Hierarchy::enumerate(Nc, K)) {
        const auto params = sbrc::SpinBosonParams::from_pi_alpha(0.5, 0.5, 0.05, 0.95);
        op = sbrc::make_heom_operator(h, sbrc::matsubara(sbrc::HeomParams::from_spin_boson(params, K, Nc)), params);
        in.resize(4 * h.size());
        out.resize(4 * h.size());
        for (std::size_t i = 0; i < in.size(); ++i) in[i] = {std::sin(0.1 * i), std::cos(0.3 * i)};
    }
};

template <void (*Rhs)(const sbrc::HeomOperator&, const sbrc::cplx*, sbrc::cplx*)>
void run(benchmark::State& state) {
    Fixture f(static_cast<int>(state.range(0)), static_cast<int>(state.range(1)));
    for (auto _ : state) {
        Rhs(f.op, f.in.data(), f.out.data());
        benchmark::DoNotOptimize(f.out.data());
    }
    state.counters["matrices"] = static_cast<double>(f.h.size());
}

void bm_heom_rhs(benchmark::State& s) { run<sbrc::heom_rhs>(s); }
void bm_heom_rhs_serial(benchmark::State& s) { run<sbrc::heom_rhs_serial>(s); }

}  // namespace

BENCHMARK(bm_heom_rhs)->Args({40, 0})->Args({20, 2})->Args({12, 4});
BENCHMARK(bm_heom_rhs_serial)->Args({40, 0})->Args({20, 2})->Args({12, 4});

BENCHMARK_MAIN();
