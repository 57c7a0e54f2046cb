#include <random>

#include <benchmark/benchmark.h>

#include "dirac/diracrel.hpp"
#include "dirac/exactlin.hpp"
#include "dirac/ph_library.hpp"
#include "dirac/phsys.hpp"
#include "dirac/thermo.hpp"

using namespace dirac;

namespace {

lin::Mat random_mat(std::mt19937_64& rng, std::size_t rows, std::size_t cols) {
    std::uniform_int_distribution<int> num(-5, 5), den(1, 4);
    lin::Mat m(rows, cols);
    for (std::size_t r = 0; r < rows; ++r)
        for (std::size_t c = 0; c < cols; ++c) {
            lin::Rat v(num(rng), den(rng));
            v.canonicalize();
            m(r, c) = v;
        }
    return m;
}

// n transformers composed one after another behind a trivial junction.
void BM_ComposeTransformerChain(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DiracRelation link = make_junction(JunctionType::zero, 1, 1, 1);
    for (auto _ : state) {
        DiracRelation acc = link;
        for (std::size_t i = 1; i < n; ++i) acc = compose(acc, transformer(lin::Rat(static_cast<long>(i + 1), 2)));
        benchmark::DoNotOptimize(acc);
    }
}
BENCHMARK(BM_ComposeTransformerChain)->Arg(4)->Arg(16)->Arg(64);

void BM_ComposeWideJunction(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    const DiracRelation split = make_junction(JunctionType::zero, 1, n, 1);
    const DiracRelation merge = make_junction(JunctionType::one, n, 1, 1);
    for (auto _ : state) benchmark::DoNotOptimize(compose(split, merge));
}
BENCHMARK(BM_ComposeWideJunction)->Arg(2)->Arg(4)->Arg(8);

void BM_Rref(benchmark::State& state) {
    const auto n = static_cast<std::size_t>(state.range(0));
    std::mt19937_64 rng(7);
    const lin::Mat m = random_mat(rng, n, 2 * n);
    for (auto _ : state) benchmark::DoNotOptimize(lin::Subspace::span(m));
}
BENCHMARK(BM_Rref)->Arg(4)->Arg(8)->Arg(16);

void BM_SimulateHovercar(benchmark::State& state) {
    const ph::PHSystem h = ph::hovercar(2, 0.5, 0.3);
    const std::vector<ph::PortInput> forces{ph::PortInput::effort([](double t) { return std::sin(t); }),
                                            ph::PortInput::effort([](double t) { return 0.5 * std::cos(2 * t); })};
    Eigen::VectorXd x0(6);
    x0 << 0, 0, 0.4, 1.0, -0.5, 0.2;
    for (auto _ : state) benchmark::DoNotOptimize(ph::simulate(h, forces, x0, 0, 1, 1e-3));
}
BENCHMARK(BM_SimulateHovercar)->Unit(benchmark::kMillisecond);

void BM_TwoHeatCapacities(benchmark::State& state) {
    thermo::AffineRelation r;
    r.x_dim = 2;
    r.y_dim = 1;
    r.A = Eigen::MatrixXd::Ones(1, 2);
    r.B = -Eigen::MatrixXd::Ones(1, 1);
    r.c = Eigen::VectorXd::Zero(1);
    const thermo::Pushforward pf(r, {thermo::heat_capacity(1), thermo::heat_capacity(2)},
                                 thermo::ConvexDomain::positive(1));
    const Eigen::VectorXd y = Eigen::VectorXd::Constant(1, 3.0);
    for (auto _ : state) benchmark::DoNotOptimize(pf.solve(y));
}
BENCHMARK(BM_TwoHeatCapacities);

} // namespace
BENCHMARK_MAIN();
