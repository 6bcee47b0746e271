// Serial reference kernels against their OpenMP versions, and the cost of one
// all-at-once versus one reduced Landweber step.

#include <benchmark/benchmark.h>

#include "tdinv/harness/experiment.hpp"
#include "tdinv/kernels.hpp"
#include "tdinv/methods.hpp"

namespace {

using tdinv::Matrix;
using tdinv::Vector;
using tdinv::kernels::Exec;

Exec exec_of(const benchmark::State& state) { return state.range(1) ? Exec::parallel : Exec::serial; }

void BM_ToModal(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix q = Matrix::Random(n, n);
    const Matrix x = Matrix::Random(n, n + 1);
    Matrix out;
    for (auto _ : state) {
        tdinv::kernels::to_modal(q, x, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_ModalForward(benchmark::State& state) {
    const auto n = state.range(0);
    const Vector lambda = Vector::LinSpaced(n, 1.0, 1e4);
    const Vector v0 = Vector::Random(n);
    const Matrix src = Matrix::Random(n, n + 1);
    Matrix out;
    for (auto _ : state) {
        tdinv::kernels::modal_forward(lambda, 1e-3, v0, src, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}

void BM_Stencil(benchmark::State& state) {
    const auto n = state.range(0);
    const Matrix x = Matrix::Random(n, n + 1);
    Matrix out;
    for (auto _ : state) {
        tdinv::kernels::apply_stencil(1e4, x, out, exec_of(state));
        benchmark::DoNotOptimize(out.data());
    }
}

struct Benchmark {
    tdinv::harness::BenchmarkInstance inst;
    tdinv::harness::TruthData truth;

    explicit Benchmark(int n) {
        tdinv::harness::InstanceConfig c;
        c.n_x = n;
        c.n_t = n;
        inst = tdinv::harness::make_instance(c);
        truth = tdinv::harness::synthesize_truth({}, inst);
    }
};

void BM_StepALW(benchmark::State& state) {
    const Benchmark b(static_cast<int>(state.range(0)));
    const tdinv::AaoOperator op(b.inst.problem, b.inst.grid, tdinv::AaoOperator::make_data(*b.inst.problem, b.truth.y));
    tdinv::AaoPoint x = op.zero_point();
    for (auto _ : state) {
        x = tdinv::step_alw(op, x, 1.0);
        benchmark::DoNotOptimize(x.theta.data());
    }
}

void BM_StepRLW(benchmark::State& state) {
    const Benchmark b(static_cast<int>(state.range(0)));
    const tdinv::ReducedOperator op(b.inst.problem, b.inst.grid);
    Vector theta = Vector::Zero(b.inst.problem->parameter_dim());
    for (auto _ : state) {
        theta = tdinv::step_rlw(op, theta, b.truth.y, 1.0);
        benchmark::DoNotOptimize(theta.data());
    }
}

}  // namespace

BENCHMARK(BM_ToModal)->ArgsProduct({{50, 100, 200}, {0, 1}});
BENCHMARK(BM_ModalForward)->ArgsProduct({{50, 100, 200}, {0, 1}});
BENCHMARK(BM_Stencil)->ArgsProduct({{50, 100, 200}, {0, 1}});
BENCHMARK(BM_StepALW)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);
BENCHMARK(BM_StepRLW)->Arg(50)->Arg(100)->Unit(benchmark::kMillisecond);

BENCHMARK_MAIN();
