#include <benchmark/benchmark.h>

#include "ksweep/ddsa.hpp"
#include "ksweep/fixed_point.hpp"
#include "ksweep/timeloop.hpp"

namespace {

using namespace ksweep;

struct Diode {
  Discretization d;
  PhaseField f0;
  SweepContext ctx;

  explicit Diode(int n, double eps = 0.002, double dt = 0.0025)
      : d(discretize(diode(eps, OmegaVariant::single), n, n)), f0(initial_field(d)),
        ctx(step_context(d, f0, nullptr, dt, dt, TimeScheme::euler)) {}
};

void BM_Sweep(benchmark::State& state) {
  const Diode p(static_cast<int>(state.range(0)));
  const StepSystem sys(p.ctx, p.d.coupling, SolverConfig{});
  const SolverState y = sys.state_from(p.f0);
  const EffectiveField e = sys.field_of(y.rho);
  SweepCounter counter;
  for (auto _ : state) benchmark::DoNotOptimize(sys.sweep_state(y, e, counter));
  state.SetItemsProcessed(state.iterations() * state.range(0) * state.range(0));
}
BENCHMARK(BM_Sweep)->Arg(50)->Arg(100)->Arg(200)->Unit(benchmark::kMillisecond);

void BM_NlsMap(benchmark::State& state) {
  const Diode p(static_cast<int>(state.range(0)));
  const StepSystem sys(p.ctx, p.d.coupling, SolverConfig{});
  const SolverState y = sys.state_from(p.f0);
  const bool ddsa = state.range(1) != 0;
  SweepCounter counter;
  for (auto _ : state) benchmark::DoNotOptimize(sys.nls_map(y, counter, ddsa));
}
BENCHMARK(BM_NlsMap)->Args({100, 0})->Args({100, 1})->Unit(benchmark::kMillisecond);

void BM_DriftDiffusionSolve(benchmark::State& state) {
  const Diode p(static_cast<int>(state.range(0)));
  const StepSystem sys(p.ctx, p.d.coupling, SolverConfig{});
  const SolverState y = sys.state_from(p.f0);
  const EffectiveField e = sys.field_of(y.rho);
  SolverState star = y;
  for (double& c : star.rho.coeffs) c *= 1.01;
  for (auto _ : state) benchmark::DoNotOptimize(ddsa_correct(star, y, e, p.ctx));
}
BENCHMARK(BM_DriftDiffusionSolve)->Arg(100)->Arg(400)->Unit(benchmark::kMicrosecond);

void BM_AndersonAffine(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  Eigen::MatrixXd k = Eigen::MatrixXd::Random(n, n);
  k *= 0.95 / k.operatorNorm();
  const Eigen::VectorXd c = Eigen::VectorXd::Ones(n);
  const FixedPointMap g = [&](const Eigen::VectorXd& y) { return Eigen::VectorXd(k * y + c); };
  DriveConfig cfg;
  cfg.tol = 1e-10;
  for (auto _ : state) benchmark::DoNotOptimize(anderson_drive(g, Eigen::VectorXd::Zero(n), cfg));
}
BENCHMARK(BM_AndersonAffine)->Arg(200)->Arg(1000)->Unit(benchmark::kMillisecond);

void BM_FirstStep(benchmark::State& state) {
  const Diode p(50);
  SolverConfig cfg;
  cfg.method = static_cast<Method>(state.range(0));
  cfg.ddsa = state.range(1) != 0;
  cfg.outer_tol = 1e-10;
  for (auto _ : state) {
    const StepResult r = advance(p.d, p.f0, nullptr, 0.0025, 0.0025, TimeScheme::euler, cfg);
    state.counters["sweeps"] = static_cast<double>(r.outcome.sweeps);
  }
}
BENCHMARK(BM_FirstStep)
    ->Args({static_cast<int>(Method::nls_aa), 0})
    ->Args({static_cast<int>(Method::nls_aa), 1})
    ->Args({static_cast<int>(Method::nest_aa), 0})
    ->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
