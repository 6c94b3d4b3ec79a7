#include <benchmark/benchmark.h>

#include <random>

#include "conerepair/cones.hpp"
#include "conerepair/embedding.hpp"
#include "conerepair/generators.hpp"
#include "conerepair/solver.hpp"

namespace {

using namespace conerepair;

ConeDescriptor mixed_cones(Index m) {
  ConeDescriptor cones;
  cones.append(ConeKind::Zero, m / 4);
  cones.append(ConeKind::NonNeg, m / 4);
  Index rest = m - m / 4 - m / 4;
  while (rest > 0) {
    Index d = std::min<Index>(rest, 5);
    cones.append(ConeKind::Soc, d);
    rest -= d;
  }
  return cones;
}

void BM_ProjectCone(benchmark::State& state) {
  const Index m = state.range(0);
  ConeDescriptor cones = mixed_cones(m);
  std::mt19937_64 rng(7);
  std::normal_distribution<double> dist;
  Vector z(m);
  for (Index i = 0; i < m; ++i) z[i] = dist(rng);
  Vector out(m);
  for (auto _ : state) {
    out = z;
    project_cone_inplace(out, cones);
    benchmark::DoNotOptimize(out.data());
  }
  state.SetItemsProcessed(state.iterations() * m);
}
BENCHMARK(BM_ProjectCone)->Arg(100)->Arg(10000);

// A well-posed random SOCP: data built backward from a primal-dual pair so
// the solver always has a solution to find.
void BM_SolveRandomSocp(benchmark::State& state) {
  const Index n = state.range(0);
  const Index m = 2 * n;
  std::mt19937_64 rng(11);
  std::normal_distribution<double> dist;
  SparseMatrix A(m, n);
  std::uniform_int_distribution<Index> rowpick(0, m - 1);
  for (Index j = 0; j < n; ++j) {
    for (int t = 0; t < 6; ++t) A.add_entry(rowpick(rng), j, dist(rng));
  }
  A.canonicalize();
  ConeDescriptor cones = mixed_cones(m);
  Vector x(n), z(m);
  for (Index i = 0; i < n; ++i) x[i] = dist(rng);
  for (Index i = 0; i < m; ++i) z[i] = dist(rng);
  Vector s = project_cone(z, cones);
  Vector y = project_dual_cone(-z, cones);
  Vector b = A.multiply(x) + s;
  Vector c = -A.multiply_transpose(y);
  SolverSettings settings;
  settings.eps_abs = 1e-6;
  settings.eps_rel = 1e-6;
  for (auto _ : state) {
    Solution sol = solve(A, b, c, cones, settings);
    benchmark::DoNotOptimize(sol.x.data());
  }
}
BENCHMARK(BM_SolveRandomSocp)->Arg(20)->Arg(100)->Unit(benchmark::kMillisecond);

void BM_EmbeddingEvalSpacecraft(benchmark::State& state) {
  ProblemFile pf = gen_spacecraft();
  SolverSettings settings;
  settings.eps_abs = 1e-6;
  settings.eps_rel = 1e-6;
  EmbeddingSolver es(pf.pcp, settings);
  for (auto _ : state) {
    EmbeddingWitness w = es.eval(pf.theta0);
    benchmark::DoNotOptimize(w.tstar);
  }
}
BENCHMARK(BM_EmbeddingEvalSpacecraft)->Unit(benchmark::kMillisecond);

}  // namespace

BENCHMARK_MAIN();
