// Compares the serial reference path against the OpenMP kernels on the
// per-episode hot spots (plan construction and exact regret scoring) and on a
// short end-to-end run. Results are identical bit-for-bit; only timing moves.

#include <chrono>
#include <cstdio>
#include <vector>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "mccb/env.hpp"
#include "mccb/harness.hpp"
#include "mccb/policies.hpp"

using namespace mccb;

namespace {

double now_ms() {
  using clock = std::chrono::steady_clock;
  return std::chrono::duration<double, std::milli>(clock::now().time_since_epoch()).count();
}

struct Fixture {
  ExperimentConfig cfg;
  SeedInstance inst;
  ModelState model;
  std::vector<Context> contexts;
};

Fixture make_fixture(int N) {
  Fixture fx;
  fx.cfg.N = N;
  fx.cfg.T = 400;
  fx.cfg.T0 = 10;
  fx.cfg.seeds = {7};
  fx.inst = make_instance(fx.cfg, 7);
  fx.model = ModelState::init(fx.cfg.d + fx.cfg.K, fx.cfg.lambda);

  // push some mass into the estimate so plans are not degenerate
  std::vector<BatchItem> batch;
  fx.contexts = sample_contexts(7, 1, N, fx.cfg.d);
  for (int n = 0; n < std::min(N, 50); ++n)
    for (int k = 1; k <= fx.cfg.K; ++k)
      batch.push_back({joint_feature(fx.contexts[n], k, fx.cfg.K), (n + k) % 2 == 0 ? 0.0 : fx.inst.catalog.e(k),
                       fx.inst.catalog.e(k)});
  fx.model = irls_update(fx.model, batch);
  return fx;
}

double bench_kernels(const Fixture& fx, ExecMode exec, int reps, double* checksum) {
  PlanInputs in;
  in.algorithm = Algorithm::aucbbp;
  in.t = 100;
  in.H = fx.cfg.H;
  in.T0 = fx.cfg.T0;
  in.T = fx.cfg.T;
  in.beta = 0.8;
  in.contexts = &fx.contexts;
  in.model = &fx.model;
  in.truth = &fx.inst.truth;
  in.catalog = &fx.inst.catalog;
  in.seed = 7;
  in.exec = exec;

  double sum = 0.0;
  const double start = now_ms();
  for (int r = 0; r < reps; ++r) {
    const EpisodePlan plan = build_episode_plan(in);
    const RegretRecord rec =
        compute_episode_regret(plan, fx.contexts, fx.inst.truth, fx.inst.catalog, exec);
    sum += rec.episode_regret;
  }
  *checksum = sum;
  return now_ms() - start;
}

double bench_run(ExecMode exec, double* checksum) {
  ExperimentConfig cfg;
  cfg.T = 300;
  cfg.T0 = 10;
  cfg.N = 100;
  cfg.algorithm = Algorithm::aucbbp;
  cfg.seeds = {1, 2, 3, 4};
  cfg.exec = exec;
  const double start = now_ms();
  const ResultSet rs = run_experiment(cfg);
  double sum = 0.0;
  for (const SeedResult& sr : rs.per_seed) sum += sr.records.back().cum_regret;
  *checksum = sum;
  return now_ms() - start;
}

}  // namespace

int main() {
#ifdef _OPENMP
  std::printf("openmp enabled, max threads %d\n", omp_get_max_threads());
#else
  std::printf("openmp not enabled in this build\n");
#endif

  for (int N : {200, 1000}) {
    const Fixture fx = make_fixture(N);
    const int reps = N >= 1000 ? 50 : 200;
    double cs_serial = 0.0, cs_parallel = 0.0;
    const double ts = bench_kernels(fx, ExecMode::serial, reps, &cs_serial);
    const double tp = bench_kernels(fx, ExecMode::parallel, reps, &cs_parallel);
    std::printf("plan+regret kernels N=%-5d reps=%-4d serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   results %s\n",
                N, reps, ts, tp, ts / tp, cs_serial == cs_parallel ? "identical" : "DIFFER");
  }

  double cs_serial = 0.0, cs_parallel = 0.0;
  const double ts = bench_run(ExecMode::serial, &cs_serial);
  const double tp = bench_run(ExecMode::parallel, &cs_parallel);
  std::printf("end-to-end aucbbp 4 seeds T=300 N=100    serial %8.1f ms   parallel %8.1f ms   speedup %.2fx   results %s\n",
              ts, tp, ts / tp, cs_serial == cs_parallel ? "identical" : "DIFFER");
  return 0;
}
