// Serial reference kernels against the OpenMP kernels: right-hand side alone
// and whole integrations, on the baseline invader problem.
//
//   bench_kernels [nodes] [repeats]

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <string>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "ccm/experiment.hpp"
#include "ccm/kernels.hpp"
#include "ccm/solver.hpp"

using namespace ccm;
using Clock = std::chrono::steady_clock;

namespace {

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

template <class F>
double best_of(int repeats, F&& f) {
  double best = 1e300;
  for (int r = 0; r < repeats; ++r) {
    const auto t0 = Clock::now();
    f();
    best = std::min(best, seconds_since(t0));
  }
  return best;
}

}  // namespace

int main(int argc, char** argv) {
  const std::size_t n = argc > 1 ? std::strtoul(argv[1], nullptr, 10) : 400001;
  const int repeats = argc > 2 ? std::atoi(argv[2]) : 5;
  int threads = 1;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  std::printf("threads %d, nodes %zu, best of %d\n", threads, n, repeats);

  const ModelParams p = ModelParams::baseline(2.0 / 3.0, 2.0 / 3.0, 0.5);
  SimConfig cfg = make_config(p, Scenario::Invader);
  cfg.grid = Grid{0.1 * static_cast<double>(n - 1), n};
  const Field in = initial_condition(cfg);
  Field out(cfg.grid);
  RhsContext ctx;
  ctx.system = System::CCM;
  ctx.params = &p;
  ctx.diffusivity = diffusivities(System::CCM, p);
  ctx.inv_dx2 = 1.0 / (cfg.grid.dx() * cfg.grid.dx());

  const int calls = 50;
  const double ts = best_of(repeats, [&] {
    for (int k = 0; k < calls; ++k) rhs_serial(ctx, in.view(), out.span(), n);
  });
  const double tp = best_of(repeats, [&] {
    for (int k = 0; k < calls; ++k) rhs_parallel(ctx, in.view(), out.span(), n);
  });
  std::printf("rhs      serial %9.3f ms  parallel %9.3f ms  speedup %.2f\n", 1e3 * ts / calls,
              1e3 * tp / calls, ts / tp);

  SimSettings s;
  s.length = 400.0;
  s.dx = 0.1;
  s.t_end = 10.0;
  SimConfig run = make_sim_config(p, Scenario::Invader, s);
  double t_mode[2] = {};
  const KernelMode modes[2] = {KernelMode::Serial, KernelMode::Parallel};
  for (int m = 0; m < 2; ++m) {
    run.kernel = modes[m];
    t_mode[m] = best_of(std::max(1, repeats / 2), [&] { simulate(run); });
  }
  std::printf("simulate serial %9.3f s   parallel %9.3f s   speedup %.2f  (4001 nodes, t_end 10)\n",
              t_mode[0], t_mode[1], t_mode[0] / t_mode[1]);
  return 0;
}
