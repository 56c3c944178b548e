// Times the serial and OpenMP evaluation kernels against each other on the
// hypothesis-model hot paths: h(x) evaluation and normal-system assembly.

#include <omp.h>

#include <chrono>
#include <cstdio>
#include <functional>
#include <random>
#include <vector>

#include "dse/kernels.hpp"
#include "dse/models.hpp"

using namespace dse;

namespace {

using clock_type = std::chrono::steady_clock;

double time_ms(int reps, const std::function<void()>& fn) {
  fn();  // warm-up
  const auto t0 = clock_type::now();
  for (int r = 0; r < reps; ++r) fn();
  return std::chrono::duration<double, std::milli>(clock_type::now() - t0).count() / reps;
}

StateVector random_state(const HypothesisModel& m, std::mt19937_64& rng) {
  std::normal_distribution<double> unit(0.0, 1.0);
  StateVector x;
  x.param_count = m.param_count;
  x.n = m.n;
  x.values = Eigen::VectorXd::Zero(m.state_dim());
  x.values[kParamG] = 0.13;
  x.values[kParamGamma] = 102.0;
  if (m.param_count > 2) x.values[kParamGf] = 66.0;
  for (int s = 0; s < m.series_count(); ++s)
    for (int k = 0; k < m.n; ++k) x.traj(s, k) = 100.0 * unit(rng);
  return x;
}

}  // namespace

int main() {
  std::printf("threads available: %d\n", omp_get_max_threads());
  std::printf("%-28s %10s %12s %12s %8s\n", "kernel", "rows", "serial[ms]", "openmp[ms]",
              "speedup");

  std::mt19937_64 rng(1);
  for (int n : {2000, 10000, 40000}) {
    const auto m = build_model(LoadTopology::DeltaRL, FaultHypothesis::line_ground(0), n, 1e-5);
    const auto x = random_state(m, rng);
    const int reps = n <= 2000 ? 50 : (n <= 10000 ? 10 : 3);

    Eigen::VectorXd h;
    const double eval_serial = time_ms(reps, [&] { eval_h(m, x, h, ExecMode::Serial); });
    const double eval_omp = time_ms(reps, [&] { eval_h(m, x, h, ExecMode::Parallel); });
    std::printf("%-28s %10d %12.3f %12.3f %7.2fx\n", "eval_h (delta lg)", m.output_dim(),
                eval_serial, eval_omp, eval_serial / eval_omp);

    Eigen::VectorXd eps = Eigen::VectorXd::Random(m.output_dim());
    NormalSystem ns;
    const double asm_serial =
        time_ms(reps, [&] { assemble_normal_system(m, x, eps, ns, ExecMode::Serial); });
    const double asm_omp =
        time_ms(reps, [&] { assemble_normal_system(m, x, eps, ns, ExecMode::Parallel); });
    std::printf("%-28s %10d %12.3f %12.3f %7.2fx\n", "normal system (delta lg)",
                m.output_dim(), asm_serial, asm_omp, asm_serial / asm_omp);
  }
  return 0;
}
