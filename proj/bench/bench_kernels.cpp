// Serial vs OpenMP timings for the entropy-vector kernel and batch runner.
#include <chrono>
#include <cstdio>
#include <random>
#include <vector>

#include "entvec/batch.hpp"
#include "entvec/core.hpp"
#include "entvec/kernels.hpp"

using namespace entvec;
using namespace entvec::kernels;

namespace {

template <class F>
double time_ms(int reps, F&& f) {
  const auto t0 = std::chrono::steady_clock::now();
  for (int k = 0; k < reps; ++k) f();
  return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count() /
         reps;
}

JointPmf random_pmf(const AlphabetSpec& spec, std::mt19937_64& rng) {
  std::exponential_distribution<double> e(1.0);
  std::vector<double> m(spec.outcomes());
  double sum = 0.0;
  for (double& x : m) sum += (x = e(rng));
  for (double& x : m) x /= sum;
  return JointPmf(spec, std::move(m), 1e-9);
}

}  // namespace

int main() {
  std::printf("openmp=%s threads=%d\n", openmp_enabled() ? "yes" : "no", max_threads());
  std::mt19937_64 rng(1);
  for (const int size : {2, 5, 10, 20}) {
    const auto p = random_pmf(AlphabetSpec::uniform(4, size), rng);
    const int reps = size <= 5 ? 2000 : 50;
    double sink = 0.0;
    const double serial = time_ms(reps, [&] { sink += entropy_vector_serial(p).full(); });
    const double omp = time_ms(reps, [&] { sink += entropy_vector_omp(p).full(); });
    std::printf("entropy_vector alphabet=%d^4 serial=%.4f ms omp=%.4f ms (checksum %.3g)\n", size,
                serial, omp, sink);
  }

  SearchConfig c;
  c.objective = Objective::kIngletonMin;
  c.M = 2000;
  const std::vector<BatchJob> jobs(16, BatchJob{JointPmf::uniform(AlphabetSpec::uniform(4, 2)), c,
                                                std::nullopt});
  const double serial = time_ms(1, [&] { batch_run_serial(jobs, 1); });
  const double omp = time_ms(1, [&] { batch_run(jobs, 1); });
  std::printf("batch 16 ingleton searches serial=%.1f ms omp=%.1f ms\n", serial, omp);
  return 0;
}
