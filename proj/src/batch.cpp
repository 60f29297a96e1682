#include "entvec/batch.hpp"

#include <exception>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "entvec/error.hpp"
#include "entvec/rng.hpp"

namespace entvec {

namespace {

BatchResult run_one(const BatchJob& job, std::uint64_t master_seed, std::size_t k) {
  BatchResult r;
  r.job = k;
  r.seed = job_seed(job, master_seed, k);
  try {
    SearchConfig config = job.config;
    config.seed = r.seed;
    r.outcome = run_search(job.start, config);
  } catch (const Error& e) {
    r.error = e.what();
    r.error_kind = to_string(e.kind());
  } catch (const std::exception& e) {
    r.error = e.what();
    r.error_kind = "internal";
  }
  return r;
}

}  // namespace

std::uint64_t job_seed(const BatchJob& job, std::uint64_t master_seed, std::size_t index) {
  return job.seed ? *job.seed : stream_seed(master_seed, index);
}

std::vector<BatchResult> batch_run(const std::vector<BatchJob>& jobs, std::uint64_t master_seed,
                                   int parallelism) {
  std::vector<BatchResult> results(jobs.size());
  const auto count = static_cast<std::ptrdiff_t>(jobs.size());
#ifdef _OPENMP
  const int threads = parallelism > 0 ? parallelism : omp_get_max_threads();
#pragma omp parallel for schedule(dynamic, 1) num_threads(threads)
#else
  (void)parallelism;
#endif
  for (std::ptrdiff_t k = 0; k < count; ++k) {
    const auto idx = static_cast<std::size_t>(k);
    results[idx] = run_one(jobs[idx], master_seed, idx);
  }
  return results;
}

std::vector<BatchResult> batch_run_serial(const std::vector<BatchJob>& jobs,
                                          std::uint64_t master_seed) {
  std::vector<BatchResult> results;
  results.reserve(jobs.size());
  for (std::size_t k = 0; k < jobs.size(); ++k) results.push_back(run_one(jobs[k], master_seed, k));
  return results;
}

}  // namespace entvec
