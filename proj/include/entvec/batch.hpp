#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "entvec/core.hpp"
#include "entvec/search.hpp"

namespace entvec {

struct BatchJob {
  JointPmf start;
  SearchConfig config;  // config.seed is ignored unless `seed` is set
  // Explicit seed, e.g. when replaying a record; otherwise the job's seed is
  // stream_seed(master, index).
  std::optional<std::uint64_t> seed;
};

struct BatchResult {
  std::size_t job = 0;
  std::uint64_t seed = 0;  // seed the search actually used
  std::optional<SearchOutcome> outcome;
  std::string error;  // empty on success
  std::string error_kind;

  bool ok() const { return outcome.has_value(); }
};

std::uint64_t job_seed(const BatchJob& job, std::uint64_t master_seed, std::size_t index);

// Runs every job with run_search. Output order matches job order and the
// results do not depend on `parallelism` (0 = OpenMP default).
std::vector<BatchResult> batch_run(const std::vector<BatchJob>& jobs, std::uint64_t master_seed,
                                   int parallelism = 0);

// Single-threaded reference.
std::vector<BatchResult> batch_run_serial(const std::vector<BatchJob>& jobs,
                                          std::uint64_t master_seed);

}  // namespace entvec
