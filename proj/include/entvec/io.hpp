#pragma once

#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"

#include "entvec/batch.hpp"
#include "entvec/core.hpp"
#include "entvec/geometry.hpp"
#include "entvec/ray_set.hpp"
#include "entvec/search.hpp"

namespace entvec {

using Json = nlohmann::json;

// Loaded pmfs may sum to 1 within this; the deficit is kept (or removed with
// renormalize) and reported.
inline constexpr double kLoadSumTolerance = 1e-6;

// "%.15g", the precision of every number this library writes.
std::string format_number(double v);
// Value of format_number(v) read back.
double round15(double v);

// Sparse pmf text:
//   # comment lines and blank lines anywhere
//   n 4
//   alphabet 2 2 2 2
//   x1 x2 x3 x4 prob     (one line per atom, symbols 0-based)
struct PmfLoadOptions {
  bool renormalize = false;
};

struct LoadedPmf {
  JointPmf pmf;
  double deficit = 0.0;  // 1 - sum of the listed masses, before renormalizing
  bool renormalized = false;
  std::size_t atoms = 0;
};

LoadedPmf parse_sparse_pmf(std::istream& in, const std::string& source,
                           PmfLoadOptions options = {});
LoadedPmf load_sparse_pmf_detailed(const std::filesystem::path& path,
                                   PmfLoadOptions options = {});
JointPmf load_sparse_pmf(const std::filesystem::path& path, PmfLoadOptions options = {});

void write_sparse_pmf(std::ostream& out, const JointPmf& p, const std::string& comment = {});
void write_sparse_pmf(const std::filesystem::path& path, const JointPmf& p,
                      const std::string& comment = {});

// Ray table CSV: optional "#" comment lines, then a header "label,h1,h2,h12,..."
// in canonical order (prefix h, or g for hyperplane tables), one ray per row.
RaySet parse_ray_table(std::istream& in, const std::string& source);
RaySet load_ray_table(const std::filesystem::path& path);

void write_ray_table(std::ostream& out, const RaySet& rays, char prefix = 'h',
                     const std::string& comment = {});
void write_ray_table(const std::filesystem::path& path, const RaySet& rays, char prefix = 'h',
                     const std::string& comment = {});

struct HyperplaneTable {
  std::vector<std::string> labels;
  std::vector<Hyperplane> hyperplanes;
};

// Coefficients are kept at the file's scale.
HyperplaneTable load_hyperplanes(const std::filesystem::path& path);
void write_hyperplanes(std::ostream& out, const HyperplaneTable& table,
                       const std::string& comment = {});

// JSON forms. Inputs (config, start pmf) are written exactly so a record can
// be replayed; results are rounded to 15 significant digits.
Json pmf_to_json(const JointPmf& p);
JointPmf pmf_from_json(const Json& j);
Json config_to_json(const SearchConfig& c);
SearchConfig config_from_json(const Json& j);

// One record per batch result: master seed, job index, job seed, rng name,
// config echo, start pmf, termination, counts, final values, perturbation
// statistics. Failed jobs carry "error" instead of results.
Json run_record(const BatchResult& r, const BatchJob& job, std::uint64_t master_seed);

// A record, or a job object {"start", "config", optional "seed"}.
BatchJob job_from_json(const Json& j);

struct JobFile {
  std::optional<std::uint64_t> master_seed;
  std::vector<BatchJob> jobs;
};

// Accepts {"master_seed": s, "jobs": [...]}, a bare array of jobs, or a
// JSON-lines file of jobs or records.
JobFile parse_jobs(std::istream& in, const std::string& source);
JobFile load_jobs(const std::filesystem::path& path);

// JSON lines, one record per result.
void write_run_records(std::ostream& out, const std::vector<BatchResult>& results,
                       const std::vector<BatchJob>& jobs, std::uint64_t master_seed);
void write_run_records(const std::filesystem::path& path, const std::vector<BatchResult>& results,
                       const std::vector<BatchJob>& jobs, std::uint64_t master_seed);

// Columns: accepted_move,proposals_so_far,objective,ingleton_score.
void emit_trace_csv(std::ostream& out, const SearchOutcome& outcome);
void emit_trace_csv(const std::filesystem::path& path, const SearchOutcome& outcome);

// One row per result: job,seed,termination,accepted_moves,proposals,
// final_objective,final_distance,ingleton_score,error.
void write_batch_summary_csv(std::ostream& out, const std::vector<BatchResult>& results);

// Throws an io error when the file cannot be opened.
std::ofstream open_output(const std::filesystem::path& path);
std::ifstream open_input(const std::filesystem::path& path);

}  // namespace entvec
