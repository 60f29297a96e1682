#include "entvec/cli.hpp"

#include <algorithm>
#include <cmath>
#include <iostream>
#include <limits>
#include <optional>
#include <sstream>

#include "CLI11.hpp"

#include "entvec/batch.hpp"
#include "entvec/error.hpp"
#include "entvec/fixtures.hpp"
#include "entvec/geometry.hpp"
#include "entvec/inner_bounds.hpp"
#include "entvec/io.hpp"
#include "entvec/kernels.hpp"
#include "entvec/rng.hpp"
#include "entvec/search.hpp"

namespace entvec {

namespace {

namespace fs = std::filesystem;

// Ray tables searched for bare target names such as "fc" or "rho26".
const char* const kNamedRayFiles[] = {"named_rays.csv", "pyramid_vamos.csv", "pyramid_base.csv",
                                      "ingleton_cone.csv", "zy98_nearest.csv"};

std::optional<std::vector<double>> parse_reals(const std::string& text) {
  std::string s = text;
  std::replace(s.begin(), s.end(), ',', ' ');
  std::istringstream is(s);
  std::vector<double> v;
  std::string tok;
  while (is >> tok) {
    char* end = nullptr;
    const double x = std::strtod(tok.c_str(), &end);
    if (end != tok.c_str() + tok.size()) return std::nullopt;
    v.push_back(x);
  }
  if (v.empty()) return std::nullopt;
  return v;
}

int variables_for(std::size_t coords) {
  for (int n = 1; n <= kMaxVariables; ++n)
    if (subset_count(n) == coords) return n;
  return 0;
}

// "name", "file:label", "file" (single row), or inline reals.
EntropyVector resolve_vector(const std::string& spec, const fs::path& fixtures) {
  if (auto reals = parse_reals(spec)) {
    const int n = variables_for(reals->size());
    if (n == 0)
      fail(ErrorKind::kInvalidArgument, "inline vector has " + std::to_string(reals->size()) +
                                            " entries, not 2^n - 1");
    return EntropyVector(n, std::move(*reals));
  }
  const auto colon = spec.rfind(':');
  if (colon != std::string::npos && colon > 0) {
    const fs::path file = spec.substr(0, colon);
    if (fs::exists(file)) return load_ray_table(file).at(spec.substr(colon + 1));
  }
  if (fs::is_regular_file(spec)) {
    const auto rays = load_ray_table(spec);
    if (rays.size() != 1)
      fail(ErrorKind::kInvalidArgument, spec + " has " + std::to_string(rays.size()) +
                                            " rows; use file:label");
    return rays.ray(0);
  }
  for (const char* name : kNamedRayFiles) {
    const fs::path file = fixtures / name;
    if (!fs::exists(file)) continue;
    const auto rays = load_ray_table(file);
    if (const auto k = rays.find(spec)) return rays.ray(*k);
  }
  fail(ErrorKind::kInvalidArgument, "cannot resolve vector '" + spec + "'");
}

std::vector<int> parse_alphabet(const std::string& s) {
  const auto reals = parse_reals(s);
  if (!reals) fail(ErrorKind::kInvalidArgument, "bad alphabet '" + s + "'");
  std::vector<int> sizes;
  for (const double x : *reals) {
    if (x < 1 || x != std::floor(x)) fail(ErrorKind::kInvalidArgument, "bad alphabet '" + s + "'");
    sizes.push_back(static_cast<int>(x));
  }
  return sizes;
}

std::string vec_string(const EntropyVector& h) {
  std::string s;
  for (std::size_t k = 0; k < h.size(); ++k) s += (k ? "," : "") + format_number(h.at(k));
  return s;
}

int exit_code_for(ErrorKind kind) {
  switch (kind) {
    case ErrorKind::kInvalidArgument:
    case ErrorKind::kUnsupported:
      return kExitUsage;
    case ErrorKind::kUndefinedDistance:
      return kExitUndefinedDistance;
    default:
      return kExitFailure;
  }
}

struct SearchArgs {
  std::string target;
  std::string alphabet = "2,2,2,2";
  std::string start = "uniform";
  std::string objective = "dnorm";
  double delta = 1e-6;
  double L = 1e6;
  double M = 1e5;
  double eps = 1.0;
  std::uint64_t seed = 0;
  std::string waypoints;
  std::string hyperplanes;
  double eta = 1e-4;
  std::string out;
  std::string trace;
  std::uint64_t trace_stride = 1;
  bool renormalize = false;
};

std::uint64_t as_count(double v, const char* what) {
  if (!(v >= 1) || v != std::floor(v) || v > 1.8e19)
    fail(ErrorKind::kInvalidArgument, std::string(what) + " must be a positive integer");
  return static_cast<std::uint64_t>(v);
}

void print_outcome(std::ostream& out, const SearchOutcome& o, Objective objective,
                   std::uint64_t seed) {
  out << "objective=" << to_string(objective) << '\n';
  out << "final_objective=" << format_number(o.final_objective) << '\n';
  out << "dnorm=" << (o.final_distance ? format_number(*o.final_distance) : "none") << '\n';
  if (o.final_h.variables() == 4 && o.final_h.full() > 0.0) {
    out << "ingleton_score=" << format_number(ingleton_score(o.final_h)) << '\n';
    out << "violation_index=" << format_number(violation_index(o.final_h)) << '\n';
  }
  out << "accepted_moves=" << o.accepted_moves << '\n';
  out << "proposals=" << o.proposals << '\n';
  out << "termination=" << to_string(o.termination) << '\n';
  out << "seed=" << seed << '\n';
  out << "final_h=" << vec_string(o.final_h) << '\n';
}

int cmd_search(const SearchArgs& a, const fs::path& fixtures, std::ostream& out,
               std::ostream& err) {
  SearchConfig c;
  c.objective = objective_from_string(a.objective);
  if (c.objective == Objective::kCustom)
    fail(ErrorKind::kInvalidArgument, "custom objectives are library-only");
  c.delta = a.delta;
  c.L = as_count(a.L, "L");
  c.M = as_count(a.M, "M");
  c.epsilon = a.eps;
  c.seed = a.seed;
  c.trace_stride = a.trace_stride;
  if (!a.target.empty()) c.target = resolve_vector(a.target, fixtures);
  if (!a.waypoints.empty()) {
    const auto rays = load_ray_table(a.waypoints);
    for (const auto& r : rays.rays()) c.waypoints.push_back({r, a.delta});
    if (c.target) c.waypoints.push_back({*c.target, a.delta});
  }
  if (!a.hyperplanes.empty()) c.guidance = HyperplaneGuidance{load_hyperplanes(a.hyperplanes).hyperplanes, a.eta};
  c.validate();

  JointPmf start = JointPmf::uniform(AlphabetSpec(parse_alphabet(a.alphabet)));
  if (a.start == "centroid") {
    start = centroid_start_pmf(load_ray_table(fixtures / "pyramid_base.csv"), start.spec());
  } else if (a.start != "uniform") {
    const auto loaded = load_sparse_pmf_detailed(a.start, {a.renormalize});
    if (loaded.renormalized)
      err << "note: renormalized " << a.start << " (deficit " << format_number(loaded.deficit) << ")\n";
    start = loaded.pmf;
  }

  BatchJob job{start, c, a.seed};
  const auto results = batch_run_serial({job}, a.seed);
  const auto& r = results.front();
  if (!r.ok()) {
    err << "error: " << r.error << '\n';
    if (!a.out.empty()) write_run_records(a.out, results, {job}, a.seed);
    if (r.error_kind == to_string(ErrorKind::kUndefinedDistance)) return kExitUndefinedDistance;
    if (r.error_kind == to_string(ErrorKind::kInvalidArgument) ||
        r.error_kind == to_string(ErrorKind::kUnsupported))
      return kExitUsage;
    return kExitFailure;
  }
  for (const auto& w : r.outcome->warnings) err << "warning: " << w << '\n';
  print_outcome(out, *r.outcome, c.objective, r.seed);
  if (!a.out.empty()) write_run_records(a.out, results, {job}, a.seed);
  if (!a.trace.empty()) emit_trace_csv(fs::path(a.trace), *r.outcome);
  return kExitOk;
}

int cmd_batch(const std::string& jobs_path, int parallel, std::optional<std::uint64_t> seed,
              const std::string& out_path, const std::string& summary_path, std::ostream& out) {
  const JobFile file = load_jobs(jobs_path);
  const std::uint64_t master = seed ? *seed : file.master_seed.value_or(0);
  const auto results = batch_run(file.jobs, master, parallel);
  std::size_t ok = 0;
  for (const auto& r : results) ok += r.ok();
  if (!out_path.empty()) write_run_records(out_path, results, file.jobs, master);
  if (!summary_path.empty()) {
    auto s = open_output(summary_path);
    write_batch_summary_csv(s, results);
  } else if (out_path.empty()) {
    write_batch_summary_csv(out, results);
  }
  out << "jobs=" << results.size() << '\n' << "ok=" << ok << '\n'
      << "failed=" << results.size() - ok << '\n' << "master_seed=" << master << '\n'
      << "rng=" << kRngName << '\n';
  return kExitOk;
}

EntropyVector vector_input(const std::string& vec, const std::string& pmf, const fs::path& fixtures) {
  if (!vec.empty() && !pmf.empty())
    fail(ErrorKind::kInvalidArgument, "--vector and --pmf are mutually exclusive");
  if (!pmf.empty()) return entropy_vector(load_sparse_pmf(pmf));
  if (vec.empty()) fail(ErrorKind::kInvalidArgument, "need --vector or --pmf");
  return resolve_vector(vec, fixtures);
}

int cmd_score(const EntropyVector& h, std::ostream& out) {
  if (h.is_zero()) fail(ErrorKind::kInvalidArgument, "zero vector has no score");
  out << "h=" << vec_string(h) << '\n';
  if (h.variables() == 4) {
    double min_delta = std::numeric_limits<double>::infinity();
    for (const auto p : all_variable_pairs()) {
      const auto tag = std::to_string(p.first) + std::to_string(p.second);
      const double d = ingleton_delta(h, p);
      min_delta = std::min(min_delta, d);
      out << "delta_" << tag << '=' << format_number(d) << '\n';
      if (h.full() > 0.0) out << "score_" << tag << '=' << format_number(ingleton_score(h, p)) << '\n';
    }
    out << "min_delta=" << format_number(min_delta) << '\n';
    out << "ingleton_satisfied=" << (min_delta >= -1e-9 ? "yes" : "no") << '\n';
    out << "violation_index=" << format_number(violation_index(h)) << '\n';
  }
  const auto report = check_polymatroid(h, 1e-9);
  out << "polymatroid=" << (report ? "yes" : "no") << '\n';
  for (const auto& v : report.violations)
    out << "violated=" << v.inequality << " slack " << format_number(v.slack) << '\n';
  if (report) {
    const auto d = tighten(h);
    out << "modular=" << vec_string(d.modular) << '\n' << "tight=" << vec_string(d.tight) << '\n';
    if (h.variables() == 4 && d.tight.full() > 0.0)
      out << "tight_score=" << format_number(ingleton_score(d.tight)) << '\n';
  }
  return kExitOk;
}

int cmd_decompose(const EntropyVector& h, std::ostream& out) {
  if (h.is_zero()) fail(ErrorKind::kInvalidArgument, "zero vector");
  const auto d = tighten(h);
  out << "h=" << vec_string(h) << '\n'
      << "modular=" << vec_string(d.modular) << '\n'
      << "tight=" << vec_string(d.tight) << '\n';
  if (h.variables() == 4) {
    if (h.full() > 0.0) out << "score=" << format_number(ingleton_score(h)) << '\n';
    if (d.tight.full() > 0.0) out << "tight_score=" << format_number(ingleton_score(d.tight)) << '\n';
  }
  return kExitOk;
}

int cmd_grid(const std::string& vamos, const std::string& base, int level, const std::string& out_path,
             const fs::path& fixtures, std::ostream& out) {
  const EntropyVector v = resolve_vector(vamos.empty() ? "vamos" : vamos, fixtures);
  const RaySet b = load_ray_table(base.empty() ? fixtures / "pyramid_base.csv" : fs::path(base));
  const RaySet grid = generate_grid(v, b, level);
  const std::string comment = "grid level " + std::to_string(level);
  if (out_path.empty()) {
    write_ray_table(out, grid, 'h', comment);
  } else {
    write_ray_table(fs::path(out_path), grid, 'h', comment);
    out << "rays=" << grid.size() << '\n';
  }
  return kExitOk;
}

int cmd_hyperplanes(const std::string& points, const std::string& out_path, std::ostream& out) {
  const RaySet rays = load_ray_table(points);
  const Hyperplane g = hyperplane_through(rays.rays());
  HyperplaneTable t{{"H"}, {g}};
  std::ostringstream body;
  write_hyperplanes(body, t, "hyperplane through the rows of " + points);
  if (out_path.empty()) {
    out << body.str();
  } else {
    auto f = open_output(out_path);
    f << body.str();
    double worst = 0.0;
    for (const auto& r : rays.rays())
      worst = std::max(worst, std::abs(g.value(r)) / r.norm());
    out << "max_residual=" << format_number(worst) << '\n';
  }
  return kExitOk;
}

int cmd_verify(const std::string& dir, const std::vector<std::string>& only, bool no_hashes,
               std::ostream& out) {
  VerifyOptions o;
  if (!dir.empty()) o.dir = dir;
  o.only = only;
  o.check_hashes = !no_hashes;
  const auto report = verify_fixtures(o);
  std::size_t passed = 0;
  for (const auto& i : report.items) {
    passed += i.passed;
    out << (i.passed ? "PASS " : "FAIL ") << i.id << "  observed=" << i.observed
        << "  expected=" << i.expected << '\n';
  }
  out << "passed=" << passed << '\n' << "failed=" << report.items.size() - passed << '\n';
  return report.all_passed() ? kExitOk : kExitFailure;
}

}  // namespace

int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"entropy-vector search and inner-bound tools", "entvec"};
  app.require_subcommand(1);
  std::string fixtures_dir;
  app.add_option("--fixtures-dir", fixtures_dir,
                 "fixture directory for named vectors (default $ENTVEC_FIXTURES or bundled)");

  SearchArgs sa;
  auto* search = app.add_subcommand("search", "run one seeded search");
  search->add_option("--target", sa.target, "name, file:label, or inline 2^n-1 reals");
  search->add_option("--alphabet", sa.alphabet, "alphabet sizes")->capture_default_str();
  search->add_option("--start", sa.start, "uniform, centroid, or a sparse pmf file")->capture_default_str();
  search->add_option("--objective", sa.objective, "dnorm|ingleton|violation")
      ->check(CLI::IsMember({"dnorm", "ingleton", "violation"}))
      ->capture_default_str();
  search->add_option("--delta", sa.delta)->capture_default_str();
  search->add_option("--L", sa.L, "max accepted moves")->capture_default_str();
  search->add_option("--M", sa.M, "max consecutive rejections")->capture_default_str();
  search->add_option("--eps", sa.eps, "lambda range bound")->capture_default_str();
  search->add_option("--seed", sa.seed)->capture_default_str();
  search->add_option("--waypoints", sa.waypoints, "ray table of intermediate targets");
  search->add_option("--hyperplanes", sa.hyperplanes, "hyperplane table for guidance");
  search->add_option("--eta", sa.eta, "hyperplane redraw threshold")->capture_default_str();
  search->add_option("--out", sa.out, "run record (JSON lines)");
  search->add_option("--trace", sa.trace, "trace CSV");
  search->add_option("--trace-stride", sa.trace_stride)->capture_default_str();
  search->add_flag("--renormalize", sa.renormalize, "renormalize a start pmf that sums to 1 +- 1e-6");

  std::string jobs, batch_out, batch_summary;
  int parallel = 0;
  std::optional<std::uint64_t> batch_seed;
  auto* batch = app.add_subcommand("batch", "run a job file");
  batch->add_option("--jobs", jobs, "job file (JSON or JSON lines)")->required();
  batch->add_option("--parallel", parallel, "threads (0 = OpenMP default)")->capture_default_str();
  batch->add_option("--seed", batch_seed, "master seed (overrides the file)");
  batch->add_option("--out", batch_out, "run records (JSON lines)");
  batch->add_option("--summary", batch_summary, "summary CSV");

  std::string score_vec, score_pmf;
  auto* score = app.add_subcommand("score", "Ingleton scores, polymatroid check, tight part");
  score->add_option("--vector", score_vec, "name, file:label, or inline reals");
  score->add_option("--pmf", score_pmf, "sparse pmf file");

  std::string dec_vec, dec_pmf;
  auto* decompose = app.add_subcommand("decompose", "modular / tight split");
  decompose->add_option("--vector", dec_vec, "name, file:label, or inline reals");
  decompose->add_option("--pmf", dec_pmf, "sparse pmf file");

  std::string vamos, base, grid_out;
  int level = 1;
  auto* grid = app.add_subcommand("grid", "grid rays over the pyramid");
  grid->add_option("--vamos", vamos, "apex ray (default: bundled)");
  grid->add_option("--base", base, "ray table of 14 base rays (default: bundled)");
  grid->add_option("--level", level)->check(CLI::Range(1, 5))->capture_default_str();
  grid->add_option("--out", grid_out, "output ray table");

  std::string points, hp_out;
  auto* hyper = app.add_subcommand("hyperplanes", "hyperplane through 2^n-2 points");
  hyper->add_option("--points", points, "ray table")->required();
  hyper->add_option("--out", hp_out, "output table");

  std::string verify_dir;
  std::vector<std::string> only;
  bool no_hashes = false;
  auto* verify = app.add_subcommand("verify", "recompute the bundled reference values");
  verify->add_option("--fixtures", verify_dir, "fixture directory");
  verify->add_option("--only", only, "item ids or group numbers");
  verify->add_flag("--no-hashes", no_hashes, "skip the manifest check");

  std::vector<std::string> rev(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(rev);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitUsage;
  }

  const fs::path fixtures = fixtures_dir.empty() ? default_fixture_dir() : fs::path(fixtures_dir);
  try {
    if (*search) return cmd_search(sa, fixtures, out, err);
    if (*batch) return cmd_batch(jobs, parallel, batch_seed, batch_out, batch_summary, out);
    if (*score) return cmd_score(vector_input(score_vec, score_pmf, fixtures), out);
    if (*decompose) return cmd_decompose(vector_input(dec_vec, dec_pmf, fixtures), out);
    if (*grid) return cmd_grid(vamos, base, level, grid_out, fixtures, out);
    if (*hyper) return cmd_hyperplanes(points, hp_out, out);
    if (*verify) return cmd_verify(verify_dir, only, no_hashes, out);
  } catch (const Error& e) {
    err << "error: " << e.what() << '\n';
    return exit_code_for(e.kind());
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace entvec
