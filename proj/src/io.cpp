#include "entvec/io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <limits>
#include <sstream>

#include "entvec/error.hpp"
#include "entvec/rng.hpp"

namespace entvec {

namespace {

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

bool skippable(const std::string& line) {
  const std::string t = trim(line);
  return t.empty() || t[0] == '#';
}

std::vector<std::string> split_ws(const std::string& line) {
  std::istringstream is(line);
  std::vector<std::string> out;
  std::string tok;
  while (is >> tok) out.push_back(tok);
  return out;
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::string cell;
  std::istringstream is(line);
  while (std::getline(is, cell, ',')) out.push_back(trim(cell));
  if (!line.empty() && line.back() == ',') out.emplace_back();
  return out;
}

std::optional<double> parse_double(const std::string& s) {
  double v = 0.0;
  const char* first = s.data();
  const char* last = s.data() + s.size();
  if (first != last && *first == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, v);
  if (ec != std::errc() || ptr != last || !std::isfinite(v)) return std::nullopt;
  return v;
}

std::optional<long long> parse_int(const std::string& s) {
  long long v = 0;
  const auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (ec != std::errc() || ptr != s.data() + s.size()) return std::nullopt;
  return v;
}

int variables_for_columns(std::size_t columns) {
  for (int n = 1; n <= kMaxVariables; ++n)
    if (subset_count(n) == columns) return n;
  return 0;
}

Json vector_json(const EntropyVector& h) {
  Json a = Json::array();
  for (const double v : h.values()) a.push_back(v);
  return a;
}

Json rounded_vector_json(const EntropyVector& h) {
  Json a = Json::array();
  for (const double v : h.values()) a.push_back(round15(v));
  return a;
}

EntropyVector vector_from_json(const Json& j, const char* what) {
  if (!j.is_array()) fail(ErrorKind::kInvalidArgument, std::string(what) + " must be an array");
  const int n = variables_for_columns(j.size());
  if (n == 0)
    fail(ErrorKind::kInvalidArgument,
         std::string(what) + " has " + std::to_string(j.size()) + " entries, not 2^n - 1");
  std::vector<double> v;
  for (const auto& x : j) {
    if (!x.is_number()) fail(ErrorKind::kInvalidArgument, std::string(what) + " must be numeric");
    v.push_back(x.get<double>());
  }
  return EntropyVector(n, std::move(v));
}

std::uint64_t count_from_json(const Json& j, const char* what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<long long>() >= 0) return j.get<std::uint64_t>();
  if (j.is_number_float()) {
    const double d = j.get<double>();
    if (d >= 0 && d == std::floor(d) && d < 1.8e19) return static_cast<std::uint64_t>(d);
  }
  fail(ErrorKind::kInvalidArgument, std::string(what) + " must be a nonnegative integer");
}

double real_from_json(const Json& j, const char* what) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    const auto s = j.get<std::string>();
    if (s == "inf") return std::numeric_limits<double>::infinity();
  }
  fail(ErrorKind::kInvalidArgument, std::string(what) + " must be a number");
}

Json real_json(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  return v;
}

Json optional_rounded(const std::optional<double>& v) {
  if (!v) return nullptr;
  return round15(*v);
}

std::string slurp(std::istream& in) {
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

}  // namespace

std::string format_number(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.15g", v);
  return buf;
}

double round15(double v) {
  if (!std::isfinite(v)) return v;
  return std::strtod(format_number(v).c_str(), nullptr);
}

std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorKind::kIo, "cannot open " + path.string() + " for writing");
  return out;
}

std::ifstream open_input(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  return in;
}

LoadedPmf parse_sparse_pmf(std::istream& in, const std::string& source, PmfLoadOptions options) {
  std::optional<int> n;
  std::optional<AlphabetSpec> spec;
  std::vector<double> mass;
  std::vector<char> seen;
  std::size_t atoms = 0, lineno = 0, last_atom_line = 0;
  std::string line;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto tok = split_ws(line);
    auto error = [&](const std::string& msg) { throw ParseError(source, lineno, msg); };
    if (tok[0] == "n") {
      if (n) error("duplicate 'n' line");
      if (tok.size() != 2) error("expected 'n <count>'");
      const auto v = parse_int(tok[1]);
      if (!v || *v < 1 || *v > kMaxVariables)
        error("variable count must be an integer in 1.." + std::to_string(kMaxVariables));
      n = static_cast<int>(*v);
      continue;
    }
    if (tok[0] == "alphabet") {
      if (!n) error("'alphabet' before 'n'");
      if (spec) error("duplicate 'alphabet' line");
      if (tok.size() != static_cast<std::size_t>(*n) + 1)
        error("expected " + std::to_string(*n) + " alphabet sizes");
      std::vector<int> sizes;
      for (std::size_t k = 1; k < tok.size(); ++k) {
        const auto v = parse_int(tok[k]);
        if (!v || *v < 1 || *v > 1'000'000) error("bad alphabet size '" + tok[k] + "'");
        sizes.push_back(static_cast<int>(*v));
      }
      try {
        spec.emplace(std::move(sizes));
      } catch (const Error& e) {
        error(e.what());
      }
      mass.assign(spec->outcomes(), 0.0);
      seen.assign(spec->outcomes(), 0);
      continue;
    }
    if (!spec) error("atom before the 'n' and 'alphabet' header");
    if (tok.size() != static_cast<std::size_t>(*n) + 1)
      error("expected " + std::to_string(*n) + " symbols and a probability");
    std::vector<int> tuple;
    for (int k = 0; k < *n; ++k) {
      const auto v = parse_int(tok[static_cast<std::size_t>(k)]);
      if (!v || *v < 0 || *v >= spec->size(k + 1))
        error("symbol '" + tok[static_cast<std::size_t>(k)] + "' out of range for variable " +
              std::to_string(k + 1));
      tuple.push_back(static_cast<int>(*v));
    }
    const auto p = parse_double(tok.back());
    if (!p) error("bad probability '" + tok.back() + "'");
    if (*p < 0.0) error("negative probability");
    if (*p > 1.0) error("probability above 1");
    const std::size_t idx = spec->encode(tuple);
    if (seen[idx]) error("duplicate atom");
    seen[idx] = 1;
    mass[idx] = *p;
    ++atoms;
    last_atom_line = lineno;
  }
  if (!spec) throw ParseError(source, 0, "missing 'n' / 'alphabet' header");
  if (atoms == 0) throw ParseError(source, 0, "no atoms");

  double sum = 0.0;
  for (const double m : mass) sum += m;
  const double deficit = 1.0 - sum;
  if (!(std::abs(deficit) <= kLoadSumTolerance))
    throw ParseError(source, last_atom_line,
                     "probabilities sum to " + format_number(sum) + ", off by more than 1e-6");
  LoadedPmf out{JointPmf::uniform(*spec), deficit, false, atoms};
  if (options.renormalize && deficit != 0.0) {
    for (double& m : mass) m /= sum;
    out.pmf = JointPmf(*spec, std::move(mass));
    out.renormalized = true;
  } else {
    out.pmf = JointPmf(*spec, std::move(mass), std::abs(deficit) + kMassTolerance);
  }
  return out;
}

LoadedPmf load_sparse_pmf_detailed(const std::filesystem::path& path, PmfLoadOptions options) {
  auto in = open_input(path);
  return parse_sparse_pmf(in, path.string(), options);
}

JointPmf load_sparse_pmf(const std::filesystem::path& path, PmfLoadOptions options) {
  return load_sparse_pmf_detailed(path, options).pmf;
}

void write_sparse_pmf(std::ostream& out, const JointPmf& p, const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  const auto& spec = p.spec();
  out << "n " << spec.variables() << '\n' << "alphabet";
  for (const int s : spec.sizes()) out << ' ' << s;
  out << '\n';
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    for (const int d : spec.decode(x)) out << d << ' ';
    out << format_number(p[x]) << '\n';
  }
}

void write_sparse_pmf(const std::filesystem::path& path, const JointPmf& p,
                      const std::string& comment) {
  auto out = open_output(path);
  write_sparse_pmf(out, p, comment);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

RaySet parse_ray_table(std::istream& in, const std::string& source) {
  std::string line;
  std::size_t lineno = 0;
  std::vector<std::string> header;
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    header = split_csv(trim(line));
    break;
  }
  if (header.empty()) throw ParseError(source, 0, "missing header");
  const std::size_t header_line = lineno;
  if (header[0] != "label") throw ParseError(source, header_line, "first column must be 'label'");
  const int n = variables_for_columns(header.size() - 1);
  if (n == 0)
    throw ParseError(source, header_line,
                     std::to_string(header.size() - 1) + " value columns is not 2^n - 1");
  const char prefix = header[1].empty() ? 'h' : header[1][0];
  if (prefix != 'h' && prefix != 'g')
    throw ParseError(source, header_line, "column names must start with h or g");
  const auto expected = canonical_columns(n, prefix);
  for (std::size_t k = 0; k < expected.size(); ++k)
    if (header[k + 1] != expected[k])
      throw ParseError(source, header_line,
                       "column " + std::to_string(k + 2) + " is '" + header[k + 1] +
                           "', expected '" + expected[k] + "' (canonical order)");

  RaySet rays(n);
  while (std::getline(in, line)) {
    ++lineno;
    if (skippable(line)) continue;
    const auto cells = split_csv(trim(line));
    if (cells.size() != header.size())
      throw ParseError(source, lineno,
                       "expected " + std::to_string(header.size()) + " cells, got " +
                           std::to_string(cells.size()));
    if (cells[0].empty()) throw ParseError(source, lineno, "empty label");
    std::vector<double> v;
    for (std::size_t k = 1; k < cells.size(); ++k) {
      const auto x = parse_double(cells[k]);
      if (!x) throw ParseError(source, lineno, "non-numeric cell '" + cells[k] + "'");
      v.push_back(*x);
    }
    try {
      rays.add(cells[0], EntropyVector(n, std::move(v)));
    } catch (const Error& e) {
      throw ParseError(source, lineno, e.what());
    }
  }
  return rays;
}

RaySet load_ray_table(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_ray_table(in, path.string());
}

void write_ray_table(std::ostream& out, const RaySet& rays, char prefix,
                     const std::string& comment) {
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "label";
  for (const auto& c : canonical_columns(rays.variables(), prefix)) out << ',' << c;
  out << '\n';
  for (std::size_t k = 0; k < rays.size(); ++k) {
    out << rays.label(k);
    for (const double v : rays.ray(k).values()) out << ',' << format_number(v);
    out << '\n';
  }
}

void write_ray_table(const std::filesystem::path& path, const RaySet& rays, char prefix,
                     const std::string& comment) {
  auto out = open_output(path);
  write_ray_table(out, rays, prefix, comment);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

HyperplaneTable load_hyperplanes(const std::filesystem::path& path) {
  const RaySet rays = load_ray_table(path);
  HyperplaneTable t;
  for (std::size_t k = 0; k < rays.size(); ++k) {
    const auto v = rays.ray(k).values();
    t.labels.push_back(rays.label(k));
    t.hyperplanes.emplace_back(rays.variables(), std::vector<double>(v.begin(), v.end()),
                               HyperplaneScaling::kAsGiven);
  }
  return t;
}

void write_hyperplanes(std::ostream& out, const HyperplaneTable& table,
                       const std::string& comment) {
  if (table.hyperplanes.empty()) fail(ErrorKind::kInvalidArgument, "no hyperplanes to write");
  if (!comment.empty()) out << "# " << comment << '\n';
  out << "label";
  for (const auto& c : canonical_columns(table.hyperplanes.front().variables(), 'g'))
    out << ',' << c;
  out << '\n';
  for (std::size_t k = 0; k < table.hyperplanes.size(); ++k) {
    out << table.labels.at(k);
    for (const double v : table.hyperplanes[k].coefficients()) out << ',' << format_number(v);
    out << '\n';
  }
}

Json pmf_to_json(const JointPmf& p) {
  Json atoms = Json::array();
  for (std::size_t x = 0; x < p.size(); ++x) {
    if (p[x] == 0.0) continue;
    Json a = Json::array();
    for (const int d : p.spec().decode(x)) a.push_back(d);
    a.push_back(p[x]);
    atoms.push_back(std::move(a));
  }
  Json sizes = Json::array();
  for (const int s : p.spec().sizes()) sizes.push_back(s);
  return {{"alphabet", std::move(sizes)}, {"atoms", std::move(atoms)}};
}

JointPmf pmf_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("alphabet") || !j.contains("atoms"))
    fail(ErrorKind::kInvalidArgument, "pmf needs 'alphabet' and 'atoms'");
  const AlphabetSpec spec(j.at("alphabet").get<std::vector<int>>());
  std::vector<double> mass(spec.outcomes(), 0.0);
  const auto n = static_cast<std::size_t>(spec.variables());
  for (const auto& a : j.at("atoms")) {
    if (!a.is_array() || a.size() != n + 1)
      fail(ErrorKind::kInvalidArgument, "each atom is [x1, ..., xn, p]");
    std::vector<int> tuple;
    for (std::size_t k = 0; k < n; ++k) tuple.push_back(a[k].get<int>());
    mass[spec.encode(tuple)] = a[n].get<double>();
  }
  double sum = 0.0;
  for (const double m : mass) sum += m;
  if (!(std::abs(sum - 1.0) <= kLoadSumTolerance))
    fail(ErrorKind::kInvalidDistribution, "pmf sums to " + format_number(sum));
  return JointPmf(spec, std::move(mass), std::abs(sum - 1.0) + kMassTolerance);
}

Json config_to_json(const SearchConfig& c) {
  if (c.objective == Objective::kCustom)
    fail(ErrorKind::kUnsupported, "custom objectives cannot be serialized");
  Json j = {{"objective", to_string(c.objective)},
            {"delta", c.delta},
            {"L", c.L},
            {"M", c.M},
            {"epsilon", c.epsilon},
            {"trace_stride", c.trace_stride},
            {"pair", {c.pair.first, c.pair.second}}};
  if (c.target) j["target"] = vector_json(*c.target);
  if (!c.waypoints.empty()) {
    Json w = Json::array();
    for (const auto& p : c.waypoints) w.push_back({{"target", vector_json(p.target)}, {"delta", p.delta}});
    j["waypoints"] = std::move(w);
  }
  if (c.guidance) {
    Json hs = Json::array();
    for (const auto& g : c.guidance->hyperplanes) {
      Json row = Json::array();
      for (const double v : g.coefficients()) row.push_back(v);
      hs.push_back(std::move(row));
    }
    j["guidance"] = {{"eta", real_json(c.guidance->eta)}, {"hyperplanes", std::move(hs)}};
  }
  if (c.improvement_tolerance) j["improvement_tolerance"] = *c.improvement_tolerance;
  return j;
}

SearchConfig config_from_json(const Json& j) {
  if (!j.is_object()) fail(ErrorKind::kInvalidArgument, "config must be an object");
  SearchConfig c;
  for (const auto& [key, v] : j.items()) {
    if (key == "objective") {
      c.objective = objective_from_string(v.get<std::string>());
      if (c.objective == Objective::kCustom)
        fail(ErrorKind::kUnsupported, "custom objectives cannot be loaded");
    } else if (key == "delta") {
      c.delta = real_from_json(v, "delta");
    } else if (key == "L") {
      c.L = count_from_json(v, "L");
    } else if (key == "M") {
      c.M = count_from_json(v, "M");
    } else if (key == "epsilon") {
      c.epsilon = real_from_json(v, "epsilon");
    } else if (key == "trace_stride") {
      c.trace_stride = count_from_json(v, "trace_stride");
    } else if (key == "pair") {
      const auto p = v.get<std::vector<int>>();
      if (p.size() != 2) fail(ErrorKind::kInvalidArgument, "pair must have two entries");
      c.pair = {p[0], p[1]};
    } else if (key == "target") {
      c.target = vector_from_json(v, "target");
    } else if (key == "waypoints") {
      for (const auto& w : v)
        c.waypoints.push_back({vector_from_json(w.at("target"), "waypoint target"),
                               w.contains("delta") ? real_from_json(w.at("delta"), "delta")
                                                   : c.delta});
    } else if (key == "guidance") {
      HyperplaneGuidance g;
      if (v.contains("eta")) g.eta = real_from_json(v.at("eta"), "eta");
      for (const auto& row : v.at("hyperplanes")) {
        const auto h = vector_from_json(row, "hyperplane");
        const auto vals = h.values();
        g.hyperplanes.emplace_back(h.variables(), std::vector<double>(vals.begin(), vals.end()),
                                   HyperplaneScaling::kAsGiven);
      }
      c.guidance = std::move(g);
    } else if (key == "improvement_tolerance") {
      c.improvement_tolerance = real_from_json(v, "improvement_tolerance");
    } else if (key == "seed") {
      c.seed = count_from_json(v, "seed");
    } else {
      fail(ErrorKind::kInvalidArgument, "unknown config key '" + key + "'");
    }
  }
  return c;
}

Json run_record(const BatchResult& r, const BatchJob& job, std::uint64_t master_seed) {
  Json j = {{"rng", kRngName},
            {"master_seed", master_seed},
            {"job", r.job},
            {"seed", r.seed},
            {"config", config_to_json(job.config)},
            {"start", pmf_to_json(job.start)}};
  if (!r.ok()) {
    j["error"] = r.error;
    j["error_kind"] = r.error_kind;
    return j;
  }
  const SearchOutcome& o = *r.outcome;
  std::optional<double> ingleton;
  if (o.final_h.variables() == 4 && o.final_h.full() > 0.0)
    ingleton = ingleton_score(o.final_h, job.config.pair);
  Json pmf = pmf_to_json(o.final_pmf);
  for (auto& a : pmf["atoms"]) a.back() = round15(a.back().get<double>());
  j["termination"] = to_string(o.termination);
  j["accepted_moves"] = o.accepted_moves;
  j["proposals"] = o.proposals;
  j["final_objective"] = round15(o.final_objective);
  j["final_distance"] = optional_rounded(o.final_distance);
  j["final_ingleton"] = optional_rounded(ingleton);
  j["final_h"] = rounded_vector_json(o.final_h);
  j["final_pmf"] = std::move(pmf);
  j["perturbation"] = {{"count", o.perturbation.count},
                       {"min", round15(o.perturbation.min)},
                       {"max", round15(o.perturbation.max)},
                       {"mean", round15(o.perturbation.mean)}};
  j["warnings"] = o.warnings;
  return j;
}

BatchJob job_from_json(const Json& j) {
  if (!j.is_object() || !j.contains("start") || !j.contains("config"))
    fail(ErrorKind::kInvalidArgument, "a job needs 'start' and 'config'");
  const Json& s = j.at("start");
  JointPmf start = s.is_string() && s.get<std::string>() == "uniform"
                       ? JointPmf::uniform(j.contains("alphabet")
                                               ? AlphabetSpec(j.at("alphabet").get<std::vector<int>>())
                                               : AlphabetSpec::uniform(4, 2))
                       : pmf_from_json(s);
  BatchJob job{std::move(start), config_from_json(j.at("config")), std::nullopt};
  if (j.contains("seed")) job.seed = count_from_json(j.at("seed"), "seed");
  return job;
}

JobFile parse_jobs(std::istream& in, const std::string& source) {
  const std::string text = slurp(in);
  JobFile file;
  auto wrap = [&](std::size_t line, auto&& fn) {
    try {
      fn();
    } catch (const ParseError&) {
      throw;
    } catch (const std::exception& e) {
      throw ParseError(source, line, e.what());
    }
  };
  Json doc = Json::parse(text, nullptr, false);
  if (!doc.is_discarded()) {
    wrap(0, [&] {
      const Json* list = &doc;
      if (doc.is_object() && doc.contains("jobs")) {
        if (doc.contains("master_seed"))
          file.master_seed = count_from_json(doc.at("master_seed"), "master_seed");
        list = &doc.at("jobs");
      }
      if (list->is_array()) {
        for (const auto& j : *list) file.jobs.push_back(job_from_json(j));
      } else {
        file.jobs.push_back(job_from_json(*list));
      }
    });
    return file;
  }
  std::istringstream lines(text);
  std::string line;
  std::size_t lineno = 0;
  while (std::getline(lines, line)) {
    ++lineno;
    if (skippable(line)) continue;
    Json j = Json::parse(line, nullptr, false);
    if (j.is_discarded()) throw ParseError(source, lineno, "invalid JSON");
    wrap(lineno, [&] { file.jobs.push_back(job_from_json(j)); });
  }
  return file;
}

JobFile load_jobs(const std::filesystem::path& path) {
  auto in = open_input(path);
  return parse_jobs(in, path.string());
}

void write_run_records(std::ostream& out, const std::vector<BatchResult>& results,
                       const std::vector<BatchJob>& jobs, std::uint64_t master_seed) {
  for (const auto& r : results) {
    if (r.job >= jobs.size()) fail(ErrorKind::kInvalidArgument, "result refers to a missing job");
    out << run_record(r, jobs[r.job], master_seed).dump() << '\n';
  }
}

void write_run_records(const std::filesystem::path& path, const std::vector<BatchResult>& results,
                       const std::vector<BatchJob>& jobs, std::uint64_t master_seed) {
  auto out = open_output(path);
  write_run_records(out, results, jobs, master_seed);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void emit_trace_csv(std::ostream& out, const SearchOutcome& outcome) {
  out << "accepted_move,proposals_so_far,objective,ingleton_score\n";
  for (const auto& e : outcome.trace) {
    out << e.accepted_move << ',' << e.proposals << ',' << format_number(e.objective) << ',';
    if (e.ingleton) out << format_number(*e.ingleton);
    out << '\n';
  }
}

void emit_trace_csv(const std::filesystem::path& path, const SearchOutcome& outcome) {
  auto out = open_output(path);
  emit_trace_csv(out, outcome);
  if (!out) fail(ErrorKind::kIo, "write failed: " + path.string());
}

void write_batch_summary_csv(std::ostream& out, const std::vector<BatchResult>& results) {
  out << "job,seed,termination,accepted_moves,proposals,final_objective,final_distance,"
         "ingleton_score,error\n";
  for (const auto& r : results) {
    out << r.job << ',' << r.seed << ',';
    if (!r.ok()) {
      std::string msg = r.error;
      for (char& ch : msg)
        if (ch == ',' || ch == '\n') ch = ' ';
      out << "error,,,,,," << msg << '\n';
      continue;
    }
    const auto& o = *r.outcome;
    out << to_string(o.termination) << ',' << o.accepted_moves << ',' << o.proposals << ','
        << format_number(o.final_objective) << ',';
    if (o.final_distance) out << format_number(*o.final_distance);
    out << ',';
    if (o.final_h.variables() == 4 && o.final_h.full() > 0.0)
      out << format_number(ingleton_score(o.final_h));
    out << ",\n";
  }
}

}  // namespace entvec
