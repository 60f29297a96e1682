#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include <unistd.h>

#include "doctest.h"
#include "entvec/cli.hpp"
#include "entvec/io.hpp"
#include "support.hpp"

using namespace entvec;
namespace fs = std::filesystem;

namespace {

struct Run {
  int code;
  std::string out;
  std::string err;
};

Run cli(std::vector<std::string> args) {
  args.insert(args.begin(), "entvec");
  args.insert(args.begin() + 1, {"--fixtures-dir", ENTVEC_TEST_FIXTURES});
  std::ostringstream out, err;
  const int code = run_cli(args, out, err);
  return {code, out.str(), err.str()};
}

std::map<std::string, std::string> keys(const std::string& text) {
  std::map<std::string, std::string> m;
  std::istringstream in(text);
  std::string line;
  while (std::getline(in, line)) {
    const auto eq = line.find('=');
    if (eq != std::string::npos) m[line.substr(0, eq)] = line.substr(eq + 1);
  }
  return m;
}

fs::path temp_dir() {
  static const fs::path d = [] {
    auto p = fs::temp_directory_path() / ("entvec_test_cli_" + std::to_string(::getpid()));
    fs::create_directories(p);
    return p;
  }();
  return d;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream s;
  s << in.rdbuf();
  return s.str();
}

std::size_t count_lines(const std::string& s) {
  std::size_t n = 0;
  for (char c : s) n += c == '\n';
  return n;
}

}  // namespace

TEST_CASE("search toward FC") {
  const auto r = cli({"search", "--target", "fc", "--alphabet", "2,2,2,2", "--objective", "dnorm",
                      "--delta", "1e-6", "--seed", "7", "--M", "10000"});
  REQUIRE(r.code == kExitOk);
  const auto k = keys(r.out);
  for (const char* key : {"objective", "final_objective", "dnorm", "ingleton_score", "violation_index",
                          "accepted_moves", "proposals", "termination", "seed", "final_h"})
    CHECK(k.count(key) == 1);
  CHECK(k.at("objective") == "dnorm");
  CHECK(k.at("seed") == "7");
  MESSAGE("seed 7 dnorm " << k.at("dnorm"));
  CHECK(std::stod(k.at("dnorm")) < 0.1);
}

TEST_CASE("search from the centroid start writes a replayable record and a trace") {
  const auto rec = temp_dir() / "one.jsonl";
  const auto trace = temp_dir() / "one.csv";
  const auto r = cli({"search", "--target", "fc", "--start", "centroid", "--seed", "3", "--M", "2000",
                      "--out", rec.string(), "--trace", trace.string(), "--trace-stride", "5"});
  REQUIRE(r.code == kExitOk);
  CHECK(slurp(trace).rfind("accepted_move,proposals_so_far,objective,ingleton_score\n", 0) == 0);

  const auto replay = temp_dir() / "replay.jsonl";
  const auto b = cli({"batch", "--jobs", rec.string(), "--seed", "0", "--out", replay.string()});
  REQUIRE(b.code == kExitOk);
  auto first = Json::parse(slurp(rec));
  auto second = Json::parse(slurp(replay));
  first.erase("master_seed");
  second.erase("master_seed");
  CHECK(first == second);
  CHECK(std::to_string(first.at("accepted_moves").get<std::uint64_t>()) ==
        keys(r.out).at("accepted_moves"));
}

TEST_CASE("targetless objectives") {
  const auto r = cli({"search", "--objective", "ingleton", "--alphabet", "2,2,2,2", "--M", "2000"});
  CHECK(r.code == kExitOk);
  CHECK(keys(r.out).at("dnorm") == "none");
  const auto v = cli({"search", "--objective", "violation", "--start", "centroid", "--L", "10"});
  CHECK(v.code == kExitOk);
  CHECK(keys(v.out).at("termination") == "L-exhausted");
}

TEST_CASE("search argument errors") {
  CHECK(cli({"search", "--objective", "dnorm"}).code == kExitUsage);
  CHECK(cli({"search", "--objective", "ingleton", "--target", "fc"}).code == kExitUsage);
  CHECK(cli({"search", "--target", "fc", "--eps", "0"}).code == kExitUsage);
  CHECK(cli({"search", "--target", "fc", "--L", "0"}).code == kExitUsage);
  CHECK(cli({"search", "--target", "fc", "--objective", "euclid"}).code == kExitUsage);
  CHECK(cli({"search", "--target", "no-such-ray"}).code == kExitUsage);
  CHECK(cli({"search", "--target", "1,2,3"}).code == kExitUsage);
  CHECK(cli({"bogus"}).code == kExitUsage);
  CHECK(cli({}).code == kExitUsage);
}

TEST_CASE("undefined distance exits 3") {
  const auto pmf = temp_dir() / "point.pmf";
  {
    std::ofstream f(pmf);
    f << "n 4\nalphabet 2 2 2 2\n0 0 0 0 1\n";
  }
  const auto r = cli({"search", "--target", "fc", "--start", pmf.string()});
  CHECK(r.code == kExitUndefinedDistance);
  CHECK(r.err.find("error") != std::string::npos);
}

TEST_CASE("I/O errors exit 1") {
  CHECK(cli({"search", "--target", "fc", "--start", "/nonexistent.pmf"}).code == kExitFailure);
  CHECK(cli({"batch", "--jobs", "/nonexistent.jsonl"}).code == kExitFailure);
  const auto bad = temp_dir() / "bad.pmf";
  {
    std::ofstream f(bad);
    f << "n 4\nalphabet 2 2 2 2\n0 0 0 0 0.5\n";
  }
  const auto r = cli({"search", "--target", "fc", "--start", bad.string()});
  CHECK(r.code == kExitFailure);
  CHECK(r.err.find(":3") != std::string::npos);
}

TEST_CASE("score") {
  const auto fc = cli({"score", "--vector", "fc"});
  REQUIRE(fc.code == kExitOk);
  const auto k = keys(fc.out);
  CHECK(std::abs(std::stod(k.at("score_34")) - (-0.0894)) <= 1e-4);
  CHECK(k.at("ingleton_satisfied") == "no");
  CHECK(k.at("polymatroid") == "yes");

  const auto rho1 = cli({"score", "--vector", "rho1"});
  REQUIRE(rho1.code == kExitOk);
  const auto r = keys(rho1.out);
  for (const char* pair : {"12", "13", "14", "23", "24", "34"}) CHECK(r.count(std::string("delta_") + pair));
  CHECK(std::stod(r.at("min_delta")) >= 0.0);
  CHECK(r.at("ingleton_satisfied") == "yes");

  std::string zero = "0";
  for (int k = 0; k < 14; ++k) zero += ",0";
  CHECK(cli({"score", "--vector", zero}).code == kExitUsage);
  const auto b1 = cli({"score", "--pmf", testing::fixture("b1_ingleton_min.pmf").string()});
  CHECK(std::abs(std::stod(keys(b1.out).at("score_34")) - (-0.089373)) <= 1e-6);
  CHECK(cli({"score"}).code == kExitUsage);
}

TEST_CASE("decompose") {
  const auto r = cli({"decompose", "--pmf", testing::fixture("c_alphabet5.pmf").string()});
  REQUIRE(r.code == kExitOk);
  CHECK(std::abs(std::stod(keys(r.out).at("tight_score")) - (-0.091287)) <= 1e-5);
  const auto u = cli({"decompose", "--vector", "1,1,2,1,2,2,3,1,2,2,3,2,3,3,4"});
  REQUIRE(u.code == kExitOk);
  CHECK(keys(u.out).at("tight") == "0,0,0,0,0,0,0,0,0,0,0,0,0,0,0");
}

TEST_CASE("grid") {
  const auto r = cli({"grid", "--level", "5"});
  REQUIRE(r.code == kExitOk);
  std::istringstream in(r.out);
  std::string line;
  std::size_t rows = 0;
  bool header = false;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    if (!header) {
      header = true;
      continue;
    }
    ++rows;
  }
  CHECK(rows == 1001);
  const auto out = temp_dir() / "g3.csv";
  const auto f = cli({"grid", "--level", "3", "--out", out.string()});
  CHECK(keys(f.out).at("rays") == "91");
  CHECK(load_ray_table(out).size() == 91);
  CHECK(cli({"grid", "--level", "6"}).code == kExitUsage);
}

TEST_CASE("hyperplanes") {
  const auto base = load_ray_table(testing::fixture("pyramid_base.csv"));
  RaySet pts(4);
  for (std::size_t k = 0; k < 13; ++k) pts.add(base.label(k), base.ray(k));
  pts.add("fc", load_ray_table(testing::fixture("named_rays.csv")).at("fc"));
  const auto in = temp_dir() / "pts.csv";
  write_ray_table(in, pts);
  const auto out = temp_dir() / "hp.csv";
  const auto r = cli({"hyperplanes", "--points", in.string(), "--out", out.string()});
  REQUIRE(r.code == kExitOk);
  CHECK(std::stod(keys(r.out).at("max_residual")) < 1e-9);
  CHECK(load_hyperplanes(out).hyperplanes.size() == 1);

  RaySet few(4);
  few.add("a", base.ray(0));
  few.add("b", base.ray(0) * 2.0);
  const auto degenerate = temp_dir() / "few.csv";
  write_ray_table(degenerate, few);
  CHECK(cli({"hyperplanes", "--points", degenerate.string()}).code == kExitUsage);
  RaySet dup(4);
  for (std::size_t k = 0; k < 14; ++k) dup.add("d" + std::to_string(k), base.ray(k % 7));
  const auto repeated = temp_dir() / "dup.csv";
  write_ray_table(repeated, dup);
  CHECK(cli({"hyperplanes", "--points", repeated.string()}).code != kExitOk);
}

TEST_CASE("batch twice gives identical files") {
  const auto jobs = temp_dir() / "jobs.json";
  {
    std::ofstream f(jobs);
    f << R"({"jobs": [)";
    for (int k = 0; k < 8; ++k)
      f << (k ? "," : "") << R"({"start": "uniform", "config": {"target": [)"
        << "0.9183,0.9183,1.4855,0.9183,1.4855,1.4855,1.5850,0.9183,1.4855,1.4855,1.5850,1.5850,1.5850,1.5850,1.5850"
        << R"(], "M": 300}})";
    f << R"(, {"start": "uniform", "config": {"objective": "nope"}}]})";
  }
  const auto a = temp_dir() / "a.jsonl", b = temp_dir() / "b.jsonl";
  const auto sa = temp_dir() / "a.csv", sb = temp_dir() / "b.csv";
  auto r1 = cli({"batch", "--jobs", jobs.string(), "--parallel", "8", "--seed", "1", "--out", a.string(),
                 "--summary", sa.string()});
  CHECK(r1.code == kExitFailure);
  // The malformed job makes the whole file invalid; drop it and rerun.
  std::string text = slurp(jobs);
  text = text.substr(0, text.rfind(", {")) + "]}";
  {
    std::ofstream f(jobs);
    f << text;
  }
  r1 = cli({"batch", "--jobs", jobs.string(), "--parallel", "8", "--seed", "1", "--out", a.string(),
            "--summary", sa.string()});
  const auto r2 = cli({"batch", "--jobs", jobs.string(), "--parallel", "8", "--seed", "1", "--out",
                       b.string(), "--summary", sb.string()});
  REQUIRE(r1.code == kExitOk);
  REQUIRE(r2.code == kExitOk);
  CHECK(slurp(a) == slurp(b));
  CHECK(slurp(sa) == slurp(sb));
  CHECK(count_lines(slurp(a)) == 8);
  CHECK(count_lines(slurp(sa)) == 9);
  CHECK(keys(r1.out).at("jobs") == "8");
}

TEST_CASE("verify selection") {
  const auto r = cli({"verify", "--fixtures", ENTVEC_TEST_FIXTURES, "--only", "2"});
  CHECK(r.code == kExitOk);
  CHECK(r.out.find("2/rho-polymatroid") != std::string::npos);
  CHECK(r.out.find("1/a1") == std::string::npos);
  CHECK(r.out.find("4/grid-1") == std::string::npos);
}
