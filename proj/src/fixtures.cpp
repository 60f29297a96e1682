#include "entvec/fixtures.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <iomanip>
#include <sstream>

#include <openssl/evp.h>

#include "entvec/error.hpp"
#include "entvec/geometry.hpp"
#include "entvec/inner_bounds.hpp"
#include "entvec/io.hpp"

#ifndef ENTVEC_DEFAULT_FIXTURES
#define ENTVEC_DEFAULT_FIXTURES "data/fixtures"
#endif

namespace entvec {

namespace {

namespace fs = std::filesystem;

struct Check {
  bool passed;
  std::string observed;
  std::string expected;
};

struct ItemDef {
  std::string id;
  std::string description;
  // Wall-clock limit in seconds; zero means none.
  double time_limit;
  std::function<Check(const fs::path&)> run;
};

std::string num(double v, int digits = 9) {
  std::ostringstream os;
  os << std::setprecision(digits) << v;
  return os.str();
}

Check within(double observed, double expected, double tol) {
  return {std::abs(observed - expected) <= tol, num(observed),
          num(expected) + " +- " + num(tol, 3)};
}

Check all_of(std::initializer_list<Check> checks) {
  Check out{true, "", ""};
  for (const auto& c : checks) {
    out.passed = out.passed && c.passed;
    out.observed += (out.observed.empty() ? "" : "; ") + c.observed;
    out.expected += (out.expected.empty() ? "" : "; ") + c.expected;
  }
  return out;
}

EntropyVector load_h(const fs::path& file) { return entropy_vector(load_sparse_pmf(file)); }

Check max_coordinate_gap(const EntropyVector& h, const EntropyVector& printed, double tol) {
  double gap = 0.0;
  for (std::size_t k = 0; k < h.size(); ++k) gap = std::max(gap, std::abs(h.at(k) - printed.at(k)));
  return {gap <= tol, "max |h - printed| = " + num(gap, 3), "<= " + num(tol, 3)};
}

bool in_gray(int row) { return row == 26 || (row >= 28 && row <= 35); }

const std::vector<double> kNonconvergingScores = {0.0017, 0.6347, 0.0949, 0.7697, 0.8334,
                                                  0.4650, 0.2858, 0.5237, 0.6363, 0.0164,
                                                  0.3944, 0.9966, 0.1035, 0.1014};

// Sum of the rays named in a grid label, in label order.
EntropyVector reconstruct(const std::string& label, const EntropyVector& v, const RaySet& base) {
  const auto colon = label.find(':');
  std::istringstream parts(label.substr(colon + 1));
  std::string term;
  std::optional<EntropyVector> sum;
  while (std::getline(parts, term, '+')) {
    const EntropyVector& r = term == "v" ? v : base.ray(std::stoul(term.substr(1)) - 1);
    sum = sum ? *sum + r : r;
  }
  return *sum;
}

std::vector<ItemDef> item_defs() {
  std::vector<ItemDef> items;

  items.push_back({"1/b1-min-score", "Ingleton-score-min distribution: score(3,4)", 1.0,
                   [](const fs::path& d) {
                     return within(ingleton_score(load_h(d / "b1_ingleton_min.pmf")), -0.089373,
                                   1e-6);
                   }});
  items.push_back({"1/b1-max-index", "violation-index-max distribution: iota(3,4)", 0.0,
                   [](const fs::path& d) {
                     return within(violation_index(load_h(d / "b1_violation_max.pmf")), 0.028131,
                                   1e-6);
                   }});
  items.push_back({"1/a3", "FC-nearest distribution: score and distance to FC", 0.0,
                   [](const fs::path& d) {
                     const auto h = load_h(d / "a3_fc_nearest.pmf");
                     const auto fc = load_ray_table(d / "named_rays.csv").at("fc");
                     const double dn = normalized_distance(h, fc);
                     return all_of({within(ingleton_score(h), -0.089355, 1e-6),
                                    {dn <= 1e-4, "dnorm = " + num(dn, 5), "dnorm <= 1e-4"}});
                   }});
  items.push_back({"1/a1", "Vamos-nearest distribution: score and printed vector", 0.0,
                   [](const fs::path& d) {
                     const auto h = load_h(d / "a1_vamos_nearest.pmf");
                     const auto printed = load_ray_table(d / "named_rays.csv").at("a1_printed");
                     return all_of({within(ingleton_score(h), -0.078348, 1e-6),
                                    max_coordinate_gap(h, printed, 5e-5)});
                   }});
  items.push_back({"1/a2", "hammer-nearest distribution: score and printed vector", 0.0,
                   [](const fs::path& d) {
                     const auto h = load_h(d / "a2_hammer_nearest.pmf");
                     const auto printed = load_ray_table(d / "named_rays.csv").at("a2_printed");
                     return all_of({within(ingleton_score(h), -0.015631, 1e-6),
                                    max_coordinate_gap(h, printed, 5e-5)});
                   }});
  items.push_back({"1/c-score", "5^4 distribution: score(3,4) of h", 5.0, [](const fs::path& d) {
                     return within(ingleton_score(load_h(d / "c_alphabet5.pmf")), -0.0650661, 1e-5);
                   }});
  items.push_back({"1/c-tight-score", "5^4 distribution: score(3,4) of the tight part", 5.0,
                   [](const fs::path& d) {
                     const auto t = tighten(load_h(d / "c_alphabet5.pmf")).tight;
                     return within(ingleton_score(t), -0.091287, 1e-5);
                   }});

  items.push_back({"2/rho-polymatroid", "Ingleton-cone rays: polymatroid, all six Delta >= -1e-9",
                   0.0, [](const fs::path& d) {
                     const auto rays = load_ray_table(d / "ingleton_cone.csv");
                     int bad = 0;
                     double worst = 0.0;
                     for (int i = 1; i <= 35; ++i) {
                       const auto& rho = rays.at("rho" + std::to_string(i));
                       bool ok = is_polymatroid(rho, 1e-9);
                       for (const auto p : all_variable_pairs()) {
                         const double delta = ingleton_delta(rho, p);
                         worst = std::min(worst, delta);
                         ok = ok && delta >= -1e-9;
                       }
                       if (!ok) ++bad;
                     }
                     return Check{bad == 0,
                                  std::to_string(bad) + " failing rays, min Delta " + num(worst),
                                  "0 failing rays"};
                   }});
  items.push_back({"2/nongray-distance", "26 binary-entropic rows: dnorm(h_i, rho_i) <= 2e-3", 0.0,
                   [](const fs::path& d) {
                     const auto rays = load_ray_table(d / "ingleton_cone.csv");
                     double worst = 0.0;
                     int count = 0;
                     for (int i = 1; i <= 35; ++i) {
                       if (in_gray(i)) continue;
                       const auto s = std::to_string(i);
                       worst = std::max(worst, normalized_distance(rays.at("h" + s), rays.at("rho" + s)));
                       ++count;
                     }
                     return Check{count == 26 && worst <= 2e-3,
                                  std::to_string(count) + " rows, max dnorm " + num(worst, 4),
                                  "26 rows, max dnorm <= 0.002"};
                   }});
  items.push_back({"2/gray-distance", "9 gray rows: dnorm(h_i, rho_i) > 1e-2", 0.0,
                   [](const fs::path& d) {
                     const auto rays = load_ray_table(d / "ingleton_cone.csv");
                     double least = INFINITY;
                     int count = 0;
                     for (int i = 1; i <= 35; ++i) {
                       if (!in_gray(i)) continue;
                       const auto s = std::to_string(i);
                       least = std::min(least, normalized_distance(rays.at("h" + s), rays.at("rho" + s)));
                       ++count;
                     }
                     return Check{count == 9 && least > 1e-2,
                                  std::to_string(count) + " rows, min dnorm " + num(least, 4),
                                  "9 rows, min dnorm > 0.01"};
                   }});

  items.push_back({"3/nonconverging", "non-converging point against the 14 hyperplanes", 0.0,
                   [](const fs::path& d) {
                     const auto table = load_hyperplanes(d / "fc_hyperplanes.csv");
                     const auto h = load_ray_table(d / "named_rays.csv").at("nonconverging");
                     if (table.hyperplanes.size() != kNonconvergingScores.size())
                       return Check{false, std::to_string(table.hyperplanes.size()) + " hyperplanes",
                                    "14 hyperplanes"};
                     double gap = 0.0;
                     std::string values;
                     for (std::size_t k = 0; k < table.hyperplanes.size(); ++k) {
                       const double v = hyperplane_value(table.hyperplanes[k], h);
                       gap = std::max(gap, std::abs(v - kNonconvergingScores[k]));
                       values += (k ? " " : "") + num(v, 4);
                     }
                     return Check{gap <= 1e-3, "[" + values + "], max gap " + num(gap, 3),
                                  "printed list +- 1e-3"};
                   }});
  items.push_back({"3/fc-incidence", "FC against each hyperplane scores 0", 0.0,
                   [](const fs::path& d) {
                     const auto table = load_hyperplanes(d / "fc_hyperplanes.csv");
                     const auto fc = load_ray_table(d / "named_rays.csv").at("fc");
                     double worst = 0.0;
                     for (const auto& g : table.hyperplanes)
                       worst = std::max({worst, std::abs(hyperplane_score(g, fc)),
                                         std::abs(hyperplane_value(g, fc))});
                     return Check{table.hyperplanes.size() == 14 && worst <= 1e-3,
                                  "max |score| " + num(worst, 3), "<= 1e-3"};
                   }});

  const std::size_t expected_sizes[] = {15, 14, 91, 364, 1001};
  for (int level = 1; level <= 5; ++level) {
    const std::size_t want = expected_sizes[level - 1];
    items.push_back({"4/grid-" + std::to_string(level),
                     "grid level " + std::to_string(level) + ": size and exact reconstruction", 0.0,
                     [level, want](const fs::path& d) {
                       const auto v = load_ray_table(d / "pyramid_vamos.csv").at("vamos");
                       const auto base = load_ray_table(d / "pyramid_base.csv");
                       const auto grid = generate_grid(v, base, level);
                       std::size_t exact = 0;
                       for (std::size_t k = 0; k < grid.size(); ++k)
                         if (reconstruct(grid.label(k), v, base) == grid.ray(k)) ++exact;
                       return Check{grid.size() == want && exact == grid.size(),
                                    std::to_string(grid.size()) + " rays, " +
                                        std::to_string(exact) + " reconstructed",
                                    std::to_string(want) + " rays, all reconstructed"};
                     }});
  }
  return items;
}

bool selected(const std::string& id, const std::vector<std::string>& only) {
  if (only.empty()) return true;
  const std::string group = id.substr(0, id.find('/'));
  return std::find(only.begin(), only.end(), id) != only.end() ||
         std::find(only.begin(), only.end(), group) != only.end();
}

void check_manifest(const fs::path& dir, std::vector<VerifyItem>& out) {
  const fs::path manifest = dir / "MANIFEST.sha256";
  std::ifstream in(manifest);
  if (!in) {
    out.push_back({"manifest", "fixture hashes", false, "missing " + manifest.string(),
                   "MANIFEST.sha256 present", 0.0});
    return;
  }
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream is(line);
    std::string hash, name;
    is >> hash >> name;
    if (!name.empty() && name[0] == '*') name.erase(0, 1);
    VerifyItem item{"manifest/" + name, "sha256 of " + name, false, "", hash, 0.0};
    try {
      item.observed = sha256_file(dir / name);
      item.passed = item.observed == hash;
    } catch (const std::exception& e) {
      item.observed = e.what();
    }
    out.push_back(std::move(item));
  }
}

}  // namespace

fs::path default_fixture_dir() {
  if (const char* env = std::getenv("ENTVEC_FIXTURES"); env && *env) return env;
  return ENTVEC_DEFAULT_FIXTURES;
}

std::string sha256_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorKind::kIo, "cannot open " + path.string());
  EVP_MD_CTX* ctx = EVP_MD_CTX_new();
  if (!ctx || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
    EVP_MD_CTX_free(ctx);
    fail(ErrorKind::kIo, "sha256 unavailable");
  }
  char buf[1 << 15];
  while (in.read(buf, sizeof buf) || in.gcount() > 0)
    EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
  unsigned char md[EVP_MAX_MD_SIZE];
  unsigned int len = 0;
  EVP_DigestFinal_ex(ctx, md, &len);
  EVP_MD_CTX_free(ctx);
  std::ostringstream os;
  for (unsigned int k = 0; k < len; ++k)
    os << std::hex << std::setw(2) << std::setfill('0') << static_cast<int>(md[k]);
  return os.str();
}

bool VerifyReport::all_passed() const {
  return !items.empty() &&
         std::all_of(items.begin(), items.end(), [](const VerifyItem& i) { return i.passed; });
}

std::vector<std::string> verify_item_ids() {
  std::vector<std::string> ids;
  for (const auto& d : item_defs()) ids.push_back(d.id);
  ids.push_back("manifest");
  return ids;
}

VerifyReport verify_fixtures(const VerifyOptions& options) {
  VerifyReport report;
  for (const auto& def : item_defs()) {
    if (!selected(def.id, options.only)) continue;
    VerifyItem item{def.id, def.description, false, "", "", 0.0};
    const auto t0 = std::chrono::steady_clock::now();
    try {
      const Check c = def.run(options.dir);
      item.passed = c.passed;
      item.observed = c.observed;
      item.expected = c.expected;
    } catch (const std::exception& e) {
      item.observed = std::string("error: ") + e.what();
    }
    item.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (def.time_limit > 0.0) {
      item.expected += "; < " + num(def.time_limit, 3) + " s";
      if (item.seconds >= def.time_limit) {
        item.passed = false;
        item.observed += "; took " + num(item.seconds, 3) + " s";
      }
    }
    report.items.push_back(std::move(item));
  }
  if (options.check_hashes && selected("manifest", options.only))
    check_manifest(options.dir, report.items);
  return report;
}

}  // namespace entvec
