#include "entvec/inner_bounds.hpp"

#include <algorithm>
#include <cmath>

#include "entvec/error.hpp"
#include "entvec/geometry.hpp"

namespace entvec {

namespace {

bool same_unit_ray(const EntropyVector& a, const EntropyVector& b) {
  for (std::size_t k = 0; k < a.size(); ++k)
    if (std::abs(a.at(k) - b.at(k)) > kGridDedupTolerance) return false;
  return true;
}

class DedupSet {
 public:
  explicit DedupSet(int n) : rays_(n) {}

  void add(std::string label, EntropyVector ray) {
    EntropyVector unit = normalize_ray(ray, RayNormalization::kUnitNorm);
    for (const auto& u : units_)
      if (same_unit_ray(u, unit)) return;
    units_.push_back(std::move(unit));
    rays_.add(std::move(label), std::move(ray));
  }

  RaySet take() { return std::move(rays_); }

 private:
  RaySet rays_;
  std::vector<EntropyVector> units_;
};

}  // namespace

RaySet generate_grid(const EntropyVector& vamos, const RaySet& base, int level) {
  if (base.size() != kPyramidBaseRays)
    fail(ErrorKind::kInvalidArgument,
         "grid needs exactly 14 base rays, got " + std::to_string(base.size()));
  if (level < 1 || level > 5) fail(ErrorKind::kInvalidArgument, "grid level must be in 1..5");
  if (vamos.variables() != base.variables())
    fail(ErrorKind::kInvalidArgument, "apex and base rays have different dimensions");

  const int n = base.variables();
  DedupSet out(n);
  const EntropyVector& v = vamos;
  const std::vector<EntropyVector>& b = base.rays();

  const std::string tag = "G" + std::to_string(level) + ":";
  if (level == 1) {
    out.add(tag + "v", v);
    for (std::size_t k = 0; k < b.size(); ++k) out.add(tag + "b" + std::to_string(k + 1), b[k]);
    return out.take();
  }

  const std::size_t pick = static_cast<std::size_t>(level - 1);
  std::vector<std::size_t> idx(pick);
  for (std::size_t k = 0; k < pick; ++k) idx[k] = k;
  const std::size_t m = b.size();
  while (true) {
    EntropyVector sum = v;
    std::string label = tag + "v";
    for (const std::size_t k : idx) {
      sum = sum + b[k];
      label += "+b" + std::to_string(k + 1);
    }
    out.add(std::move(label), std::move(sum));
    // Next combination in lexicographic order.
    std::size_t k = pick;
    while (k > 0 && idx[k - 1] == m - pick + (k - 1)) --k;
    if (k == 0) break;
    ++idx[k - 1];
    for (std::size_t t = k; t < pick; ++t) idx[t] = idx[t - 1] + 1;
  }
  return out.take();
}

RaySet filter_ingleton_violating(const RaySet& points, double tol) {
  RaySet out(points.variables());
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& h = points.ray(k);
    double worst = ingleton_delta(h, all_variable_pairs()[0]);
    for (const auto p : all_variable_pairs()) worst = std::min(worst, ingleton_delta(h, p));
    if (worst < -tol) out.add(points.label(k), h);
  }
  return out;
}

JointPmf centroid_start_pmf(const RaySet& base, const AlphabetSpec& alphabet, double delta,
                            std::uint64_t seed) {
  SearchConfig c;
  c.target = centroid_ray(base, RayNormalization::kUnitNorm).ray;
  c.delta = delta;
  c.seed = seed;
  return nearest_point_search(JointPmf::uniform(alphabet), c).final_pmf;
}

NearestPoints nearest_points_for_rayset(const RaySet& targets, const JointPmf& start,
                                        const SearchConfig& search_template,
                                        std::uint64_t master_seed, int parallelism) {
  std::vector<BatchJob> jobs;
  jobs.reserve(targets.size());
  for (const auto& t : targets.rays()) {
    SearchConfig c = search_template;
    c.objective = Objective::kDistance;
    c.target = t;
    jobs.push_back({start, std::move(c), std::nullopt});
  }
  NearestPoints out{RaySet(targets.variables()), batch_run(jobs, master_seed, parallelism)};
  for (std::size_t k = 0; k < out.results.size(); ++k)
    if (out.results[k].ok()) out.points.add(targets.label(k), out.results[k].outcome->final_h);
  return out;
}

}  // namespace entvec
