#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <random>
#include <string>
#include <vector>

#include "entvec/core.hpp"
#include "entvec/io.hpp"

namespace testing {

inline std::filesystem::path fixture(const std::string& name) {
  return std::filesystem::path(ENTVEC_TEST_FIXTURES) / name;
}

inline entvec::JointPmf random_pmf(std::mt19937_64& rng, const entvec::AlphabetSpec& spec,
                                   double zero_fraction = 0.0) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> m(spec.outcomes());
  double sum = 0.0;
  for (double& x : m) {
    x = u(rng) < zero_fraction ? 0.0 : -std::log(1.0 - u(rng));
    sum += x;
  }
  if (sum == 0.0) {
    m[0] = 1.0;
    sum = 1.0;
  }
  for (double& x : m) x /= sum;
  // Push the rounding residue into the largest cell so the sum is 1 to the ulp.
  double s = 0.0;
  for (double x : m) s += x;
  *std::max_element(m.begin(), m.end()) += 1.0 - s;
  return entvec::JointPmf(spec, std::move(m));
}

inline entvec::AlphabetSpec binary4() { return entvec::AlphabetSpec::uniform(4, 2); }

// Random polymatroid on four variables: a nonnegative combination of
// Ingleton-cone extreme rays, the apex ray and an entropy vector.
inline entvec::EntropyVector random_polymatroid(std::mt19937_64& rng) {
  static const auto cone = entvec::load_ray_table(fixture("ingleton_cone.csv")).with_prefix("rho");
  static const auto apex = entvec::load_ray_table(fixture("pyramid_vamos.csv")).ray(0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  entvec::EntropyVector h = entvec::EntropyVector::zeros(4);
  for (const auto& r : cone.rays())
    if (u(rng) < 0.3) h = h + r * u(rng);
  if (u(rng) < 0.5) h = h + apex * u(rng);
  h = h + entvec::entropy_vector(random_pmf(rng, binary4(), 0.5)) * u(rng);
  if (h.is_zero()) h = cone.ray(0);
  return h;
}

}  // namespace testing
