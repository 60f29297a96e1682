#include "doctest.h"
#include "properties.hpp"

namespace {

void check_suite(const testing::SuiteResult& r, std::size_t expected) {
  INFO("first failure: " << r.first_failure);
  CHECK(r.trials == expected);
  CHECK(r.failures == 0);
}

}  // namespace

TEST_CASE("normalized distance is scale invariant, symmetric and equals tan") {
  check_suite(testing::distance_properties(10000, 11), 10000);
}

TEST_CASE("marginal total variation is bounded by the joint one") {
  check_suite(testing::marginal_tv_bound(10000, 12), 10000);
}

TEST_CASE("seeded searches have strict traces and replay exactly") {
  check_suite(testing::search_invariants(100, 13), 100);
}

TEST_CASE("tight decomposition reconstructs a tight polymatroid") {
  check_suite(testing::tighten_properties(1000, 14), 1000);
}

TEST_CASE("Ingleton score and violation index are scale invariant") {
  std::mt19937_64 rng(15);
  std::uniform_real_distribution<double> scale(0.01, 100.0);
  for (int k = 0; k < 10000; ++k) {
    const auto h = testing::random_polymatroid(rng);
    const double a = scale(rng);
    for (const auto p : entvec::all_variable_pairs()) {
      CHECK(std::abs(entvec::ingleton_score(h * a, p) - entvec::ingleton_score(h, p)) <= 1e-12);
      CHECK(std::abs(entvec::violation_index(h * a, p) - entvec::violation_index(h, p)) <= 1e-12);
    }
  }
}
