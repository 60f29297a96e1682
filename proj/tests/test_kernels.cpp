#include <random>

#include "doctest.h"
#include "entvec/kernels.hpp"
#include "support.hpp"

using namespace entvec;

TEST_CASE("parallel entropy vector matches the serial reference") {
  std::mt19937_64 rng(3);
  const std::vector<AlphabetSpec> specs = {AlphabetSpec({2}), testing::binary4(),
                                           AlphabetSpec({5, 5, 5, 5}), AlphabetSpec({3, 4, 2, 3, 2}),
                                           AlphabetSpec({4, 4, 4, 4, 4, 4})};
  for (const auto& spec : specs) {
    const auto p = testing::random_pmf(rng, spec, 0.4);
    const auto a = kernels::entropy_vector_serial(p);
    const auto b = kernels::entropy_vector_omp(p);
    for (std::size_t k = 0; k < a.size(); ++k) CHECK(b.at(k) == doctest::Approx(a.at(k)).epsilon(1e-12));
    // Same summation order per subset regardless of threads.
    CHECK(kernels::entropy_vector_omp(p) == b);
  }
}

TEST_CASE("incremental proposal matches a full recomputation") {
  std::mt19937_64 rng(9);
  std::uniform_real_distribution<double> u(0, 1);
  for (const auto& spec : {testing::binary4(), AlphabetSpec({3, 2, 5, 2})}) {
    auto p = testing::random_pmf(rng, spec, 0.3);
    kernels::IncrementalEntropy inc(p);
    CHECK(inc.current() == entropy_vector(p));
    EntropyVector out;
    for (int rep = 0; rep < 300; ++rep) {
      const std::size_t i = rng() % spec.outcomes();
      std::size_t j = rng() % (spec.outcomes() - 1);
      if (j >= i) ++j;
      const double lambda = u(rng);
      const auto q = perturb_two_point(p, i, j, lambda);
      inc.propose(i, j, q[i], q[j], out);
      const auto exact = entropy_vector(q);
      for (std::size_t k = 0; k < exact.size(); ++k)
        CHECK(out.at(k) == doctest::Approx(exact.at(k)).epsilon(1e-10));
      if (rep % 3 == 0) {
        inc.commit(i, j, q[i], q[j]);
        p = q;
        CHECK(inc.current() == entropy_vector(p));
        CHECK(inc.pmf() == p);
      }
    }
  }
}

TEST_CASE("marginal layout cells") {
  const AlphabetSpec spec({2, 3});
  const kernels::MarginalLayout layout(spec);
  CHECK(layout.subsets() == 3);
  CHECK(layout.total_cells() == 2 + 3 + 6);
  const std::vector<int> digits = {1, 2};
  CHECK(layout.cell(0, digits) == 1);
  CHECK(layout.cell(1, digits) == 2);
  CHECK(layout.cell(2, digits) == 5);
}
