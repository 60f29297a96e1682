#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include "entvec/core.hpp"

// Entropy-vector kernels. The serial versions are the reference
// implementations kept for testing; the OpenMP versions are what the library
// and the search use.
namespace entvec::kernels {

// One marginalize() + shannon_entropy() call per subset.
EntropyVector entropy_vector_serial(const JointPmf& p);

// Parallel over subsets; falls back to a single thread below a work
// threshold or when already inside a parallel region.
EntropyVector entropy_vector_omp(const JointPmf& p);

bool openmp_enabled();
int max_threads();

// Marginal cell of an outcome for every subset, computed from the outcome's
// digits without materializing an outcome-by-subset table.
class MarginalLayout {
 public:
  explicit MarginalLayout(const AlphabetSpec& spec);

  const AlphabetSpec& spec() const { return spec_; }
  std::size_t subsets() const { return offsets_.size() - 1; }
  // Start of subset position `pos` inside a flat buffer of all marginals.
  std::size_t offset(std::size_t pos) const { return offsets_[pos]; }
  std::size_t total_cells() const { return offsets_.back(); }

  // digits: x_1..x_n of one outcome.
  std::size_t cell(std::size_t pos, std::span<const int> digits) const;

  // Fills `marginals` (size total_cells()) from the joint masses.
  void accumulate(std::span<const double> mass, std::vector<double>& marginals) const;

 private:
  AlphabetSpec spec_;
  std::vector<std::size_t> offsets_;
  // strides_[pos * n + (var - 1)]: stride of variable var in the marginal of
  // subset pos, zero when var is not a member.
  std::vector<std::size_t> strides_;
};

// Search-side evaluator: holds the current pmf with its marginals and entropy
// vector, and scores two-point moves by updating only the affected marginal
// cells. Commits recompute everything from the masses so rounding does not
// accumulate across accepted moves.
class IncrementalEntropy {
 public:
  explicit IncrementalEntropy(const JointPmf& start);

  const AlphabetSpec& spec() const { return layout_.spec(); }
  std::span<const double> mass() const { return mass_; }
  const EntropyVector& current() const { return h_; }

  // Entropy vector after setting mass(i) = new_i and mass(j) = new_j, where
  // new_i + new_j equals mass(i) + mass(j).
  void propose(std::size_t i, std::size_t j, double new_i, double new_j,
               EntropyVector& out) const;

  void commit(std::size_t i, std::size_t j, double new_i, double new_j);

  JointPmf pmf() const;

 private:
  void recompute();

  MarginalLayout layout_;
  std::vector<double> mass_;
  std::vector<double> marginals_;
  EntropyVector h_;
  mutable std::vector<int> digits_i_;
  mutable std::vector<int> digits_j_;
};

}  // namespace entvec::kernels
