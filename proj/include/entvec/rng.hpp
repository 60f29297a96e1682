#pragma once

#include <cstddef>
#include <cstdint>
#include <random>

namespace entvec {

// Recorded in run metadata; changes whenever the draw sequence changes.
inline constexpr const char* kRngName = "mt19937_64+splitmix64-v1";

std::uint64_t splitmix64(std::uint64_t& state);

// Seed of job k in a batch with the given master seed.
std::uint64_t stream_seed(std::uint64_t master, std::uint64_t k);

// The draws are written out by hand rather than taken from <random>
// distributions, whose output is implementation-defined.
class SearchRng {
 public:
  explicit SearchRng(std::uint64_t seed) : engine_(seed) {}

  std::uint64_t next() { return engine_(); }
  // Uniform on {0, ..., bound - 1}; bound >= 1.
  std::size_t index(std::size_t bound);
  // Two distinct uniform indices; bound >= 2.
  std::pair<std::size_t, std::size_t> distinct_pair(std::size_t bound);
  // Uniform on [0, hi], both ends attainable.
  double closed_unit(double hi);

 private:
  std::mt19937_64 engine_;
};

}  // namespace entvec
