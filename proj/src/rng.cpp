#include "entvec/rng.hpp"

#include "entvec/error.hpp"

namespace entvec {

std::uint64_t splitmix64(std::uint64_t& state) {
  std::uint64_t z = (state += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

std::uint64_t stream_seed(std::uint64_t master, std::uint64_t k) {
  std::uint64_t state = master;
  const std::uint64_t base = splitmix64(state);
  state = base ^ (k * 0xd1b54a32d192ed03ULL);
  splitmix64(state);
  return splitmix64(state);
}

std::size_t SearchRng::index(std::size_t bound) {
  if (bound == 0) fail(ErrorKind::kInvalidArgument, "index bound must be positive");
  const std::uint64_t b = bound;
  // Reject the top partial block so every residue is equally likely.
  const std::uint64_t limit = UINT64_MAX - (UINT64_MAX % b + 1) % b;
  std::uint64_t x;
  do x = engine_();
  while (x > limit);
  return static_cast<std::size_t>(x % b);
}

std::pair<std::size_t, std::size_t> SearchRng::distinct_pair(std::size_t bound) {
  if (bound < 2) fail(ErrorKind::kInvalidArgument, "need at least two outcomes");
  const std::size_t i = index(bound);
  std::size_t j = index(bound - 1);
  if (j >= i) ++j;
  return {i, j};
}

double SearchRng::closed_unit(double hi) {
  constexpr double kDenominator = 9007199254740991.0;  // 2^53 - 1
  return hi * static_cast<double>(engine_() >> 11) / kDenominator;
}

}  // namespace entvec
