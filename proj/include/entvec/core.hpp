#pragma once

#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <span>
#include <string>
#include <vector>

namespace entvec {

inline constexpr int kMaxVariables = 8;
inline constexpr std::size_t kMaxOutcomes = 10'000'000;

// Default tolerance on |sum - 1| for a JointPmf.
inline constexpr double kMassTolerance = 1e-12;

// Nonempty subset of {1..n}; bit i-1 set iff variable i is a member. The
// canonical order of entropy coordinates is the integer order of masks, so
// the coordinate of subset s lives at position s.mask() - 1.
class Subset {
 public:
  constexpr Subset() = default;
  constexpr explicit Subset(std::uint32_t mask) : mask_(mask) {}

  // Variables are 1-based.
  static Subset of(std::initializer_list<int> vars);
  static constexpr Subset full(int n) { return Subset((1u << n) - 1u); }
  static constexpr Subset at_position(std::size_t pos) {
    return Subset(static_cast<std::uint32_t>(pos + 1));
  }

  constexpr std::uint32_t mask() const { return mask_; }
  constexpr std::size_t position() const { return mask_ - 1; }
  constexpr bool empty() const { return mask_ == 0; }
  constexpr bool contains(int var) const { return (mask_ >> (var - 1)) & 1u; }
  constexpr bool is_subset_of(Subset other) const {
    return (mask_ & ~other.mask_) == 0;
  }
  int size() const;

  constexpr Subset operator|(Subset o) const { return Subset(mask_ | o.mask_); }
  constexpr Subset operator&(Subset o) const { return Subset(mask_ & o.mask_); }
  constexpr Subset without(int var) const {
    return Subset(mask_ & ~(1u << (var - 1)));
  }
  constexpr bool operator==(const Subset&) const = default;

  // "1", "12", "134", ...
  std::string digits() const;

 private:
  std::uint32_t mask_ = 0;
};

inline constexpr std::size_t subset_count(int n) {
  return (std::size_t{1} << n) - 1;
}

// Alphabet sizes |X_1|, ..., |X_n|. Outcomes are encoded mixed-radix with x_1
// as the least-significant digit.
class AlphabetSpec {
 public:
  explicit AlphabetSpec(std::vector<int> sizes);
  static AlphabetSpec uniform(int n, int size);

  int variables() const { return static_cast<int>(sizes_.size()); }
  std::span<const int> sizes() const { return sizes_; }
  int size(int var) const { return sizes_[var - 1]; }
  std::size_t stride(int var) const { return strides_[var - 1]; }
  std::size_t outcomes() const { return outcomes_; }

  // Number of cells of the marginal over `s`.
  std::size_t marginal_size(Subset s) const;

  std::size_t encode(std::span<const int> tuple) const;
  std::vector<int> decode(std::size_t index) const;

  bool operator==(const AlphabetSpec& o) const { return sizes_ == o.sizes_; }

  std::string to_string() const;  // "2,2,2,2"

 private:
  std::vector<int> sizes_;
  std::vector<std::size_t> strides_;
  std::size_t outcomes_ = 1;
};

class EntropyVector {
 public:
  EntropyVector() = default;
  EntropyVector(int n, std::vector<double> values);
  static EntropyVector zeros(int n);

  int variables() const { return n_; }
  std::size_t size() const { return values_.size(); }
  std::span<const double> values() const { return values_; }

  double operator[](Subset s) const { return values_[s.position()]; }
  double& operator[](Subset s) { return values_[s.position()]; }
  double at(std::size_t pos) const { return values_.at(pos); }
  double& at(std::size_t pos) { return values_.at(pos); }

  // h_N
  double full() const { return values_.back(); }

  double dot(const EntropyVector& o) const;
  double norm() const;
  bool is_zero() const;

  EntropyVector operator+(const EntropyVector& o) const;
  EntropyVector operator-(const EntropyVector& o) const;
  EntropyVector operator*(double a) const;

  bool operator==(const EntropyVector&) const = default;

 private:
  int n_ = 0;
  std::vector<double> values_;
};

inline EntropyVector operator*(double a, const EntropyVector& h) { return h * a; }

// Canonical coordinate names: prefix + digits, e.g. "h1", "h12", "h1234".
std::vector<std::string> canonical_columns(int n, char prefix = 'h');

class JointPmf {
 public:
  // Validates entries in [0, 1] (tiny negatives >= -1e-15 are clamped) and
  // |sum - 1| <= tolerance.
  JointPmf(AlphabetSpec spec, std::vector<double> mass,
           double tolerance = kMassTolerance);

  static JointPmf uniform(AlphabetSpec spec);
  static JointPmf point_mass(AlphabetSpec spec, std::size_t outcome);

  const AlphabetSpec& spec() const { return spec_; }
  std::span<const double> mass() const { return mass_; }
  std::size_t size() const { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }

  bool operator==(const JointPmf&) const = default;

 private:
  AlphabetSpec spec_;
  std::vector<double> mass_;
};

// Tolerance that lets a pmf derived from `p` by mass-preserving moves pass
// validation again (loaded files may carry a deficit up to 1e-6).
double carried_tolerance(const JointPmf& p);

// Marginal pmf over the variables in `s`, indexed mixed-radix over the
// members of `s` in increasing variable order.
std::vector<double> marginalize(const JointPmf& p, Subset s);

// Entropy in bits; 0 log 0 = 0.
double shannon_entropy(std::span<const double> mass);

// -p log2 p for a single cell; zero below 1e-300.
double entropy_term(double p);

EntropyVector entropy_vector(const JointPmf& p);

double total_variation(const JointPmf& p, const JointPmf& q);

// Moves the combined mass of outcomes i and j so that i receives the
// fraction lambda of it.
JointPmf perturb_two_point(const JointPmf& p, std::size_t i, std::size_t j,
                           double lambda);

}  // namespace entvec
