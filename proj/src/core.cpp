#include "entvec/core.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <numeric>
#include <sstream>

#include "entvec/error.hpp"
#include "entvec/kernels.hpp"

namespace entvec {

namespace {

constexpr double kNegativeClamp = -1e-15;
constexpr double kEntropySumTolerance = 1e-6;

}  // namespace

double carried_tolerance(const JointPmf& p) {
  const double sum = std::accumulate(p.mass().begin(), p.mass().end(), 0.0);
  return std::max(kMassTolerance, std::abs(sum - 1.0) + kMassTolerance);
}

Subset Subset::of(std::initializer_list<int> vars) {
  std::uint32_t mask = 0;
  for (int v : vars) {
    if (v < 1 || v > kMaxVariables)
      fail(ErrorKind::kInvalidArgument, "variable index out of range: " + std::to_string(v));
    mask |= 1u << (v - 1);
  }
  return Subset(mask);
}

int Subset::size() const { return std::popcount(mask_); }

std::string Subset::digits() const {
  std::string s;
  for (int v = 1; v <= 32; ++v)
    if (contains(v)) s += std::to_string(v);
  return s;
}

AlphabetSpec::AlphabetSpec(std::vector<int> sizes) : sizes_(std::move(sizes)) {
  if (sizes_.empty() || static_cast<int>(sizes_.size()) > kMaxVariables)
    fail(ErrorKind::kInvalidArgument,
         "number of variables must be in 1.." + std::to_string(kMaxVariables));
  strides_.reserve(sizes_.size());
  for (int s : sizes_) {
    if (s < 1) fail(ErrorKind::kInvalidArgument, "alphabet sizes must be >= 1");
    strides_.push_back(outcomes_);
    outcomes_ *= static_cast<std::size_t>(s);
    if (outcomes_ > kMaxOutcomes)
      fail(ErrorKind::kInvalidArgument, "product alphabet exceeds 1e7 outcomes");
  }
}

AlphabetSpec AlphabetSpec::uniform(int n, int size) {
  return AlphabetSpec(std::vector<int>(static_cast<std::size_t>(n < 0 ? 0 : n), size));
}

std::size_t AlphabetSpec::marginal_size(Subset s) const {
  std::size_t cells = 1;
  for (int v = 1; v <= variables(); ++v)
    if (s.contains(v)) cells *= static_cast<std::size_t>(size(v));
  return cells;
}

std::size_t AlphabetSpec::encode(std::span<const int> tuple) const {
  if (tuple.size() != sizes_.size())
    fail(ErrorKind::kInvalidArgument, "outcome tuple has wrong arity");
  std::size_t index = 0;
  for (std::size_t k = 0; k < tuple.size(); ++k) {
    if (tuple[k] < 0 || tuple[k] >= sizes_[k])
      fail(ErrorKind::kInvalidArgument,
           "symbol " + std::to_string(tuple[k]) + " out of range for variable " +
               std::to_string(k + 1));
    index += static_cast<std::size_t>(tuple[k]) * strides_[k];
  }
  return index;
}

std::vector<int> AlphabetSpec::decode(std::size_t index) const {
  std::vector<int> tuple(sizes_.size());
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    tuple[k] = static_cast<int>(index % static_cast<std::size_t>(sizes_[k]));
    index /= static_cast<std::size_t>(sizes_[k]);
  }
  return tuple;
}

std::string AlphabetSpec::to_string() const {
  std::string s;
  for (std::size_t k = 0; k < sizes_.size(); ++k) {
    if (k) s += ',';
    s += std::to_string(sizes_[k]);
  }
  return s;
}

EntropyVector::EntropyVector(int n, std::vector<double> values)
    : n_(n), values_(std::move(values)) {
  if (n < 1 || n > kMaxVariables)
    fail(ErrorKind::kInvalidArgument, "entropy vector variable count out of range");
  if (values_.size() != subset_count(n))
    fail(ErrorKind::kInvalidArgument,
         "entropy vector for n=" + std::to_string(n) + " needs " +
             std::to_string(subset_count(n)) + " coordinates, got " +
             std::to_string(values_.size()));
  for (double v : values_)
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "non-finite entropy coordinate");
}

EntropyVector EntropyVector::zeros(int n) {
  return EntropyVector(n, std::vector<double>(subset_count(n), 0.0));
}

double EntropyVector::dot(const EntropyVector& o) const {
  if (o.size() != size()) fail(ErrorKind::kInvalidArgument, "dimension mismatch");
  return std::inner_product(values_.begin(), values_.end(), o.values_.begin(), 0.0);
}

double EntropyVector::norm() const { return std::sqrt(dot(*this)); }

bool EntropyVector::is_zero() const {
  for (double v : values_)
    if (v != 0.0) return false;
  return true;
}

EntropyVector EntropyVector::operator+(const EntropyVector& o) const {
  if (o.size() != size()) fail(ErrorKind::kInvalidArgument, "dimension mismatch");
  std::vector<double> r(values_);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] += o.values_[k];
  return EntropyVector(n_, std::move(r));
}

EntropyVector EntropyVector::operator-(const EntropyVector& o) const {
  if (o.size() != size()) fail(ErrorKind::kInvalidArgument, "dimension mismatch");
  std::vector<double> r(values_);
  for (std::size_t k = 0; k < r.size(); ++k) r[k] -= o.values_[k];
  return EntropyVector(n_, std::move(r));
}

EntropyVector EntropyVector::operator*(double a) const {
  std::vector<double> r(values_);
  for (double& v : r) v *= a;
  return EntropyVector(n_, std::move(r));
}

std::vector<std::string> canonical_columns(int n, char prefix) {
  std::vector<std::string> cols;
  cols.reserve(subset_count(n));
  for (std::size_t pos = 0; pos < subset_count(n); ++pos)
    cols.push_back(prefix + Subset::at_position(pos).digits());
  return cols;
}

JointPmf::JointPmf(AlphabetSpec spec, std::vector<double> mass, double tolerance)
    : spec_(std::move(spec)), mass_(std::move(mass)) {
  if (mass_.size() != spec_.outcomes())
    fail(ErrorKind::kInvalidDistribution,
         "mass array has " + std::to_string(mass_.size()) + " entries, alphabet has " +
             std::to_string(spec_.outcomes()) + " outcomes");
  double sum = 0.0;
  for (double& m : mass_) {
    if (!std::isfinite(m) || m < kNegativeClamp || m > 1.0 + kMassTolerance)
      fail(ErrorKind::kInvalidDistribution, "probability outside [0, 1]");
    if (m < 0.0) m = 0.0;
    sum += m;
  }
  if (std::abs(sum - 1.0) > tolerance) {
    std::ostringstream os;
    os.precision(17);
    os << "probabilities sum to " << sum;
    fail(ErrorKind::kInvalidDistribution, os.str());
  }
}

JointPmf JointPmf::uniform(AlphabetSpec spec) {
  const std::size_t k = spec.outcomes();
  return JointPmf(std::move(spec), std::vector<double>(k, 1.0 / static_cast<double>(k)));
}

JointPmf JointPmf::point_mass(AlphabetSpec spec, std::size_t outcome) {
  std::vector<double> m(spec.outcomes(), 0.0);
  if (outcome >= m.size()) fail(ErrorKind::kInvalidArgument, "outcome index out of range");
  m[outcome] = 1.0;
  return JointPmf(std::move(spec), std::move(m));
}

std::vector<double> marginalize(const JointPmf& p, Subset s) {
  const AlphabetSpec& spec = p.spec();
  if (s.empty()) fail(ErrorKind::kInvalidArgument, "cannot marginalize onto the empty set");
  if (!s.is_subset_of(Subset::full(spec.variables())))
    fail(ErrorKind::kInvalidArgument, "subset contains variables beyond n");

  std::vector<double> out(spec.marginal_size(s), 0.0);
  std::vector<std::size_t> mstride(static_cast<std::size_t>(spec.variables()), 0);
  std::size_t acc = 1;
  for (int v = 1; v <= spec.variables(); ++v) {
    if (s.contains(v)) {
      mstride[v - 1] = acc;
      acc *= static_cast<std::size_t>(spec.size(v));
    }
  }
  for (std::size_t x = 0; x < spec.outcomes(); ++x) {
    std::size_t rest = x;
    std::size_t cell = 0;
    for (int v = 1; v <= spec.variables(); ++v) {
      const auto sz = static_cast<std::size_t>(spec.size(v));
      cell += (rest % sz) * mstride[v - 1];
      rest /= sz;
    }
    out[cell] += p[x];
  }
  return out;
}

double entropy_term(double p) {
  if (p < 1e-300) return 0.0;
  return -p * std::log2(p);
}

double shannon_entropy(std::span<const double> mass) {
  double sum = 0.0;
  for (double m : mass) {
    if (!(m >= kNegativeClamp))
      fail(ErrorKind::kInvalidDistribution, "negative probability in entropy input");
    sum += m > 0.0 ? m : 0.0;
  }
  if (std::abs(sum - 1.0) > kEntropySumTolerance)
    fail(ErrorKind::kInvalidDistribution, "entropy input does not sum to 1");
  double h = 0.0;
  for (double m : mass) h += entropy_term(m > 0.0 ? m : 0.0);
  return h > 0.0 ? h : 0.0;
}

EntropyVector entropy_vector(const JointPmf& p) { return kernels::entropy_vector_omp(p); }

double total_variation(const JointPmf& p, const JointPmf& q) {
  if (!(p.spec() == q.spec()))
    fail(ErrorKind::kInvalidArgument, "total variation needs identical alphabets");
  double tv = 0.0;
  for (std::size_t x = 0; x < p.size(); ++x) tv += std::abs(p[x] - q[x]);
  return tv;
}

JointPmf perturb_two_point(const JointPmf& p, std::size_t i, std::size_t j, double lambda) {
  if (i == j) fail(ErrorKind::kInvalidArgument, "two-point perturbation needs i != j");
  if (i >= p.size() || j >= p.size())
    fail(ErrorKind::kInvalidArgument, "outcome index out of range");
  if (!(lambda >= 0.0 && lambda <= 1.0))
    fail(ErrorKind::kInvalidArgument, "lambda must lie in [0, 1]");
  std::vector<double> m(p.mass().begin(), p.mass().end());
  const double pooled = m[i] + m[j];
  m[i] = lambda * pooled;
  m[j] = pooled - m[i];
  return JointPmf(p.spec(), std::move(m), carried_tolerance(p));
}

}  // namespace entvec
