#include "entvec/kernels.hpp"

#include <algorithm>
#include <cmath>

#ifdef _OPENMP
#include <omp.h>
#endif

#include "entvec/error.hpp"

namespace entvec::kernels {

namespace {

// Below this many (outcome, subset) updates the thread fork costs more than
// the work.
constexpr std::size_t kParallelWorkThreshold = 1 << 15;

double entropy_of_cells(const double* cells, std::size_t count) {
  double h = 0.0;
  for (std::size_t c = 0; c < count; ++c) h += entropy_term(cells[c]);
  return h > 0.0 ? h : 0.0;
}

}  // namespace

bool openmp_enabled() {
#ifdef _OPENMP
  return true;
#else
  return false;
#endif
}

int max_threads() {
#ifdef _OPENMP
  return omp_get_max_threads();
#else
  return 1;
#endif
}

EntropyVector entropy_vector_serial(const JointPmf& p) {
  const int n = p.spec().variables();
  std::vector<double> values(subset_count(n));
  for (std::size_t pos = 0; pos < values.size(); ++pos)
    values[pos] = shannon_entropy(marginalize(p, Subset::at_position(pos)));
  return EntropyVector(n, std::move(values));
}

MarginalLayout::MarginalLayout(const AlphabetSpec& spec) : spec_(spec) {
  const int n = spec.variables();
  const std::size_t count = subset_count(n);
  offsets_.resize(count + 1, 0);
  strides_.assign(count * static_cast<std::size_t>(n), 0);
  for (std::size_t pos = 0; pos < count; ++pos) {
    const Subset s = Subset::at_position(pos);
    std::size_t acc = 1;
    for (int v = 1; v <= n; ++v) {
      if (s.contains(v)) {
        strides_[pos * n + (v - 1)] = acc;
        acc *= static_cast<std::size_t>(spec.size(v));
      }
    }
    offsets_[pos + 1] = offsets_[pos] + acc;
  }
}

std::size_t MarginalLayout::cell(std::size_t pos, std::span<const int> digits) const {
  const std::size_t n = digits.size();
  const std::size_t* st = &strides_[pos * n];
  std::size_t c = 0;
  for (std::size_t k = 0; k < n; ++k) c += static_cast<std::size_t>(digits[k]) * st[k];
  return c;
}

void MarginalLayout::accumulate(std::span<const double> mass,
                                std::vector<double>& marginals) const {
  const int n = spec_.variables();
  const std::size_t count = subsets();
  const std::size_t outcomes = spec_.outcomes();
  marginals.assign(total_cells(), 0.0);
  const bool parallel = outcomes * count >= kParallelWorkThreshold;

#pragma omp parallel for schedule(dynamic) if (parallel)
  for (std::size_t pos = 0; pos < count; ++pos) {
    double* out = marginals.data() + offsets_[pos];
    const std::size_t* st = &strides_[pos * n];
    // Odometer over outcome digits, tracking the marginal cell incrementally.
    std::vector<int> digits(static_cast<std::size_t>(n), 0);
    std::size_t c = 0;
    for (std::size_t x = 0; x < outcomes; ++x) {
      out[c] += mass[x];
      for (int k = 0; k < n; ++k) {
        if (++digits[k] < spec_.sizes()[k]) {
          c += st[k];
          break;
        }
        c -= st[k] * static_cast<std::size_t>(digits[k] - 1);
        digits[k] = 0;
      }
    }
  }
}

EntropyVector entropy_vector_omp(const JointPmf& p) {
  const MarginalLayout layout(p.spec());
  std::vector<double> marginals;
  layout.accumulate(p.mass(), marginals);
  const std::size_t count = layout.subsets();
  std::vector<double> values(count);
  const bool parallel = layout.total_cells() >= kParallelWorkThreshold;
#pragma omp parallel for if (parallel)
  for (std::size_t pos = 0; pos < count; ++pos)
    values[pos] = entropy_of_cells(marginals.data() + layout.offset(pos),
                                   layout.offset(pos + 1) - layout.offset(pos));
  return EntropyVector(p.spec().variables(), std::move(values));
}

IncrementalEntropy::IncrementalEntropy(const JointPmf& start)
    : layout_(start.spec()),
      mass_(start.mass().begin(), start.mass().end()),
      digits_i_(static_cast<std::size_t>(start.spec().variables())),
      digits_j_(static_cast<std::size_t>(start.spec().variables())) {
  recompute();
}

void IncrementalEntropy::recompute() {
  layout_.accumulate(mass_, marginals_);
  const std::size_t count = layout_.subsets();
  std::vector<double> values(count);
  for (std::size_t pos = 0; pos < count; ++pos)
    values[pos] = entropy_of_cells(marginals_.data() + layout_.offset(pos),
                                   layout_.offset(pos + 1) - layout_.offset(pos));
  h_ = EntropyVector(spec().variables(), std::move(values));
}

void IncrementalEntropy::propose(std::size_t i, std::size_t j, double new_i, double new_j,
                                 EntropyVector& out) const {
  if (out.size() != h_.size()) out = h_;
  const auto sizes = spec().sizes();
  std::size_t ri = i, rj = j;
  for (std::size_t k = 0; k < sizes.size(); ++k) {
    const auto sz = static_cast<std::size_t>(sizes[k]);
    digits_i_[k] = static_cast<int>(ri % sz);
    digits_j_[k] = static_cast<int>(rj % sz);
    ri /= sz;
    rj /= sz;
  }
  const double di = new_i - mass_[i];
  const double dj = new_j - mass_[j];
  for (std::size_t pos = 0; pos < layout_.subsets(); ++pos) {
    const std::size_t ci = layout_.cell(pos, digits_i_);
    const std::size_t cj = layout_.cell(pos, digits_j_);
    const Subset s = Subset::at_position(pos);
    if (ci == cj) {
      out[s] = h_[s];
      continue;
    }
    const double* base = marginals_.data() + layout_.offset(pos);
    const double mi = base[ci], mj = base[cj];
    const double ni = std::max(mi + di, 0.0), nj = std::max(mj + dj, 0.0);
    const double h = h_[s] - entropy_term(mi) - entropy_term(mj) + entropy_term(ni) +
                     entropy_term(nj);
    out[s] = h > 0.0 ? h : 0.0;
  }
}

void IncrementalEntropy::commit(std::size_t i, std::size_t j, double new_i, double new_j) {
  mass_[i] = new_i;
  mass_[j] = new_j;
  recompute();
}

JointPmf IncrementalEntropy::pmf() const {
  double sum = 0.0;
  for (double m : mass_) sum += m;
  return JointPmf(spec(), mass_, std::max(kMassTolerance, std::abs(sum - 1.0) + kMassTolerance));
}

}  // namespace entvec::kernels
