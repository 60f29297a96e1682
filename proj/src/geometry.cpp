#include "entvec/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Dense>

#include "entvec/error.hpp"

namespace entvec {

namespace {

constexpr double kOrthogonalityThreshold = 1e-15;
constexpr double kRankTolerance = 1e-8;
constexpr double kTightenTolerance = 1e-9;
// Coefficients below this (after scaling to max 1) count as zero when
// picking the sign.
constexpr double kSignZero = 1e-12;

void require_same_dimension(const EntropyVector& x, const EntropyVector& y) {
  if (x.variables() != y.variables() || x.size() != y.size())
    fail(ErrorKind::kInvalidArgument, "entropy vectors have different dimensions");
}

void require_four(const EntropyVector& h) {
  if (h.variables() != 4)
    fail(ErrorKind::kUnsupported, "Ingleton functionals need n = 4, got n = " +
                                      std::to_string(h.variables()));
}

double entry(const EntropyVector& h, std::uint32_t mask) {
  return mask == 0 ? 0.0 : h[Subset(mask)];
}

// Shared by ray_projection and RayDistance. Returns |x - a*y| / |a*y|.
double residual_ratio(const EntropyVector& x, const EntropyVector& y, double yy) {
  const double xy = x.dot(y);
  const double xx = x.dot(x);
  if (!(xy > kOrthogonalityThreshold * std::sqrt(xx * yy)))
    fail(ErrorKind::kUndefinedDistance,
         "normalized distance undefined: rays are orthogonal or opposed");
  const double a = xy / yy;
  const auto xs = x.values();
  const auto ys = y.values();
  double r2 = 0.0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    const double d = xs[k] - a * ys[k];
    r2 += d * d;
  }
  return std::sqrt(r2) / (a * std::sqrt(yy));
}

}  // namespace

RayProjection ray_projection(const EntropyVector& x, const EntropyVector& y) {
  require_same_dimension(x, y);
  if (x.is_zero() || y.is_zero())
    fail(ErrorKind::kUndefinedDistance, "normalized distance undefined for the zero vector");
  const double xy = x.dot(y);
  const double yy = y.dot(y);
  if (!(xy > kOrthogonalityThreshold * x.norm() * y.norm()))
    fail(ErrorKind::kUndefinedDistance,
         "normalized distance undefined: rays are orthogonal or opposed");
  const double a = xy / yy;
  return {a, y * a};
}

double normalized_distance(const EntropyVector& x, const EntropyVector& y) {
  require_same_dimension(x, y);
  if (x.is_zero() || y.is_zero())
    fail(ErrorKind::kUndefinedDistance, "normalized distance undefined for the zero vector");
  return residual_ratio(x, y, y.dot(y));
}

RayDistance::RayDistance(const EntropyVector& target)
    : target_(target), target_sq_(target.dot(target)) {
  if (target.is_zero()) fail(ErrorKind::kInvalidArgument, "target ray is zero");
}

double RayDistance::operator()(const EntropyVector& x) const {
  require_same_dimension(x, target_);
  if (x.is_zero())
    fail(ErrorKind::kUndefinedDistance, "normalized distance undefined for the zero vector");
  return residual_ratio(x, target_, target_sq_);
}

PolymatroidReport check_polymatroid(const EntropyVector& h, double tol) {
  PolymatroidReport report;
  const int n = h.variables();
  const std::uint32_t all = Subset::full(n).mask();
  auto record = [&](std::string what, double slack) {
    if (slack < -tol || std::isnan(slack)) {
      report.polymatroid = false;
      report.violations.push_back({std::move(what), slack});
    }
  };
  for (const double v : h.values())
    if (!std::isfinite(v)) record("finite entries", std::numeric_limits<double>::quiet_NaN());

  for (int i = 1; i <= n; ++i) {
    const std::uint32_t rest = all & ~(1u << (i - 1));
    const double slack = h.full() - entry(h, rest);
    record("h" + Subset(all).digits() + " >= h" +
               (rest ? Subset(rest).digits() : std::string("0")),
           slack);
  }
  for (int i = 1; i <= n; ++i) {
    for (int j = i + 1; j <= n; ++j) {
      const std::uint32_t bi = 1u << (i - 1), bj = 1u << (j - 1);
      const std::uint32_t others = all & ~(bi | bj);
      // Every K within the remaining variables, including the empty set.
      for (std::uint32_t k = others;; k = (k - 1) & others) {
        const double slack =
            entry(h, k | bi) + entry(h, k | bj) - entry(h, k | bi | bj) - entry(h, k);
        std::string what = "I(" + std::to_string(i) + ";" + std::to_string(j);
        if (k) what += "|" + Subset(k).digits();
        record(what + ") >= 0", slack);
        if (k == 0) break;
      }
    }
  }
  return report;
}

bool is_polymatroid(const EntropyVector& h, double tol) {
  return check_polymatroid(h, tol).polymatroid;
}

std::array<VariablePair, 6> all_variable_pairs() {
  return {{{1, 2}, {1, 3}, {1, 4}, {2, 3}, {2, 4}, {3, 4}}};
}

double ingleton_delta(const EntropyVector& h, VariablePair pair) {
  require_four(h);
  const int c = pair.first, d = pair.second;
  if (c == d || c < 1 || c > 4 || d < 1 || d > 4)
    fail(ErrorKind::kInvalidArgument, "variable pair must be two distinct indices in 1..4");
  int rest[2], k = 0;
  for (int v = 1; v <= 4; ++v)
    if (v != c && v != d) rest[k++] = v;
  const int a = rest[0], b = rest[1];
  auto H = [&](std::initializer_list<int> vars) { return h[Subset::of(vars)]; };
  return H({a, b}) + H({a, c}) + H({b, c}) + H({a, d}) + H({b, d}) - H({a}) - H({b}) -
         H({a, b, c}) - H({a, b, d}) - H({c, d});
}

double ingleton_score(const EntropyVector& h, VariablePair pair) {
  const double delta = ingleton_delta(h, pair);
  if (!(h.full() > 0.0))
    fail(ErrorKind::kInvalidArgument, "Ingleton score needs h_N > 0");
  return delta / h.full();
}

double violation_index(const EntropyVector& h, VariablePair pair) {
  const double delta = ingleton_delta(h, pair);
  if (h.is_zero()) fail(ErrorKind::kInvalidArgument, "violation index of the zero vector");
  return -delta / h.norm();
}

double min_ingleton_score(const EntropyVector& h) {
  double best = std::numeric_limits<double>::infinity();
  for (const auto p : all_variable_pairs()) best = std::min(best, ingleton_score(h, p));
  return best;
}

Hyperplane::Hyperplane(int n, std::vector<double> g, HyperplaneScaling scaling)
    : n_(n), g_(std::move(g)) {
  if (n < 1 || n > kMaxVariables || g_.size() != subset_count(n))
    fail(ErrorKind::kInvalidArgument, "hyperplane coefficient vector has the wrong length");
  double big = 0.0;
  for (const double v : g_) {
    if (!std::isfinite(v)) fail(ErrorKind::kInvalidArgument, "non-finite hyperplane coefficient");
    big = std::max(big, std::abs(v));
  }
  if (big == 0.0) fail(ErrorKind::kInvalidArgument, "hyperplane coefficients are all zero");
  if (scaling == HyperplaneScaling::kAsGiven) return;
  double scale = 1.0 / big;
  for (const double v : g_) {
    if (std::abs(v) * scale > kSignZero) {
      if (v > 0) scale = -scale;
      break;
    }
  }
  for (double& v : g_) v *= scale;
}

double Hyperplane::value(const EntropyVector& h) const {
  if (h.variables() != n_)
    fail(ErrorKind::kInvalidArgument, "hyperplane and vector dimensions differ");
  const auto hv = h.values();
  double s = 0.0;
  for (std::size_t k = 0; k < g_.size(); ++k) s += g_[k] * hv[k];
  return s;
}

bool Hyperplane::same_hyperplane(const Hyperplane& other, double tol) const {
  if (other.n_ != n_) return false;
  double na = 0.0, nb = 0.0, dot = 0.0;
  for (std::size_t k = 0; k < g_.size(); ++k) {
    na += g_[k] * g_[k];
    nb += other.g_[k] * other.g_[k];
    dot += g_[k] * other.g_[k];
  }
  const double sign = dot < 0 ? -1.0 : 1.0;
  const double sa = 1.0 / std::sqrt(na), sb = sign / std::sqrt(nb);
  for (std::size_t k = 0; k < g_.size(); ++k)
    if (std::abs(g_[k] * sa - other.g_[k] * sb) > tol) return false;
  return true;
}

double hyperplane_value(const Hyperplane& g, const EntropyVector& h) { return g.value(h); }

double hyperplane_score(const Hyperplane& g, const EntropyVector& h) {
  const double v = g.value(h);
  if (h.full() == 0.0) fail(ErrorKind::kInvalidArgument, "hyperplane score needs h_N != 0");
  return v / h.full();
}

Hyperplane hyperplane_through(std::span<const EntropyVector> points) {
  if (points.empty()) fail(ErrorKind::kDegenerateInput, "no points given");
  const int n = points.front().variables();
  const std::size_t dim = subset_count(n);
  if (points.size() != dim - 1)
    fail(ErrorKind::kInvalidArgument, "need exactly " + std::to_string(dim - 1) +
                                          " points, got " + std::to_string(points.size()));
  Eigen::MatrixXd a(static_cast<Eigen::Index>(dim - 1), static_cast<Eigen::Index>(dim));
  for (std::size_t r = 0; r < points.size(); ++r) {
    if (points[r].variables() != n)
      fail(ErrorKind::kInvalidArgument, "points have different dimensions");
    const double norm = points[r].norm();
    if (norm == 0.0) fail(ErrorKind::kDegenerateInput, "zero point");
    // Rows are scaled to unit norm so the rank test is not dominated by
    // long vectors.
    for (std::size_t c = 0; c < dim; ++c)
      a(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) = points[r].at(c) / norm;
  }
  Eigen::JacobiSVD<Eigen::MatrixXd> svd(a, Eigen::ComputeFullV);
  const auto& s = svd.singularValues();
  const double smax = s(0);
  Eigen::Index rank = 0;
  for (Eigen::Index k = 0; k < s.size(); ++k)
    if (s(k) > kRankTolerance * smax) ++rank;
  if (rank != static_cast<Eigen::Index>(dim - 1))
    fail(ErrorKind::kDegenerateInput, "points span a subspace of dimension " +
                                          std::to_string(rank) + ", need " +
                                          std::to_string(dim - 1));
  const Eigen::VectorXd g = svd.matrixV().col(static_cast<Eigen::Index>(dim - 1));
  Hyperplane out(n, std::vector<double>(g.data(), g.data() + g.size()));

  const double gnorm = g.norm();
  for (std::size_t r = 0; r < points.size(); ++r) {
    double dot = 0.0;
    for (std::size_t c = 0; c < dim; ++c) dot += g(static_cast<Eigen::Index>(c)) * points[r].at(c);
    if (std::abs(dot) > kRankTolerance * gnorm * points[r].norm())
      fail(ErrorKind::kDegenerateInput, "null-space residual too large for point " +
                                            std::to_string(r + 1));
  }
  return out;
}

TightDecomposition tighten(const EntropyVector& h) {
  if (!is_polymatroid(h, kTightenTolerance))
    fail(ErrorKind::kInvalidArgument, "tighten needs a polymatroid");
  const int n = h.variables();
  const std::uint32_t all = Subset::full(n).mask();
  std::vector<double> slack(static_cast<std::size_t>(n));
  for (int i = 1; i <= n; ++i)
    slack[static_cast<std::size_t>(i - 1)] = h.full() - entry(h, all & ~(1u << (i - 1)));
  EntropyVector modular = EntropyVector::zeros(n);
  for (std::size_t pos = 0; pos < h.size(); ++pos) {
    const Subset s = Subset::at_position(pos);
    double v = 0.0;
    for (int i = 1; i <= n; ++i)
      if (s.contains(i)) v += slack[static_cast<std::size_t>(i - 1)];
    modular.at(pos) = v;
  }
  EntropyVector tight = h - modular;
  return {std::move(modular), std::move(tight)};
}

double transformed_tight_score(const EntropyVector& h, const TightTransform& transform,
                               VariablePair pair) {
  if (!transform) fail(ErrorKind::kInvalidArgument, "no transform supplied");
  const EntropyVector t = transform(tighten(h).tight);
  if (t.variables() != h.variables())
    fail(ErrorKind::kInvalidArgument, "transform changed the dimension");
  return ingleton_score(t, pair);
}

const char* to_string(RayNormalization mode) {
  switch (mode) {
    case RayNormalization::kUnitNorm: return "unit-norm";
    case RayNormalization::kLastCoordinateOne: return "last-coordinate-one";
  }
  return "?";
}

EntropyVector normalize_ray(const EntropyVector& ray, RayNormalization mode) {
  if (ray.is_zero()) fail(ErrorKind::kInvalidArgument, "cannot normalize the zero ray");
  if (mode == RayNormalization::kUnitNorm) return ray * (1.0 / ray.norm());
  if (!(ray.full() > 0.0))
    fail(ErrorKind::kInvalidArgument, "last-coordinate normalization needs h_N > 0");
  return ray * (1.0 / ray.full());
}

CentroidRay centroid_ray(const RaySet& rays, RayNormalization mode) {
  if (rays.empty()) fail(ErrorKind::kInvalidArgument, "centroid of an empty ray set");
  EntropyVector sum = EntropyVector::zeros(rays.variables());
  for (const auto& r : rays.rays()) sum = sum + normalize_ray(r, mode);
  return {sum * (1.0 / static_cast<double>(rays.size())), mode};
}

}  // namespace entvec
