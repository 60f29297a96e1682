#pragma once

#include <array>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "entvec/core.hpp"
#include "entvec/ray_set.hpp"

namespace entvec {

// Closest point to x on the open ray {a y : a > 0}.
struct RayProjection {
  double scale;         // a* = (x.y) / (y.y)
  EntropyVector point;  // a* y
};

// Throws undefined-distance when x.y <= 1e-15 |x||y|.
RayProjection ray_projection(const EntropyVector& x, const EntropyVector& y);

// |x - y'| / |y'| with y' the projection of x onto the ray of y; this is the
// tangent of the angle between the two rays.
double normalized_distance(const EntropyVector& x, const EntropyVector& y);

// Normalized distance against a fixed target with the target's norm cached.
// Used in the search inner loop.
class RayDistance {
 public:
  explicit RayDistance(const EntropyVector& target);
  double operator()(const EntropyVector& x) const;
  const EntropyVector& target() const { return target_; }

 private:
  EntropyVector target_;
  double target_sq_;
};

struct InequalityViolation {
  std::string inequality;  // e.g. "I(1;2|3) >= 0" or "h1234 >= h123"
  double slack;            // negative
};

struct PolymatroidReport {
  bool polymatroid = true;
  std::vector<InequalityViolation> violations;
  explicit operator bool() const { return polymatroid; }
};

// Checks the elemental Shannon inequalities (monotonicity h_N >= h_{N-i},
// conditional mutual informations I(i;j|K) >= 0) with slack >= -tol.
PolymatroidReport check_polymatroid(const EntropyVector& h, double tol);
bool is_polymatroid(const EntropyVector& h, double tol);

// Pair of variables in the conditioning role of the Ingleton expression; the
// default (3,4) gives
//   h12 + h13 + h23 + h14 + h24 - h1 - h2 - h123 - h124 - h34.
struct VariablePair {
  int first = 3;
  int second = 4;
};

std::array<VariablePair, 6> all_variable_pairs();

double ingleton_delta(const EntropyVector& h, VariablePair pair = {});
// Delta / h_N
double ingleton_score(const EntropyVector& h, VariablePair pair = {});
// -Delta / |h|
double violation_index(const EntropyVector& h, VariablePair pair = {});
// Smallest score over the six pairs. Never used as a default.
double min_ingleton_score(const EntropyVector& h);

enum class HyperplaneScaling { kNormalize, kAsGiven };

// Hyperplane {h : g.h = 0} through the origin. Normalized form divides g by
// its largest-magnitude coefficient and flips the sign so the first nonzero
// coefficient is negative.
class Hyperplane {
 public:
  Hyperplane(int n, std::vector<double> g,
             HyperplaneScaling scaling = HyperplaneScaling::kNormalize);

  int variables() const { return n_; }
  std::span<const double> coefficients() const { return g_; }
  double coefficient(Subset s) const { return g_[s.position()]; }

  // g.h
  double value(const EntropyVector& h) const;

  // True when the two coefficient vectors are parallel within `tol` after
  // unit normalization (either orientation).
  bool same_hyperplane(const Hyperplane& other, double tol) const;

 private:
  int n_;
  std::vector<double> g_;
};

double hyperplane_value(const Hyperplane& g, const EntropyVector& h);
// (g.h) / h_N
double hyperplane_score(const Hyperplane& g, const EntropyVector& h);

// Hyperplane through 2^n - 2 points spanning a subspace of codimension one.
// Throws degenerate-input when the rank falls short (tolerance 1e-8).
Hyperplane hyperplane_through(std::span<const EntropyVector> points);

struct TightDecomposition {
  EntropyVector modular;
  EntropyVector tight;
};

// h_mod(A) = sum over i in A of (h_N - h_{N - i}); h_ti = h - h_mod.
// Throws invalid-argument when h is not a polymatroid (tol 1e-9).
TightDecomposition tighten(const EntropyVector& h);

// Hook for a linear transformation of tight polymatroids; the library ships
// no implementation.
using TightTransform = std::function<EntropyVector(const EntropyVector&)>;
double transformed_tight_score(const EntropyVector& h, const TightTransform& transform,
                               VariablePair pair = {});

enum class RayNormalization { kUnitNorm, kLastCoordinateOne };

const char* to_string(RayNormalization mode);

struct CentroidRay {
  EntropyVector ray;
  RayNormalization normalization;
};

EntropyVector normalize_ray(const EntropyVector& ray, RayNormalization mode);

// Mean of the normalized representatives of the rays.
CentroidRay centroid_ray(const RaySet& rays,
                         RayNormalization mode = RayNormalization::kUnitNorm);

}  // namespace entvec
