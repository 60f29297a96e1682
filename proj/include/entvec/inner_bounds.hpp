#pragma once

#include <cstdint>
#include <vector>

#include "entvec/batch.hpp"
#include "entvec/core.hpp"
#include "entvec/ray_set.hpp"
#include "entvec/search.hpp"

namespace entvec {

inline constexpr std::size_t kPyramidBaseRays = 14;
inline constexpr double kGridDedupTolerance = 1e-9;

// Level 1: the apex ray followed by the base rays. Level k >= 2: apex plus
// the sum of each (k-1)-subset of base rays, subsets in lexicographic order.
// Rays are summed as given. Rays that coincide after unit
// normalization (l-infinity tolerance 1e-9) are kept once.
// Labels: "G1:v", "G1:b3", "G3:v+b2+b7" (base rays numbered from 1).
RaySet generate_grid(const EntropyVector& vamos, const RaySet& base, int level);

// Rays whose smallest Ingleton expression over the six pairs is below -tol.
RaySet filter_ingleton_violating(const RaySet& points, double tol);

// Start pmf near the centroid ray of `base`: a distance search from the
// uniform pmf toward the unit-norm centroid, stopped once within `delta`.
// A start taken from a fully converged run tends to sit on the boundary of
// the alphabet-constrained region and traps later searches.
inline constexpr double kCentroidStartDelta = 0.03;
inline constexpr std::uint64_t kCentroidStartSeed = 1;

JointPmf centroid_start_pmf(const RaySet& base, const AlphabetSpec& alphabet,
                            double delta = kCentroidStartDelta,
                            std::uint64_t seed = kCentroidStartSeed);

struct NearestPoints {
  RaySet points;                     // final entropy vectors of successful searches
  std::vector<BatchResult> results;  // one per target, in target order
};

// One search per target using `search_template` with its target replaced.
// Failed targets are left out of `points` and keep their error in `results`.
NearestPoints nearest_points_for_rayset(const RaySet& targets, const JointPmf& start,
                                        const SearchConfig& search_template,
                                        std::uint64_t master_seed, int parallelism = 0);

}  // namespace entvec
