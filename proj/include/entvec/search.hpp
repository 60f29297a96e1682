#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "entvec/core.hpp"
#include "entvec/geometry.hpp"

namespace entvec {

enum class Objective { kDistance, kIngletonMin, kViolationMax, kCustom };

const char* to_string(Objective o);  // "dnorm", "ingleton", "violation", "custom"
Objective objective_from_string(const std::string& s);

// Internally every objective is minimized; violation-max minimizes -iota.
bool is_maximization(Objective o);

enum class Termination { kDistanceReached, kStalled, kLExhausted };

const char* to_string(Termination t);  // "distance-reached", "stalled", "L-exhausted"
Termination termination_from_string(const std::string& s);

struct HyperplaneGuidance {
  std::vector<Hyperplane> hyperplanes;
  // Redraw threshold on |s_H|; infinity redraws after every accepted move.
  double eta = 1e-4;
};

struct Waypoint {
  EntropyVector target;
  double delta = 1e-6;
};

struct SearchConfig {
  double delta = 1e-6;
  std::uint64_t L = 1'000'000;
  std::uint64_t M = 100'000;
  double epsilon = 1.0;
  std::uint64_t seed = 0;
  Objective objective = Objective::kDistance;
  std::optional<EntropyVector> target;
  std::vector<Waypoint> waypoints;
  std::optional<HyperplaneGuidance> guidance;
  // Minimized. Only used with Objective::kCustom.
  std::function<double(const EntropyVector&)> custom;
  // Non-distance objectives: stop once an accepted move improves the
  // objective by less than this.
  std::optional<double> improvement_tolerance;
  std::uint64_t trace_stride = 1;
  // Pair used by the Ingleton objectives and by the trace's score column.
  VariablePair pair;

  // Throws invalid-argument.
  void validate() const;
};

struct TraceEntry {
  std::uint64_t accepted_move = 0;
  std::uint64_t proposals = 0;  // total proposals so far
  double objective = 0.0;       // in the objective's own sense (iota, not -iota)
  std::optional<double> ingleton;
  double perturbation_size = 0.0;  // total variation of the accepted move
  int hyperplane = -1;             // active guidance hyperplane, -1 if none
  int leg = 0;                     // waypoint leg
};

struct PerturbationStats {
  std::uint64_t count = 0;
  double min = 0.0;
  double max = 0.0;
  double mean = 0.0;

  void add(double size);
};

struct SearchOutcome {
  JointPmf final_pmf;
  EntropyVector final_h;
  double final_objective = 0.0;
  std::optional<double> final_distance;  // to the final target, when there is one
  std::uint64_t accepted_moves = 0;
  std::uint64_t proposals = 0;
  Termination termination = Termination::kStalled;
  std::vector<TraceEntry> trace;
  PerturbationStats perturbation;
  std::vector<std::string> warnings;
};

SearchOutcome nearest_point_search(const JointPmf& start, const SearchConfig& config);
SearchOutcome objective_search(const JointPmf& start, const SearchConfig& config);
SearchOutcome hyperplane_guided_search(const JointPmf& start, const SearchConfig& config);
SearchOutcome waypoint_search(const JointPmf& start, const SearchConfig& config);

// Dispatches on the config: waypoints, then guidance, then objective.
SearchOutcome run_search(const JointPmf& start, const SearchConfig& config);

}  // namespace entvec
