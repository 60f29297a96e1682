#include "entvec/search.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "entvec/error.hpp"
#include "entvec/kernels.hpp"
#include "entvec/rng.hpp"

namespace entvec {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();
constexpr double kTargetCheckTolerance = 1e-6;
// Targets violating a Shannon inequality by more than this fraction of their
// largest coordinate are rejected; smaller violations only warn.
constexpr double kTargetRejectFraction = 1e-2;

// Per-leg behaviour plugged into the common descent loop. Scores are
// minimized.
class Leg {
 public:
  virtual ~Leg() = default;
  virtual double score(const EntropyVector& h) const = 0;
  // Extra acceptance condition, checked on the exact entropy vector after a
  // strict score improvement.
  virtual bool admits(const EntropyVector&) const { return true; }
  virtual void accepted(const EntropyVector&, SearchRng&) {}
  virtual bool finished(double previous, double current) const = 0;
  // Value reported in the trace and the outcome.
  virtual double report(double score) const { return score; }
  virtual int hyperplane() const { return -1; }
};

class DistanceLeg : public Leg {
 public:
  DistanceLeg(const EntropyVector& target, double delta) : distance_(target), delta_(delta) {}

  double score(const EntropyVector& h) const override {
    try {
      return distance_(h);
    } catch (const Error&) {
      return kInf;
    }
  }
  bool finished(double, double current) const override { return current <= delta_; }

  // Throws undefined-distance instead of scoring infinity.
  double strict_score(const EntropyVector& h) const { return distance_(h); }
  double delta() const { return delta_; }

 private:
  RayDistance distance_;
  double delta_;
};

class GuidedLeg : public DistanceLeg {
 public:
  GuidedLeg(const EntropyVector& target, double delta, const HyperplaneGuidance& guidance,
            const EntropyVector& start, SearchRng& rng)
      : DistanceLeg(target, delta), guidance_(guidance) {
    const std::size_t count = guidance_.hyperplanes.size();
    active_ = count == 1 ? 0 : static_cast<int>(rng.index(count));
    update(start, rng);
  }

  bool admits(const EntropyVector& h) const override {
    if (active_ < 0) return true;
    return abs_score(h) < current_abs_;
  }

  void accepted(const EntropyVector& h, SearchRng& rng) override { update(h, rng); }

  int hyperplane() const override { return active_; }

 private:
  double abs_score(const EntropyVector& h) const {
    if (!(h.full() > 0.0)) return kInf;
    return std::abs(hyperplane_score(guidance_.hyperplanes[static_cast<std::size_t>(active_)], h));
  }

  void update(const EntropyVector& h, SearchRng& rng) {
    if (active_ < 0) return;
    current_abs_ = abs_score(h);
    if (!(current_abs_ < guidance_.eta)) return;
    const std::size_t count = guidance_.hyperplanes.size();
    if (count == 1) {
      active_ = -1;
      return;
    }
    std::size_t next = rng.index(count - 1);
    if (next >= static_cast<std::size_t>(active_)) ++next;
    active_ = static_cast<int>(next);
    current_abs_ = abs_score(h);
  }

  const HyperplaneGuidance& guidance_;
  int active_ = -1;
  double current_abs_ = kInf;
};

class ObjectiveLeg : public Leg {
 public:
  explicit ObjectiveLeg(const SearchConfig& config) : config_(config) {}

  double score(const EntropyVector& h) const override {
    switch (config_.objective) {
      case Objective::kIngletonMin:
        return h.full() > 0.0 ? ingleton_score(h, config_.pair) : kInf;
      case Objective::kViolationMax:
        return h.is_zero() ? kInf : -violation_index(h, config_.pair);
      case Objective::kCustom: {
        const double v = config_.custom(h);
        return std::isnan(v) ? kInf : v;
      }
      case Objective::kDistance:
        break;
    }
    fail(ErrorKind::kInvalidArgument, "distance objective in objective search");
  }

  bool finished(double previous, double current) const override {
    return config_.improvement_tolerance && previous - current < *config_.improvement_tolerance;
  }

  double report(double score) const override {
    return is_maximization(config_.objective) ? -score : score;
  }

 private:
  const SearchConfig& config_;
};

std::optional<double> trace_ingleton(const EntropyVector& h, VariablePair pair) {
  if (h.variables() != 4 || !(h.full() > 0.0)) return std::nullopt;
  return ingleton_score(h, pair);
}

class Runner {
 public:
  Runner(const JointPmf& start, const SearchConfig& config)
      : config_(config), state_(start), rng_(config.seed) {
    if (start.size() < 2)
      fail(ErrorKind::kInvalidArgument, "search needs at least two outcomes");
  }

  SearchRng& rng() { return rng_; }
  const kernels::IncrementalEntropy& state() const { return state_; }
  SearchOutcome& outcome() { return out_; }

  void record_start(const Leg& leg, int leg_index) {
    if (!out_.trace.empty()) return;
    TraceEntry e;
    e.objective = leg.report(leg.score(state_.current()));
    e.ingleton = trace_ingleton(state_.current(), config_.pair);
    e.hyperplane = leg.hyperplane();
    e.leg = leg_index;
    out_.trace.push_back(e);
  }

  // One descent run. Returns the final score of the leg.
  double descend(Leg& leg, std::uint64_t L, int leg_index, bool check_first) {
    double current = leg.score(state_.current());
    if (check_first && leg.finished(kInf, current)) {
      out_.termination = Termination::kDistanceReached;
      return current;
    }
    const std::size_t outcomes = state_.mass().size();
    const auto mass = state_.mass();
    EntropyVector candidate = state_.current();
    for (std::uint64_t moves = 0; moves < L; ++moves) {
      std::uint64_t rejected = 0;
      bool moved = false;
      while (rejected < config_.M) {
        const auto [i, j] = rng_.distinct_pair(outcomes);
        const double lambda = rng_.closed_unit(config_.epsilon);
        ++out_.proposals;
        const double mi = mass[i], mj = mass[j];
        const double pooled = mi + mj;
        const double ni = lambda * pooled;
        const double nj = pooled - ni;
        if (pooled == 0.0 || (ni == mi && nj == mj)) {
          ++rejected;
          continue;
        }
        state_.propose(i, j, ni, nj, candidate);
        if (!(leg.score(candidate) < current)) {
          ++rejected;
          continue;
        }
        // Confirm against the exact recomputation so every reported value is
        // what entropy_vector() gives for the committed pmf.
        state_.commit(i, j, ni, nj);
        const double exact = leg.score(state_.current());
        if (!(exact < current) || !leg.admits(state_.current())) {
          state_.commit(i, j, mi, mj);
          ++rejected;
          continue;
        }
        const double previous = current;
        current = exact;
        ++out_.accepted_moves;
        const double size = 2.0 * std::abs(ni - mi);
        out_.perturbation.add(size);
        if (out_.accepted_moves % config_.trace_stride == 0) {
          TraceEntry e;
          e.accepted_move = out_.accepted_moves;
          e.proposals = out_.proposals;
          e.objective = leg.report(current);
          e.ingleton = trace_ingleton(state_.current(), config_.pair);
          e.perturbation_size = size;
          e.hyperplane = leg.hyperplane();
          e.leg = leg_index;
          out_.trace.push_back(e);
        }
        leg.accepted(state_.current(), rng_);
        if (leg.finished(previous, current)) {
          out_.termination = Termination::kDistanceReached;
          return current;
        }
        moved = true;
        break;
      }
      if (!moved) {
        out_.termination = Termination::kStalled;
        return current;
      }
    }
    out_.termination = Termination::kLExhausted;
    return current;
  }

  SearchOutcome finish(const Leg& leg, double score) {
    out_.final_pmf = state_.pmf();
    out_.final_h = state_.current();
    out_.final_objective = leg.report(score);
    return std::move(out_);
  }

 private:
  const SearchConfig& config_;
  kernels::IncrementalEntropy state_;
  SearchRng rng_;
  SearchOutcome out_{JointPmf::uniform(AlphabetSpec({2})), {}, 0.0, {}, 0, 0,
                     Termination::kStalled, {}, {}, {}};
};

void check_target(const EntropyVector& target, const JointPmf& start,
                  std::vector<std::string>& warnings) {
  if (target.variables() != start.spec().variables())
    fail(ErrorKind::kInvalidArgument, "target has n = " + std::to_string(target.variables()) +
                                          " but the start pmf has n = " +
                                          std::to_string(start.spec().variables()));
  if (target.is_zero()) fail(ErrorKind::kInvalidArgument, "target ray is zero");
  const auto report = check_polymatroid(target, kTargetCheckTolerance);
  if (report) return;
  double scale = 0.0;
  for (const double v : target.values()) scale = std::max(scale, std::abs(v));
  double worst = 0.0;
  std::string which;
  for (const auto& v : report.violations)
    if (!(v.slack >= worst)) {
      worst = v.slack;
      which = v.inequality;
    }
  std::ostringstream msg;
  msg << "target violates " << which << " by " << -worst;
  if (!(worst >= -kTargetRejectFraction * scale))
    fail(ErrorKind::kInvalidArgument, msg.str() + "; not a polymatroid");
  warnings.push_back(msg.str());
}

void require(bool ok, const std::string& what) {
  if (!ok) fail(ErrorKind::kInvalidArgument, what);
}

}  // namespace

const char* to_string(Objective o) {
  switch (o) {
    case Objective::kDistance: return "dnorm";
    case Objective::kIngletonMin: return "ingleton";
    case Objective::kViolationMax: return "violation";
    case Objective::kCustom: return "custom";
  }
  return "?";
}

Objective objective_from_string(const std::string& s) {
  if (s == "dnorm") return Objective::kDistance;
  if (s == "ingleton") return Objective::kIngletonMin;
  if (s == "violation") return Objective::kViolationMax;
  if (s == "custom") return Objective::kCustom;
  fail(ErrorKind::kInvalidArgument, "unknown objective '" + s + "'");
}

bool is_maximization(Objective o) { return o == Objective::kViolationMax; }

const char* to_string(Termination t) {
  switch (t) {
    case Termination::kDistanceReached: return "distance-reached";
    case Termination::kStalled: return "stalled";
    case Termination::kLExhausted: return "L-exhausted";
  }
  return "?";
}

Termination termination_from_string(const std::string& s) {
  if (s == "distance-reached") return Termination::kDistanceReached;
  if (s == "stalled") return Termination::kStalled;
  if (s == "L-exhausted") return Termination::kLExhausted;
  fail(ErrorKind::kInvalidArgument, "unknown termination '" + s + "'");
}

void PerturbationStats::add(double size) {
  if (count == 0) {
    min = max = size;
  } else {
    min = std::min(min, size);
    max = std::max(max, size);
  }
  ++count;
  mean += (size - mean) / static_cast<double>(count);
}

void SearchConfig::validate() const {
  require(std::isfinite(delta) && delta >= 0.0, "delta must be finite and >= 0");
  require(L >= 1, "L must be >= 1");
  require(M >= 1, "M must be >= 1");
  require(epsilon > 0.0 && epsilon <= 1.0, "epsilon must lie in (0, 1]");
  require(trace_stride >= 1, "trace stride must be >= 1");
  if (improvement_tolerance)
    require(*improvement_tolerance >= 0.0, "improvement tolerance must be >= 0");
  if (objective == Objective::kDistance) {
    require(target.has_value() || !waypoints.empty(), "distance objective needs a target");
  } else {
    require(!target, "objective '" + std::string(to_string(objective)) + "' takes no target");
    require(waypoints.empty(), "waypoints need the distance objective");
    require(!guidance, "hyperplane guidance needs the distance objective");
  }
  if (objective == Objective::kCustom) require(static_cast<bool>(custom), "custom objective missing");
  for (const auto& w : waypoints)
    require(std::isfinite(w.delta) && w.delta >= 0.0, "waypoint delta must be >= 0");
  if (guidance) {
    require(waypoints.empty(), "waypoints and hyperplane guidance cannot be combined");
    require(!guidance->hyperplanes.empty(), "hyperplane guidance needs at least one hyperplane");
    require(guidance->eta > 0.0, "eta must be > 0");
    if (target)
      for (const auto& g : guidance->hyperplanes)
        require(g.variables() == target->variables(), "hyperplane dimension differs from target");
  }
  if (target && !waypoints.empty())
    for (const auto& w : waypoints)
      require(w.target.variables() == target->variables(), "waypoint dimension differs");
}

SearchOutcome nearest_point_search(const JointPmf& start, const SearchConfig& config) {
  config.validate();
  require(config.objective == Objective::kDistance && config.target,
          "nearest-point search needs the distance objective and a target");
  std::vector<std::string> warnings;
  check_target(*config.target, start, warnings);
  Runner run(start, config);
  run.outcome().warnings = std::move(warnings);
  DistanceLeg leg(*config.target, config.delta);
  leg.strict_score(run.state().current());
  run.record_start(leg, 0);
  const double d = run.descend(leg, config.L, 0, true);
  auto out = run.finish(leg, d);
  out.final_distance = d;
  return out;
}

SearchOutcome objective_search(const JointPmf& start, const SearchConfig& config) {
  config.validate();
  require(config.objective != Objective::kDistance,
          "objective search needs a non-distance objective");
  Runner run(start, config);
  ObjectiveLeg leg(config);
  if (!std::isfinite(leg.score(run.state().current())))
    fail(ErrorKind::kInvalidArgument, "objective is not finite at the start pmf");
  run.record_start(leg, 0);
  const double s = run.descend(leg, config.L, 0, false);
  return run.finish(leg, s);
}

SearchOutcome hyperplane_guided_search(const JointPmf& start, const SearchConfig& config) {
  config.validate();
  require(config.objective == Objective::kDistance && config.target && config.guidance,
          "guided search needs the distance objective, a target and hyperplanes");
  std::vector<std::string> warnings;
  check_target(*config.target, start, warnings);
  Runner run(start, config);
  run.outcome().warnings = std::move(warnings);
  GuidedLeg leg(*config.target, config.delta, *config.guidance, run.state().current(), run.rng());
  leg.strict_score(run.state().current());
  run.record_start(leg, 0);
  const double d = run.descend(leg, config.L, 0, true);
  auto out = run.finish(leg, d);
  out.final_distance = d;
  return out;
}

SearchOutcome waypoint_search(const JointPmf& start, const SearchConfig& config) {
  config.validate();
  require(!config.waypoints.empty(), "waypoint search needs at least one waypoint");
  require(config.objective == Objective::kDistance, "waypoint search needs the distance objective");
  if (config.target) {
    const auto& last = config.waypoints.back().target;
    require(last.variables() == config.target->variables() &&
                normalized_distance(last, *config.target) <= 1e-12,
            "the last waypoint must be the target");
  }
  std::vector<std::string> warnings;
  for (const auto& w : config.waypoints) check_target(w.target, start, warnings);
  Runner run(start, config);
  run.outcome().warnings = std::move(warnings);
  double d = 0.0;
  std::optional<DistanceLeg> leg;
  for (std::size_t k = 0; k < config.waypoints.size(); ++k) {
    leg.emplace(config.waypoints[k].target, config.waypoints[k].delta);
    leg->strict_score(run.state().current());
    run.record_start(*leg, 0);
    d = run.descend(*leg, config.L, static_cast<int>(k), true);
  }
  auto out = run.finish(*leg, d);
  out.final_distance = d;
  return out;
}

SearchOutcome run_search(const JointPmf& start, const SearchConfig& config) {
  if (!config.waypoints.empty()) return waypoint_search(start, config);
  if (config.guidance) return hyperplane_guided_search(start, config);
  if (config.objective == Objective::kDistance) return nearest_point_search(start, config);
  return objective_search(start, config);
}

}  // namespace entvec
