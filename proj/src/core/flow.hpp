#pragma once

#include "dop853.hpp"
#include "types.hpp"

#include <functional>
#include <limits>
#include <optional>
#include <vector>

namespace sectionscope {

enum class Chart { kRotating, kMoserEarth, kMoserMoon };

const char* chart_name(Chart c);
inline bool is_moser(Chart c) { return c != Chart::kRotating; }
Primary chart_primary(Chart c);  // Moser charts only
Chart moser_chart(Primary p);

struct IntegratorConfig {
  double rel_tol = 1e-12;
  double abs_tol = 1e-12;
  double max_step = 0.0;  ///< 0: unbounded
  double collision_switch_radius = 0.05;
  double max_time = 1e3;
  bool switching = true;

  /// Throws kInvalidArgument: tolerances in (0, 1e-3], radius in (0, 0.2], max_time > 0.
  void validate() const;
};

/// A phase point in one chart. Rotating: y = (q, p). Moser: y = (xi, eta).
/// t is always physical time.
struct FlowPoint {
  Chart chart = Chart::kRotating;
  VecX y;
  double t = 0.0;
};

struct TrajectorySample {
  double t = 0.0;
  Chart chart = Chart::kRotating;
  VecX state;                      ///< 6 or 8 components
  double energy = 0.0;             ///< H, NaN on the collision fiber
  double constraint_residual = 0;  ///< Moser samples, before projection
};

/// Dense output of one accepted step. For Moser charts the interpolated
/// vector carries physical time as its last (9th) component.
struct TrajectorySegment {
  Chart chart = Chart::kRotating;
  DenseStep dense;
  double end = 0.0;  ///< chart time where the trajectory leaves the segment
};

struct Trajectory {
  double energy = 0.0;  ///< H of the start
  std::vector<TrajectorySample> samples;
  std::vector<TrajectorySegment> segments;
  double energy_drift = 0.0;  ///< max |H - H0| / |H0| over samples
  int chart_switches = 0;
};

/// Accepted step, replayable with the same chart sequence.
struct StepRecord {
  Chart chart;
  double h;
};
using StepLog = std::vector<StepRecord>;

/// Scalar function of a chart state (6 or 8 components, no time).
using ChartFunction = std::function<double(Chart, const VecX&)>;

struct EventSpec {
  ChartFunction fn;
  int direction = 1;  ///< +1: crossing from negative to positive, -1 the reverse, 0 either
  /// Roots where |fn| is not below this after refinement are treated as
  /// discontinuities and skipped.
  double max_residual = 1e-9;
  /// Extra acceptance test on the located point.
  std::function<bool(Chart, const VecX&)> accept;
  int occurrence = 1;  ///< stop at this accepted crossing
};

struct PropagateOptions {
  double t_end = std::numeric_limits<double>::infinity();  ///< physical time, signed direction
  int direction = 1;
  std::optional<EventSpec> event;
  bool record_samples = true;
  bool record_segments = false;
  /// Called on each accepted step end; used for binding-distance tracking.
  std::function<void(Chart, const VecX&)> observer;
};

struct PropagateResult {
  Trajectory traj;
  FlowPoint end;
  bool event_found = false;
  int event_roots = 0;  ///< sign changes seen, accepted or not
  StepLog log;
  double chart_time = 0.0;
};

/// Rotating-frame CR3BP flow with Moser chart switching near massive primaries.
class Cr3bpFlow {
 public:
  Cr3bpFlow(const MassRatio& mu, const IntegratorConfig& cfg);

  const MassRatio& mu() const { return mu_; }
  const IntegratorConfig& config() const { return cfg_; }

  RotState to_rot(Chart chart, const VecX& y) const;
  VecX from_rot(const RotState& s, Chart chart) const;
  /// H of a chart state, NaN on the collision fiber.
  double energy(Chart chart, const VecX& y) const;

  /// Propagate from `start` at energy c (used by Moser charts; for rotating
  /// starts pass H(start)). Stops at t_end or at the requested event.
  /// Throws kMaxTime, kStepUnderflow, kConstraintDrift.
  PropagateResult propagate(const FlowPoint& start, double c, const PropagateOptions& opt) const;

  /// Re-run a step log with fixed steps from a nearby start. The map
  /// start -> end is smooth, which is what finite differences need.
  FlowPoint replay(const FlowPoint& start, double c, const StepLog& log, int direction = 1) const;

  /// Convenience: rotating start, fixed physical duration.
  Trajectory integrate(const RotState& start, double duration, bool record_segments = false) const;

 private:
  FlowPoint convert(const FlowPoint& p, Chart target) const;
  Rhs rhs(Chart chart, double c) const;
  double abs_tol(Chart chart) const;
  std::optional<Chart> switch_target(Chart chart, const VecX& y) const;

  MassRatio mu_;
  IntegratorConfig cfg_;
};

/// Locate a crossing of `fn` along recorded dense segments. Throws kNoCrossing
/// when no strict sign change with the requested direction exists.
struct Crossing {
  double t = 0.0;
  FlowPoint point;
};
Crossing event_crossing(const Cr3bpFlow& flow, const Trajectory& traj, const ChartFunction& fn, int direction);

}  // namespace sectionscope
