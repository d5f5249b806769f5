#pragma once

// Field-line integration dx/dt = W(x) for W in {B, B/rho, u} with dense
// output over the whole trajectory and event location on the dense output.

#include <functional>
#include <utility>
#include <stdexcept>
#include <vector>

#include "fluxvol/fields.hpp"

namespace fluxvol {

enum class FlowField { B, V, U };

struct TracerOptions {
  double rel_tol = 1e-11;
  double abs_tol = 1e-12;
  /// Time horizon; <= 0 selects 100x the axis return estimate of the field.
  double max_time = 0.0;
  double max_step = 1.0;
  /// Sub-samples of each accepted step scanned for sign changes.
  int scan_samples = 4;
};

class TraceError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// The time horizon was reached before the requested events were found.
/// Expected near separatrices, where return times diverge.
class TraceTimeout : public TraceError {
 public:
  using TraceError::TraceError;
};

struct CrossingEvent {
  double t = 0.0;
  Vec3 point{};
  int index = 0;       ///< 1-based count among candidates
  bool valid = true;   ///< false for a projected (spurious) u-line crossing
};

/// Adaptive Dormand-Prince 5(4) integration with the fourth-order
/// continuous extension stored for every accepted step.
class Trajectory {
 public:
  Trajectory(const FieldModel& field, FlowField flow, const Vec3& x0,
             TracerOptions opts = {});

  const FieldModel& field() const { return *field_; }
  FlowField flow() const { return flow_; }
  const Vec3& start() const { return x0_; }
  double t_end() const { return t_; }
  double max_time() const { return max_time_; }
  std::size_t step_count() const { return segments_.size(); }
  const TracerOptions& options() const { return opts_; }

  /// Take one accepted step. Returns false once the time horizon is reached.
  bool step();
  /// Integrate until t_end() >= t. Throws TraceTimeout past the horizon.
  void extend_to(double t);
  /// Dense state, 0 <= t <= t_end().
  Vec3 state(double t) const;

  /// Time interval [t0, t1] covered by accepted step i.
  std::pair<double, double> step_interval(std::size_t i) const {
    return {segments_[i].t0, segments_[i].t0 + segments_[i].h};
  }

  Vec3 rhs(const Vec3& x) const;

 private:
  struct Segment {
    double t0;
    double h;
    std::array<Vec3, 5> coeff;
  };

  double initial_step() const;

  const FieldModel* field_;
  FlowField flow_;
  Vec3 x0_;
  TracerOptions opts_;
  double max_time_;

  double t_ = 0.0;
  Vec3 x_;
  Vec3 k1_;
  double h_;
  std::vector<Segment> segments_;
};

/// A scalar phase along a trajectory; `near` is a nearby earlier value used
/// for unwrapping angles.
using PhaseFunction = std::function<double(const Vec3& x, double near)>;

/// Times t > 0 at which `phase` crosses a multiple of `spacing`, in order,
/// located to ~1e-13 in time. Scanning stops once `done(events)` is true;
/// `done` may annotate the events (e.g. the valid flag).
/// If `monotone` is set, a reversal of the phase is reported as an error.
using CrossingPredicate = std::function<bool(std::vector<CrossingEvent>&)>;

std::vector<CrossingEvent> find_phase_crossings(Trajectory& traj,
                                                const PhaseFunction& phase,
                                                double spacing,
                                                const CrossingPredicate& done,
                                                bool monotone = false);

enum class Section {
  ToroidalPlane,  ///< phi advances by 2 pi k
  PoloidalAngle,  ///< poloidal angle advances by 2 pi k
};

/// First `count` returns to the section through the start point.
std::vector<CrossingEvent> return_to_section(const FieldModel& field, FlowField flow,
                                             const Vec3& x0, Section section,
                                             int count, TracerOptions opts = {});

/// Single toroidal transit time (phi advances by 2 pi) along B.
double transit_time(const FieldModel& field, const Vec3& x0, TracerOptions opts = {});

struct UlineOptions {
  /// Accept only candidates whose match coordinate agrees with the start
  /// (true crossings). When false, candidates are counted as they come.
  bool filter_valid = true;
  /// Candidate index to return when filtering is disabled.
  int count_required = 1;
  /// Tolerance of the match test; <= 0 selects 1e-6 max(1, |psi0|).
  double match_tol = 0.0;
};

/// Candidates for returns to the u-line through x0, stopping after
/// `n_valid` valid ones (filtering on) or `count_required` candidates.
std::vector<CrossingEvent> uline_crossings(const FieldModel& field, FlowField flow,
                                           const Vec3& x0, int n_valid,
                                           const UlineOptions& uopts = {},
                                           TracerOptions opts = {});

/// Return to the u-line: first valid crossing, or the count_required-th
/// candidate when filtering is disabled.
CrossingEvent return_to_uline(const FieldModel& field, FlowField flow, const Vec3& x0,
                              const UlineOptions& uopts = {}, TracerOptions opts = {});

/// Mean of the first n valid u-line return times along `flow`.
double mean_return_time(const FieldModel& field, FlowField flow, const Vec3& x0,
                        int n, const UlineOptions& uopts = {},
                        TracerOptions opts = {});

}  // namespace fluxvol
