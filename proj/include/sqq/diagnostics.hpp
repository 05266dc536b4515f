/**
 * @file diagnostics.hpp
 * @brief Trajectory diagnostics: energy error, speeds, close approaches, phase series, and
 * per-step trackers that see every step rather than only the sampled ones.
 */
#pragma once

#include <limits>
#include <vector>

#include "sqq/integrator.hpp"
#include "sqq/problems.hpp"

namespace sqq {

struct EnergyErrorSeries {
  Vec t;
  Vec abs_err;  // |H - H0|
  Vec rel_err;  // |H - H0| / |H0|, zero when H0 == 0
};

/// Per-sample energy error against traj.H0.
EnergyErrorSeries energy_error_series(const Trajectory& traj);

struct ClosestApproach {
  double distance = std::numeric_limits<double>::infinity();
  double time = 0.0;
  int body_a = -1;
  int body_b = -1;
};

/// Smallest pairwise distance over the samples; `bodies` restricts the search to one pair
/// when both entries are >= 0.
ClosestApproach closest_approach(const Trajectory& traj, int space_dim, int body_a = -1,
                                 int body_b = -1);

/// Speed |p_i| / m_i per sample (rows) and body (columns).
Mat speed_series(const Trajectory& traj, const NBodySystem& system);

/// (q_k, p_k) per sample for coordinate k, as a samples x 2 matrix.
Mat phase_series(const Trajectory& traj, int coordinate);

struct DiagnosticBundle {
  EnergyErrorSeries energy;
  double max_abs_energy_error = 0.0;  // over every step, from the trajectory stats
  double max_rel_energy_error = 0.0;
  Mat speeds;                         // empty for non N-body models
  ClosestApproach closest;            // sampled; distance is +inf for a single body
};

DiagnosticBundle diagnostics(const Trajectory& traj, const ProblemSpec& problem);

// ---------------------------------------------------------------------------------------
// Step observers. Each exposes observe(state) and can be chained through StepObserver.

/// Max-per-bin energy error on a fixed time grid, plus an online least-squares fit of
/// |H - H0| against time for t >= fit_from.
class EnergyTracker {
 public:
  EnergyTracker(const HamiltonianModel& model, double H0, double t0, double duration, int bins,
                double fit_from_fraction = 0.0);

  void observe(const PhaseState& s);

  const Vec& bin_max() const { return bin_max_; }
  /// Max |H - H0| over the bins covering [t0 + a*duration, t0 + b*duration).
  double max_between(double a, double b) const;
  /// Slope of the least-squares line through the fitted errors, per unit time.
  double drift_rate() const;
  long fitted_points() const { return n_; }

 private:
  const HamiltonianModel* model_;
  double H0_;
  double t0_;
  double duration_;
  double fit_from_;
  Vec bin_max_;
  long n_ = 0;
  double st_ = 0.0, se_ = 0.0, stt_ = 0.0, ste_ = 0.0;
};

/// Pairwise minimum distances over every step.
class EncounterTracker {
 public:
  explicit EncounterTracker(int space_dim) : space_dim_(space_dim) {}

  void observe(const PhaseState& s);
  /// Closest approach of one pair (0-based body indices), or of any pair.
  ClosestApproach closest(int body_a = -1, int body_b = -1) const;

 private:
  int space_dim_;
  std::vector<ClosestApproach> pairs_;
};

/// Per-body min and max speed over every step.
class SpeedRangeTracker {
 public:
  explicit SpeedRangeTracker(const NBodySystem& system);

  void observe(const PhaseState& s);
  double min_speed(int body) const { return min_[body]; }
  double max_speed(int body) const { return max_[body]; }
  double ratio(int body) const { return max_[body] / min_[body]; }

 private:
  const NBodySystem* system_;
  Vec min_;
  Vec max_;
};

/// Largest deviation of total linear and angular momentum from their initial values.
class MomentumTracker {
 public:
  MomentumTracker(int space_dim, const PhaseState& initial);

  void observe(const PhaseState& s);
  double max_linear_drift() const { return max_linear_; }
  double max_angular_drift() const { return max_angular_; }

 private:
  int space_dim_;
  Vec P0_;
  Vec L0_;
  double max_linear_ = 0.0;
  double max_angular_ = 0.0;
};

/// Adapts any tracker with observe(const PhaseState&) to a StepObserver.
template <class... Trackers>
StepObserver observe_all(Trackers&... trackers) {
  return [&trackers...](long, const PhaseState& s, const StepDiagnostics&) {
    (trackers.observe(s), ...);
  };
}

}  // namespace sqq
