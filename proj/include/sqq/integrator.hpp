/**
 * @file integrator.hpp
 * @brief The SQQ variant family and multi-step trajectory integration.
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sqq/basis.hpp"
#include "sqq/forces.hpp"
#include "sqq/solver.hpp"
#include "sqq/time_transform.hpp"
#include "sqq/variational_step.hpp"

namespace sqq {

enum class Variant { SQQ, SQQ_P, SQQ_PN, SQQ_PQ, SQQ_PTN, SQQ_PTQ };

const char* to_string(Variant v);
/// Accepts the printed names ("SQQ-PTQ"); throws invalid_argument otherwise.
Variant parse_variant(std::string_view name);

/// One row of the characteristics table: how each variant is defined.
struct VariantTraits {
  NodeKind interpolation;  // equidistant or Chebyshev (Lobatto for q)
  bool projection;
  bool time_transform;
  SolverMethod solver;
};

VariantTraits traits(Variant v);

struct VariantConfig {
  Variant name = Variant::SQQ_PTQ;
  NodeKind q_kind = NodeKind::chebyshev_lobatto;
  NodeKind p_kind = NodeKind::chebyshev_gauss;
  /// Reuse the warm-up basis on every step. When false the Vandermonde system is solved per step.
  bool use_projection = true;
  bool use_time_transform = true;
  SolverConfig solver;
  int m = 3;
  int n = 3;
  int gauss_points = 0;  // 0 selects m + n + 1
  double step = 0.01;    // dt in fixed mode, dtau in transformed mode
  SigmaConfig sigma;     // step-size control used in transformed mode

  /// Defaults for a named variant, following its row of the characteristics table.
  static VariantConfig make(Variant v, int m, int n, double step);

  int effective_gauss_points() const { return gauss_points > 0 ? gauss_points : m + n + 1; }
  StepMode mode() const { return use_time_transform ? StepMode::transformed : StepMode::fixed; }
  void validate() const;
};

/// Solver state carried from one step to the next within a single trajectory.
struct WarmStart {
  Vec x;
  Mat J_inv;

  bool empty() const { return J_inv.size() == 0; }
  void clear() {
    x.resize(0);
    J_inv.resize(0, 0);
  }
};

struct StepDiagnostics {
  int iterations = 0;
  long residual_evaluations = 0;
  int jacobian_builds = 0;
  double residual_norm = 0.0;
  double dt = 0.0;
  double sigma = 1.0;  // sigma at the outgoing position
  double momentum_discrepancy = 0.0;
  bool cold_restart = false;  // the warm-started solve failed and was redone from scratch
};

class Integrator {
 public:
  /// H0 is fixed here for the whole trajectory and overrides variant.sigma.H0.
  Integrator(const HamiltonianModel& model, VariantConfig variant, double H0);

  const VariantConfig& variant() const { return variant_; }
  const ReferenceBasis& reference() const { return ref_; }
  const HamiltonianModel& model() const { return *model_; }

  /// Advances one step of length variant().step, or `length` when positive (fixed mode uses
  /// this to land on the final time). A failed warm-started solve is retried once from a
  /// fresh finite-difference Jacobian. Throws StepFailure with step_index -1 on failure.
  PhaseState step_once(const PhaseState& state, WarmStart& warm, StepDiagnostics* diag = nullptr,
                       double length = 0.0);

  /// Step-size function at q (1 in fixed mode).
  double sigma_at(const VecRef& q) const;

  /// Receives every Broyden update made while stepping (validation hook).
  void set_update_observer(UpdateObserver obs) { on_update_ = std::move(obs); }

  /// Steps whose warm-started Broyden solve failed and succeeded from a fresh Jacobian.
  long cold_restarts() const { return cold_restarts_; }

 private:
  const HamiltonianModel* model_;
  VariantConfig variant_;
  ReferenceBasis ref_;
  StepWorkspace ws_;
  double cached_length_ = 0.0;
  long cold_restarts_ = 0;
  UpdateObserver on_update_;
};

struct Sample {
  double t = 0.0;
  Vec q;
  Vec p;
  double H = 0.0;
  double sigma = 1.0;
  int iterations = 0;
};

/// Aggregates over every step, independent of the sampling stride.
struct StepStats {
  long steps = 0;
  double max_abs_energy_error = 0.0;
  double max_rel_energy_error = 0.0;
  double min_dt = 0.0;
  double max_dt = 0.0;
  long total_iterations = 0;
  long residual_evaluations = 0;
  long jacobian_builds = 0;
  double max_momentum_discrepancy = 0.0;
  long cold_restarts = 0;

  double mean_iterations() const {
    return steps > 0 ? static_cast<double>(total_iterations) / steps : 0.0;
  }
};

struct Trajectory {
  std::vector<Sample> samples;
  std::string variant;
  std::string problem;
  int dof = 0;
  double H0 = 0.0;
  double duration = 0.0;
  double overshoot = 0.0;  // transformed mode: final time minus requested duration
  double wall_time = 0.0;  // seconds
  StepStats stats;
};

/// Called after every accepted step with the 1-based step index.
using StepObserver =
    std::function<void(long step, const PhaseState& state, const StepDiagnostics& diag)>;

/// Steps from ic until the physical time reaches `duration`. Fixed mode shortens the last
/// step to land on `duration`; transformed mode stops at the first step past it and records
/// the overshoot. Every `sample_every`-th step and the final step are sampled.
Trajectory integrate(const HamiltonianModel& model, const PhaseState& ic,
                     const VariantConfig& variant, double duration, int sample_every = 1,
                     const StepObserver& observer = {});

}  // namespace sqq
