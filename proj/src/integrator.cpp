#include "sqq/integrator.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <string>

#include "sqq/errors.hpp"

namespace sqq {

const char* to_string(Variant v) {
  switch (v) {
    case Variant::SQQ:
      return "SQQ";
    case Variant::SQQ_P:
      return "SQQ-P";
    case Variant::SQQ_PN:
      return "SQQ-PN";
    case Variant::SQQ_PQ:
      return "SQQ-PQ";
    case Variant::SQQ_PTN:
      return "SQQ-PTN";
    case Variant::SQQ_PTQ:
      return "SQQ-PTQ";
  }
  return "unknown";
}

Variant parse_variant(std::string_view name) {
  for (Variant v : {Variant::SQQ, Variant::SQQ_P, Variant::SQQ_PN, Variant::SQQ_PQ,
                    Variant::SQQ_PTN, Variant::SQQ_PTQ}) {
    if (name == to_string(v)) return v;
  }
  throw Error(ErrorCode::invalid_argument, "unknown variant '" + std::string(name) + "'");
}

VariantTraits traits(Variant v) {
  switch (v) {
    case Variant::SQQ:
      return {NodeKind::equidistant, false, false, SolverMethod::newton_fd};
    case Variant::SQQ_P:
    case Variant::SQQ_PN:
      return {NodeKind::chebyshev_lobatto, true, false, SolverMethod::newton_fd};
    case Variant::SQQ_PQ:
      return {NodeKind::chebyshev_lobatto, true, false, SolverMethod::broyden};
    case Variant::SQQ_PTN:
      return {NodeKind::chebyshev_lobatto, true, true, SolverMethod::newton_fd};
    case Variant::SQQ_PTQ:
      return {NodeKind::chebyshev_lobatto, true, true, SolverMethod::broyden};
  }
  throw Error(ErrorCode::invalid_argument, "unknown variant");
}

VariantConfig VariantConfig::make(Variant v, int m, int n, double step) {
  const VariantTraits t = traits(v);
  VariantConfig cfg;
  cfg.name = v;
  if (t.interpolation == NodeKind::equidistant) {
    cfg.q_kind = NodeKind::equidistant;
    cfg.p_kind = NodeKind::equidistant;
  } else {
    cfg.q_kind = NodeKind::chebyshev_lobatto;
    cfg.p_kind = NodeKind::chebyshev_gauss;
  }
  cfg.use_projection = t.projection;
  cfg.use_time_transform = t.time_transform;
  cfg.solver.method = t.solver;
  cfg.m = m;
  cfg.n = n;
  cfg.step = step;
  cfg.sigma.kind = t.time_transform ? SigmaKind::energy : SigmaKind::unit;
  return cfg;
}

void VariantConfig::validate() const {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "variant: m must be >= 1");
  if (n < 0) throw Error(ErrorCode::invalid_argument, "variant: n must be >= 0");
  if (gauss_points < 0) throw Error(ErrorCode::invalid_argument, "variant: gauss_points < 0");
  if (!(step > 0.0) || !std::isfinite(step)) {
    throw Error(ErrorCode::invalid_argument, "variant: step must be positive");
  }
  if (q_kind == NodeKind::chebyshev_gauss) {
    throw Error(ErrorCode::invalid_argument, "variant: q nodes must include the interval endpoints");
  }
  solver.validate();
  if (use_time_transform) sigma.validate();
}

namespace {

ReferenceBasis warm_up_for(const VariantConfig& v) {
  v.validate();
  return warm_up(v.m, v.n, v.effective_gauss_points(), v.q_kind, v.p_kind);
}

StepContext context_for(const HamiltonianModel& model, const VariantConfig& v, double H0) {
  StepContext ctx;
  ctx.model = &model;
  ctx.mode = v.mode();
  ctx.sigma = v.sigma;
  ctx.sigma.H0 = H0;
  if (ctx.mode == StepMode::fixed) ctx.sigma.kind = SigmaKind::unit;
  return ctx;
}

}  // namespace

Integrator::Integrator(const HamiltonianModel& model, VariantConfig variant, double H0)
    : model_(&model),
      variant_(std::move(variant)),
      ref_(warm_up_for(variant_)),
      ws_(context_for(model, variant_, H0), ref_) {
  variant_.sigma.H0 = H0;
}

double Integrator::sigma_at(const VecRef& q) const {
  if (!variant_.use_time_transform) return 1.0;
  return sigma(ws_.context().sigma, *model_, q);
}

PhaseState Integrator::step_once(const PhaseState& state, WarmStart& warm, StepDiagnostics* diag,
                                 double length) {
  const double L = length > 0.0 ? length : variant_.step;
  if (variant_.use_projection) {
    if (L != cached_length_) {
      ws_.set_basis(map_to_interval(ref_, 0.0, L));
      cached_length_ = L;
    }
  } else {
    const double t_a = variant_.use_time_transform ? 0.0 : state.t;
    ws_.set_basis(direct_interval_basis(ref_, t_a, t_a + L));
    cached_length_ = 0.0;
  }
  ws_.set_incoming(state.q, state.p);

  const Vec x0 = ws_.initial_guess();
  const ResidualFn F = [this](const Vec& x, Vec& out) { ws_.residual(x, out); };
  SolverState sol;
  bool retried = false;
  try {
    sol = solve(F, x0, warm.J_inv, variant_.solver, on_update_);
  } catch (const Error& e) {
    // A carried-over inverse Jacobian can be stale after a rapid change (pericentre passage,
    // close encounter). Retry once from a fresh finite-difference Jacobian before giving up.
    if (warm.empty()) {
      throw StepFailure(std::string("step failed: ") + e.what(), -1, state.t, e.code());
    }
    retried = true;
  }
  if (retried) {
    try {
      sol = solve(F, x0, Mat(), variant_.solver, on_update_);
      ++cold_restarts_;
    } catch (const Error& e) {
      throw StepFailure(std::string("step failed after a cold restart: ") + e.what(), -1, state.t,
                        e.code());
    }
  }

  const int d = ws_.dof();
  const int m = ref_.m();
  PhaseState out;
  out.q = sol.x.segment((m - 1) * d, d);
  out.p = ws_.outgoing_momentum(sol.x);
  const double dt = ws_.time_increment(sol.x);
  out.t = state.t + dt;
  if (!out.q.allFinite() || !out.p.allFinite() || !(dt > 0.0)) {
    throw StepFailure("step produced a non-finite state or non-positive time increment", -1,
                      state.t, ErrorCode::non_finite);
  }

  if (diag) {
    diag->iterations = sol.iterations;
    diag->residual_evaluations = sol.residual_evaluations;
    diag->jacobian_builds = sol.jacobian_builds;
    diag->cold_restart = retried;
    diag->residual_norm = sol.residual_norm;
    diag->dt = dt;
    diag->sigma = sigma_at(out.q);
    diag->momentum_discrepancy = ws_.momentum_discrepancy(sol.x, out.p);
  }
  warm.x = std::move(sol.x);
  if (variant_.solver.method == SolverMethod::broyden) warm.J_inv = std::move(sol.J_inv);
  return out;
}

Trajectory integrate(const HamiltonianModel& model, const PhaseState& ic,
                     const VariantConfig& variant, double duration, int sample_every,
                     const StepObserver& observer) {
  if (!(duration > 0.0) || !std::isfinite(duration)) {
    throw Error(ErrorCode::invalid_argument, "integrate: duration must be positive");
  }
  if (sample_every < 1) throw Error(ErrorCode::invalid_argument, "integrate: sample_every < 1");
  if (ic.q.size() != model.dof() || ic.p.size() != model.dof()) {
    throw Error(ErrorCode::invalid_argument, "integrate: initial state does not match the model");
  }

  const auto wall_start = std::chrono::steady_clock::now();
  const double H0 = model.hamiltonian(ic);
  Integrator integ(model, variant, H0);

  Trajectory traj;
  traj.variant = to_string(variant.name);
  traj.dof = model.dof();
  traj.H0 = H0;
  traj.duration = duration;
  traj.samples.push_back(Sample{ic.t, ic.q, ic.p, H0, integ.sigma_at(ic.q), 0});

  const double t_end = ic.t + duration;
  const double end_tol = 1e-12 * std::max(1.0, std::abs(t_end));
  const bool fixed = !variant.use_time_transform;
  PhaseState state = ic;
  WarmStart warm;
  StepDiagnostics diag;
  StepStats& st = traj.stats;

  while (t_end - state.t > end_tol) {
    double length = 0.0;
    bool last = false;
    if (fixed && state.t + variant.step >= t_end - end_tol) {
      length = t_end - state.t;
      last = true;
    }
    try {
      state = integ.step_once(state, warm, &diag, length);
    } catch (const StepFailure& f) {
      throw StepFailure("step " + std::to_string(st.steps + 1) + " at t = " +
                            format_number(state.t, 10) + ": " + f.what(),
                        st.steps + 1, state.t, f.cause);
    }
    if (last) state.t = t_end;
    ++st.steps;

    const double H = model.hamiltonian(state);
    const double abs_err = std::abs(H - H0);
    st.max_abs_energy_error = std::max(st.max_abs_energy_error, abs_err);
    if (H0 != 0.0) st.max_rel_energy_error = std::max(st.max_rel_energy_error, abs_err / std::abs(H0));
    st.min_dt = st.steps == 1 ? diag.dt : std::min(st.min_dt, diag.dt);
    st.max_dt = std::max(st.max_dt, diag.dt);
    st.total_iterations += diag.iterations;
    st.residual_evaluations += diag.residual_evaluations;
    st.jacobian_builds += diag.jacobian_builds;
    if (diag.cold_restart) ++st.cold_restarts;
    st.max_momentum_discrepancy = std::max(st.max_momentum_discrepancy, diag.momentum_discrepancy);
    if (observer) observer(st.steps, state, diag);

    const bool done = !(t_end - state.t > end_tol);
    if (st.steps % sample_every == 0 || done) {
      traj.samples.push_back(Sample{state.t, state.q, state.p, H, diag.sigma, diag.iterations});
    }
  }
  traj.overshoot = fixed ? 0.0 : state.t - t_end;
  traj.wall_time =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - wall_start).count();
  return traj;
}

}  // namespace sqq
