#include "sqq/validation.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "sqq/errors.hpp"
#include "sqq/integrator.hpp"
#include "sqq/problems.hpp"
#include "sqq/variational_step.hpp"

namespace sqq {

namespace {

struct StepSetup {
  MappedBasis basis;
  StepUnknowns unknowns;
  PhaseState incoming;
  StepContext ctx;
};

// Random step near a physical state of the model: q nodes drift from q0 with small noise,
// p nodes scatter around p0.
StepSetup random_step(std::mt19937_64& rng, const HamiltonianModel& model, const PhaseState& ref,
                      StepMode mode, double H0) {
  std::uniform_int_distribution<int> mdist(1, 6);
  std::uniform_int_distribution<int> ndist(0, 5);
  std::uniform_real_distribution<double> ldist(0.02, 0.3);
  std::normal_distribution<double> noise(0.0, 1.0);
  const int m = mdist(rng);
  const int n = ndist(rng);
  const double L = ldist(rng);
  const ReferenceBasis ref_basis =
      warm_up(m, n, m + n + 1, NodeKind::chebyshev_lobatto, NodeKind::chebyshev_gauss);

  StepSetup s;
  s.basis = map_to_interval(ref_basis, 0.0, L);
  s.ctx.model = &model;
  s.ctx.mode = mode;
  s.ctx.sigma.kind = mode == StepMode::transformed ? SigmaKind::energy : SigmaKind::unit;
  s.ctx.sigma.H0 = H0;
  const int d = model.dof();
  const Vec v = model.inverse_mass().cwiseProduct(ref.p);
  s.unknowns.q_nodes.resize(d, m + 1);
  s.unknowns.p_nodes.resize(d, n + 1);
  for (int k = 0; k <= m; ++k) {
    const double frac = 0.5 * (ref_basis.q_nodes[k] + 1.0);
    for (int i = 0; i < d; ++i) {
      s.unknowns.q_nodes(i, k) = ref.q[i] + frac * L * v[i] + 0.01 * noise(rng);
    }
  }
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i < d; ++i) s.unknowns.p_nodes(i, k) = ref.p[i] * (1.0 + 0.05 * noise(rng));
  }
  s.incoming.q = s.unknowns.q_nodes.col(0);
  s.incoming.p = ref.p;
  for (int i = 0; i < d; ++i) s.incoming.p[i] += 0.05 * noise(rng);
  return s;
}

// Largest |analytic - FD| over the residual and the outgoing momentum of one step.
double gradient_mismatch(StepSetup& s, double h) {
  const int d = s.unknowns.dof();
  const int m = s.unknowns.m();
  const int n = s.unknowns.n();
  const Vec R = residual(s.basis, s.unknowns, s.incoming, s.ctx);
  const Vec p_out = outgoing_momentum(s.basis, s.unknowns, s.ctx);
  auto dS = [&](double& x) {
    const double x0 = x;
    x = x0 + h;
    const double sp = discrete_action(s.basis, s.unknowns, s.ctx);
    x = x0 - h;
    const double sm = discrete_action(s.basis, s.unknowns, s.ctx);
    x = x0;
    return (sp - sm) / (2.0 * h);
  };
  double worst = 0.0;
  for (int i = 0; i < d; ++i) {
    worst = std::max(worst, std::abs(R[i] - (dS(s.unknowns.q_nodes(i, 0)) + s.incoming.p[i])));
  }
  for (int k = 1; k < m; ++k) {
    for (int i = 0; i < d; ++i) {
      worst = std::max(worst, std::abs(R[k * d + i] - dS(s.unknowns.q_nodes(i, k))));
    }
  }
  for (int k = 0; k <= n; ++k) {
    for (int i = 0; i < d; ++i) {
      worst = std::max(worst, std::abs(R[(m + k) * d + i] - dS(s.unknowns.p_nodes(i, k))));
    }
  }
  for (int i = 0; i < d; ++i) {
    worst = std::max(worst, std::abs(p_out[i] - dS(s.unknowns.q_nodes(i, m))));
  }
  return worst;
}

std::string fmt(double v) { return format_number(v, 3); }

}  // namespace

CheckResult check_residual_gradients(int configs, std::uint64_t seed) {
  CheckResult r{"gradients", false, 0.0, 1e-5, ""};
  std::mt19937_64 rng(seed);
  const ProblemSpec kepler = kepler_problem(0.5);
  const ProblemSpec three = three_body_problem();
  int count = 0;
  for (const ProblemSpec* p : {&kepler, &three}) {
    for (StepMode mode : {StepMode::fixed, StepMode::transformed}) {
      for (int c = 0; c < configs; ++c) {
        StepSetup s = random_step(rng, *p->model, p->initial, mode, p->H0);
        r.worst = std::max(r.worst, gradient_mismatch(s, 1e-6));
        ++count;
      }
    }
  }
  r.passed = r.worst <= r.threshold;
  r.detail = std::to_string(count) + " random steps, max |analytic - FD| = " + fmt(r.worst);
  return r;
}

CheckResult check_projection_equivalence(int intervals, std::uint64_t seed) {
  CheckResult r{"projection", false, 0.0, 1e-10, ""};
  std::mt19937_64 rng(seed);
  std::uniform_int_distribution<int> cdist(2, 15);
  std::uniform_real_distribution<double> tdist(0.0, 100.0);
  std::uniform_int_distribution<int> kind(0, 1);
  for (int i = 0; i < intervals; ++i) {
    const int mq = cdist(rng) - 1;
    const int np = cdist(rng) - 1;
    double ta = tdist(rng);
    double tb = tdist(rng);
    if (ta > tb) std::swap(ta, tb);
    if (tb - ta < 1e-3) tb = ta + 1e-3;
    const bool equi = kind(rng) == 1;
    const ReferenceBasis ref =
        warm_up(mq, np, mq + np + 1, equi ? NodeKind::equidistant : NodeKind::chebyshev_lobatto,
                equi ? NodeKind::equidistant : NodeKind::chebyshev_gauss);
    const MappedBasis a = map_to_interval(ref, ta, tb);
    const MappedBasis b = direct_interval_basis(ref, ta, tb);
    auto rel = [](const Mat& x, const Mat& y) {
      return (x - y).cwiseAbs().maxCoeff() / std::max(1.0, y.cwiseAbs().maxCoeff());
    };
    r.worst = std::max({r.worst, rel(a.M, b.M), rel(a.M_dot, b.M_dot), rel(a.N, b.N), rel(a.N_dot, b.N_dot)});
  }
  r.passed = r.worst <= r.threshold;
  r.detail = std::to_string(intervals) + " intervals, max relative difference " + fmt(r.worst);
  return r;
}

CheckResult check_symplecticity(int m, int n, double dt) {
  CheckResult r{"symplecticity", false, 0.0, 1e-5, ""};
  const ProblemSpec kepler = kepler_problem(0.5);
  VariantConfig v = VariantConfig::make(Variant::SQQ_P, m, n, dt);
  Integrator integ(*kepler.model, v, kepler.H0);
  const int d = kepler.model->dof();
  auto step = [&](const Vec& z) {
    PhaseState s{z.head(d), z.tail(d), 0.0};
    WarmStart cold;
    const PhaseState o = integ.step_once(s, cold);
    Vec out(2 * d);
    out << o.q, o.p;
    return out;
  };
  Vec z0(2 * d);
  z0 << kepler.initial.q, kepler.initial.p;
  const double h = 1e-5;
  Mat D(2 * d, 2 * d);
  for (int j = 0; j < 2 * d; ++j) {
    Vec zp = z0;
    Vec zm = z0;
    zp[j] += h;
    zm[j] -= h;
    D.col(j) = (step(zp) - step(zm)) / (2.0 * h);
  }
  Mat J = Mat::Zero(2 * d, 2 * d);
  J.topRightCorner(d, d).setIdentity();
  J.bottomLeftCorner(d, d) = -Mat::Identity(d, d);
  r.worst = (D.transpose() * J * D - J).cwiseAbs().rowwise().sum().maxCoeff();
  r.passed = r.worst <= r.threshold;
  r.detail = "Kepler e=0.5, m=" + std::to_string(m) + ", n=" + std::to_string(n) + ", dt=" + fmt(dt) +
             ": ||D^T J D - J||_inf = " + fmt(r.worst);
  return r;
}

CheckResult check_broyden_secant(int steps) {
  CheckResult r{"secant", false, 0.0, 1e-12, ""};
  const ProblemSpec three = three_body_problem();
  VariantConfig v = VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01);
  Integrator integ(*three.model, v, three.H0);
  long updates = 0;
  integ.set_update_observer([&](const Mat& J_inv, const Vec& s, const Vec& y) {
    ++updates;
    r.worst = std::max(r.worst, (J_inv * y - s).norm() / std::max(s.norm(), 1e-300));
  });
  PhaseState state = three.initial;
  WarmStart warm;
  for (int k = 0; k < steps; ++k) state = integ.step_once(state, warm);
  r.passed = r.worst <= r.threshold && updates > 0;
  r.detail = std::to_string(updates) + " updates over " + std::to_string(steps) +
             " three-body steps, max |J_inv y - s| / |s| = " + fmt(r.worst);
  return r;
}

std::vector<std::string> validation_check_names() {
  return {"gradients", "projection", "symplecticity", "secant"};
}

std::vector<CheckResult> run_validation(const std::vector<std::string>& only, std::uint64_t seed) {
  const auto names = validation_check_names();
  for (const std::string& n : only) {
    if (std::find(names.begin(), names.end(), n) == names.end()) {
      throw Error(ErrorCode::invalid_argument, "unknown check '" + n + "'");
    }
  }
  auto selected = [&](const std::string& n) {
    return only.empty() || std::find(only.begin(), only.end(), n) != only.end();
  };
  std::vector<CheckResult> out;
  if (selected("gradients")) out.push_back(check_residual_gradients(50, seed));
  if (selected("projection")) out.push_back(check_projection_equivalence(100, seed + 1));
  if (selected("symplecticity")) out.push_back(check_symplecticity());
  if (selected("secant")) out.push_back(check_broyden_secant());
  return out;
}

}  // namespace sqq
