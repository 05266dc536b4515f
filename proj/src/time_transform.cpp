#include "sqq/time_transform.hpp"

#include <cmath>
#include <string>

#include "sqq/errors.hpp"

namespace sqq {

const char* to_string(SigmaKind kind) {
  switch (kind) {
    case SigmaKind::unit:
      return "unit";
    case SigmaKind::radial:
      return "radial";
    case SigmaKind::energy:
      return "energy";
  }
  return "unknown";
}

void SigmaConfig::validate() const {
  if (!(a > 0.0 && a < 1.0 && b > 1.0)) {
    throw Error(ErrorCode::invalid_argument, "SigmaConfig: bounds must satisfy 0 < a < 1 < b");
  }
  if (fd_gradient && !(fd_step > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "SigmaConfig: fd_step must be positive");
  }
}

namespace {

double energy_radicand(const SigmaConfig& cfg, const HamiltonianModel& model, double U,
                       const Vec& grad_U) {
  const double W =
      (cfg.H0 - U) + (grad_U.array().square() * model.inverse_mass().array()).sum();
  if (!(W > 0.0)) {
    throw Error(ErrorCode::nonpositive_radicand,
                "energy step-size function: radicand " + format_number(W) +
                    " is not positive at this configuration");
  }
  return W;
}

double radial_sigma(double alpha, const VecRef& q) {
  const double r = q.norm();
  if (r == 0.0) throw Error(ErrorCode::singularity, "radial step-size function at |q| = 0");
  return std::pow(r, alpha);
}

Vec fd_grad_sigma(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q) {
  Vec x = q;
  Vec g(q.size());
  for (Eigen::Index i = 0; i < q.size(); ++i) {
    const double xi = x[i];
    x[i] = xi + cfg.fd_step;
    const double fp = sigma(cfg, model, x);
    x[i] = xi - cfg.fd_step;
    const double fm = sigma(cfg, model, x);
    x[i] = xi;
    g[i] = (fp - fm) / (2.0 * cfg.fd_step);
  }
  return g;
}

}  // namespace

double sigma_raw(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q) {
  switch (cfg.kind) {
    case SigmaKind::unit:
      return 1.0;
    case SigmaKind::radial:
      return radial_sigma(cfg.alpha, q);
    case SigmaKind::energy: {
      Vec grad_U;
      const double U = model.evaluate(q, &grad_U, nullptr);
      return 1.0 / std::sqrt(energy_radicand(cfg, model, U, grad_U));
    }
  }
  return 1.0;
}

double regularize_sigma(double sigma2, double a, double b) {
  const double x = std::hypot(sigma2, a);
  if (std::isinf(x)) return b;
  return x / (x / b + 1.0);
}

double sigma_bounded(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q) {
  return regularize_sigma(sigma_raw(cfg, model, q), cfg.a, cfg.b);
}

double sigma(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q) {
  switch (cfg.kind) {
    case SigmaKind::unit:
      return 1.0;
    case SigmaKind::radial:
      return radial_sigma(cfg.alpha, q);
    case SigmaKind::energy:
      return sigma_bounded(cfg, model, q);
  }
  return 1.0;
}

double sigma_from_potential(const SigmaConfig& cfg, const HamiltonianModel& model,
                            const VecRef& q, double U, const Vec& grad_U) {
  switch (cfg.kind) {
    case SigmaKind::unit:
      return 1.0;
    case SigmaKind::radial:
      return radial_sigma(cfg.alpha, q);
    case SigmaKind::energy:
      return regularize_sigma(1.0 / std::sqrt(energy_radicand(cfg, model, U, grad_U)), cfg.a,
                              cfg.b);
  }
  return 1.0;
}

void evaluate_transformed(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q,
                          const VecRef& p, TransformedPoint& out) {
  const auto d = q.size();
  const Vec& inv_mass = model.inverse_mass();
  const bool need_hess = cfg.kind == SigmaKind::energy && !cfg.fd_gradient;
  out.U = model.evaluate(q, &out.grad_U, need_hess ? &out.hess_U : nullptr);
  out.H = model.kinetic(p) + out.U;
  const double dH = out.H - cfg.H0;

  switch (cfg.kind) {
    case SigmaKind::unit:
      out.sigma = 1.0;
      out.grad_sigma.setZero(d);
      break;
    case SigmaKind::radial: {
      const double r = q.norm();
      if (r == 0.0) throw Error(ErrorCode::singularity, "radial step-size function at |q| = 0");
      out.sigma = std::pow(r, cfg.alpha);
      out.grad_sigma = (cfg.alpha * std::pow(r, cfg.alpha - 2.0)) * q;
      break;
    }
    case SigmaKind::energy: {
      const double W = energy_radicand(cfg, model, out.U, out.grad_U);
      const double s2 = 1.0 / std::sqrt(W);
      const double x = std::sqrt(s2 * s2 + cfg.a * cfg.a);
      const double den = x / cfg.b + 1.0;
      out.sigma = x / den;
      if (cfg.fd_gradient) {
        out.grad_sigma = fd_grad_sigma(cfg, model, q);
      } else {
        // grad W = -grad U + 2 hess U M^-1 grad U; d sigma/d sigma2 = (sigma2/x) / den^2.
        const Vec scaled = (inv_mass.array() * out.grad_U.array()).matrix();
        out.grad_sigma.noalias() = 2.0 * (out.hess_U * scaled);
        out.grad_sigma -= out.grad_U;
        const double chain = -0.5 * s2 / W * (s2 / x) / (den * den);
        out.grad_sigma *= chain;
      }
      break;
    }
  }
  out.K = out.sigma * dH;
  out.dK_dq = out.sigma * out.grad_U + dH * out.grad_sigma;
  out.dK_dp = (out.sigma * inv_mass.array() * p.array()).matrix();
}

Vec grad_sigma(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q) {
  TransformedPoint pt;
  evaluate_transformed(cfg, model, q, Vec::Zero(q.size()), pt);
  return pt.grad_sigma;
}

double transformed_hamiltonian(const SigmaConfig& cfg, const HamiltonianModel& model,
                               const PhaseState& state) {
  return sigma(cfg, model, state.q) * (model.hamiltonian(state) - cfg.H0);
}

HamiltonianGradient grad_transformed_hamiltonian(const SigmaConfig& cfg,
                                                 const HamiltonianModel& model,
                                                 const PhaseState& state) {
  TransformedPoint pt;
  evaluate_transformed(cfg, model, state.q, state.p, pt);
  return HamiltonianGradient{pt.dK_dq, pt.dK_dp};
}

}  // namespace sqq
