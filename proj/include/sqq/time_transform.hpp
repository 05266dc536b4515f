/**
 * @file time_transform.hpp
 * @brief Step-size control functions and the time-transformed Hamiltonian K = sigma (H - H0).
 *
 * With dt/dtau = sigma(q), integrating K in the fictitious time tau with a constant step
 * gives variable physical steps. Three control functions are available:
 *   - unit:   sigma = 1 (fixed-step mode);
 *   - radial: sigma = |q|^alpha, used unbounded;
 *   - energy: sigma2 = W^(-1/2), W = (H0 - U) + grad U^T M^-1 grad U, then bounded through
 *             x = sqrt(sigma2^2 + a^2), sigma = x / (x/b + 1), so sigma in [ab/(a+b), b).
 * sigma depends on q only, which keeps dK/dp = sigma M^-1 p.
 */
#pragma once

#include <Eigen/Dense>

#include "sqq/forces.hpp"

namespace sqq {

enum class SigmaKind { unit, radial, energy };

const char* to_string(SigmaKind kind);

struct SigmaConfig {
  SigmaKind kind = SigmaKind::unit;
  double alpha = 2.0;
  double a = 1e-6;
  double b = 1e2;
  double H0 = 0.0;
  /// Cross-validation only: central differences of sigma instead of the analytic gradient.
  bool fd_gradient = false;
  double fd_step = 1e-7;

  /// Throws invalid_argument unless 0 < a < 1 < b.
  void validate() const;
};

/// Raw control function: 1, |q|^alpha, or W^(-1/2).
double sigma_raw(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q);

/// x / (x/b + 1) with x = sqrt(sigma2^2 + a^2).
double regularize_sigma(double sigma2, double a, double b);

/// The bounded regularization applied to sigma_raw, for any kind.
double sigma_bounded(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q);

/// The control function actually used by the integrator: 1 for unit, |q|^alpha for radial,
/// the bounded form for energy.
double sigma(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q);

/// Gradient of sigma() with respect to q.
Vec grad_sigma(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q);

double transformed_hamiltonian(const SigmaConfig& cfg, const HamiltonianModel& model,
                               const PhaseState& state);

HamiltonianGradient grad_transformed_hamiltonian(const SigmaConfig& cfg,
                                                 const HamiltonianModel& model,
                                                 const PhaseState& state);

/// Everything the step assembly needs at one quadrature point, from a single force evaluation.
struct TransformedPoint {
  double U = 0.0;
  double H = 0.0;
  double sigma = 1.0;
  double K = 0.0;
  Vec grad_U;
  Vec grad_sigma;
  Vec dK_dq;
  Vec dK_dp;
  Mat hess_U;  // scratch
};

void evaluate_transformed(const SigmaConfig& cfg, const HamiltonianModel& model, const VecRef& q,
                          const VecRef& p, TransformedPoint& out);

/// sigma() only, reusing a precomputed U and grad U (energy kind needs both).
double sigma_from_potential(const SigmaConfig& cfg, const HamiltonianModel& model,
                            const VecRef& q, double U, const Vec& grad_U);

}  // namespace sqq
