/**
 * @file forces.hpp
 * @brief Gravitational Hamiltonians H = 1/2 p^T M^-1 p + U(q) and derivatives of U.
 */
#pragma once

#include <utility>

#include <Eigen/Dense>

#include "sqq/basis.hpp"

namespace sqq {

using VecRef = Eigen::Ref<const Vec>;

struct PhaseState {
  Vec q;
  Vec p;
  double t = 0.0;
};

struct HamiltonianGradient {
  Vec dq;
  Vec dp;
};

/// Evaluator bundle for a separable Hamiltonian with diagonal mass matrix.
class HamiltonianModel {
 public:
  virtual ~HamiltonianModel() = default;

  int dof() const { return static_cast<int>(inverse_mass_.size()); }

  /// Diagonal of M^-1, one entry per coordinate.
  const Vec& inverse_mass() const { return inverse_mass_; }

  /// Returns U(q). Non-null grad / hess receive the gradient and Hessian of U.
  virtual double evaluate(const VecRef& q, Vec* grad, Mat* hess) const = 0;

  double potential(const VecRef& q) const { return evaluate(q, nullptr, nullptr); }
  Vec grad_potential(const VecRef& q) const;
  Mat hess_potential(const VecRef& q) const;

  double kinetic(const VecRef& p) const;
  double hamiltonian(const VecRef& q, const VecRef& p) const;
  double hamiltonian(const PhaseState& s) const { return hamiltonian(s.q, s.p); }
  HamiltonianGradient grad_hamiltonian(const PhaseState& s) const;

 protected:
  explicit HamiltonianModel(Vec inverse_mass) : inverse_mass_(std::move(inverse_mass)) {}

 private:
  Vec inverse_mass_;
};

/// Point masses with pairwise Newtonian attraction, optionally Plummer-softened.
class NBodySystem : public HamiltonianModel {
 public:
  NBodySystem(int space_dim, Vec masses, double grav_const, double softening = 0.0);

  int n_bodies() const { return static_cast<int>(masses_.size()); }
  int space_dim() const { return space_dim_; }
  const Vec& masses() const { return masses_; }
  double grav_const() const { return grav_const_; }
  double softening() const { return softening_; }

  double evaluate(const VecRef& q, Vec* grad, Mat* hess) const override;

 private:
  int space_dim_;
  Vec masses_;
  double grav_const_;
  double softening_;
};

/// Unit-mass particle in the field of a fixed centre: H = |p|^2/2 - mu/|q|.
class CentralForceModel : public HamiltonianModel {
 public:
  explicit CentralForceModel(double mu = 1.0, int space_dim = 2);

  double mu() const { return mu_; }

  double evaluate(const VecRef& q, Vec* grad, Mat* hess) const override;

 private:
  double mu_;
};

/// Reduced Kepler problem with eccentricity e in [0, 1): q = (1-e, 0), p = (0, sqrt((1+e)/(1-e))).
/// The orbit has semi-major axis 1 and period 2 pi.
std::pair<CentralForceModel, PhaseState> kepler_model(double e);

}  // namespace sqq
