#include "sqq/forces.hpp"

#include <cmath>
#include <string>

#include "sqq/errors.hpp"

namespace sqq {

Vec HamiltonianModel::grad_potential(const VecRef& q) const {
  Vec g;
  evaluate(q, &g, nullptr);
  return g;
}

Mat HamiltonianModel::hess_potential(const VecRef& q) const {
  Mat h;
  evaluate(q, nullptr, &h);
  return h;
}

double HamiltonianModel::kinetic(const VecRef& p) const {
  return 0.5 * (p.array().square() * inverse_mass_.array()).sum();
}

double HamiltonianModel::hamiltonian(const VecRef& q, const VecRef& p) const {
  return kinetic(p) + potential(q);
}

HamiltonianGradient HamiltonianModel::grad_hamiltonian(const PhaseState& s) const {
  HamiltonianGradient out;
  evaluate(s.q, &out.dq, nullptr);
  out.dp = (inverse_mass_.array() * s.p.array()).matrix();
  return out;
}

namespace {

Vec per_coordinate_inverse_mass(int space_dim, const Vec& masses) {
  Vec inv(space_dim * masses.size());
  for (Eigen::Index i = 0; i < masses.size(); ++i) {
    inv.segment(i * space_dim, space_dim).setConstant(1.0 / masses[i]);
  }
  return inv;
}

}  // namespace

NBodySystem::NBodySystem(int space_dim, Vec masses, double grav_const, double softening)
    : HamiltonianModel(per_coordinate_inverse_mass(space_dim, masses)),
      space_dim_(space_dim),
      masses_(std::move(masses)),
      grav_const_(grav_const),
      softening_(softening) {
  if (space_dim_ != 2 && space_dim_ != 3) {
    throw Error(ErrorCode::invalid_argument, "NBodySystem: space_dim must be 2 or 3");
  }
  if (masses_.size() < 1) throw Error(ErrorCode::invalid_argument, "NBodySystem: no bodies");
  if ((masses_.array() <= 0.0).any()) {
    throw Error(ErrorCode::invalid_argument, "NBodySystem: masses must be positive");
  }
  if (!(grav_const_ > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "NBodySystem: grav_const must be positive");
  }
  if (!(softening_ >= 0.0)) {
    throw Error(ErrorCode::invalid_argument, "NBodySystem: softening must be nonnegative");
  }
}

double NBodySystem::evaluate(const VecRef& q, Vec* grad, Mat* hess) const {
  const int nb = n_bodies();
  const int sd = space_dim_;
  const int d = nb * sd;
  if (q.size() != d) throw Error(ErrorCode::invalid_argument, "NBodySystem: q has wrong length");
  if (grad) grad->setZero(d);
  if (hess) hess->setZero(d, d);
  const double eps2 = softening_ * softening_;
  double U = 0.0;
  double r[3];
  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      double r2 = eps2;
      for (int k = 0; k < sd; ++k) {
        r[k] = q[i * sd + k] - q[j * sd + k];
        r2 += r[k] * r[k];
      }
      if (r2 == 0.0) {
        throw Error(ErrorCode::singularity, "NBodySystem: bodies " + std::to_string(i) + " and " +
                                                std::to_string(j) + " coincide");
      }
      const double gm = grav_const_ * masses_[i] * masses_[j];
      const double inv_r = 1.0 / std::sqrt(r2);
      const double inv_r3 = inv_r * inv_r * inv_r;
      U -= gm * inv_r;
      if (grad) {
        for (int k = 0; k < sd; ++k) {
          const double f = gm * r[k] * inv_r3;
          (*grad)[i * sd + k] += f;
          (*grad)[j * sd + k] -= f;
        }
      }
      if (hess) {
        const double inv_r5 = inv_r3 * inv_r * inv_r;
        for (int a = 0; a < sd; ++a) {
          for (int b = 0; b < sd; ++b) {
            const double block = gm * ((a == b ? inv_r3 : 0.0) - 3.0 * r[a] * r[b] * inv_r5);
            (*hess)(i * sd + a, i * sd + b) += block;
            (*hess)(j * sd + a, j * sd + b) += block;
            (*hess)(i * sd + a, j * sd + b) -= block;
            (*hess)(j * sd + a, i * sd + b) -= block;
          }
        }
      }
    }
  }
  return U;
}

CentralForceModel::CentralForceModel(double mu, int space_dim)
    : HamiltonianModel(Vec::Ones(space_dim)), mu_(mu) {
  if (!(mu_ > 0.0)) throw Error(ErrorCode::invalid_argument, "CentralForceModel: mu must be positive");
  if (space_dim != 2 && space_dim != 3) {
    throw Error(ErrorCode::invalid_argument, "CentralForceModel: space_dim must be 2 or 3");
  }
}

double CentralForceModel::evaluate(const VecRef& q, Vec* grad, Mat* hess) const {
  const int d = dof();
  if (q.size() != d) throw Error(ErrorCode::invalid_argument, "CentralForceModel: q has wrong length");
  const double r2 = q.squaredNorm();
  if (r2 == 0.0) throw Error(ErrorCode::singularity, "CentralForceModel: particle at the centre");
  const double inv_r = 1.0 / std::sqrt(r2);
  const double inv_r3 = inv_r * inv_r * inv_r;
  if (grad) *grad = (mu_ * inv_r3) * q;
  if (hess) {
    const double inv_r5 = inv_r3 * inv_r * inv_r;
    *hess = (mu_ * inv_r3) * Mat::Identity(d, d) - (3.0 * mu_ * inv_r5) * (q * q.transpose());
  }
  return -mu_ * inv_r;
}

std::pair<CentralForceModel, PhaseState> kepler_model(double e) {
  if (!(e >= 0.0 && e < 1.0)) {
    throw Error(ErrorCode::invalid_argument, "kepler_model: eccentricity must lie in [0, 1)");
  }
  PhaseState s;
  s.q = Vec(2);
  s.p = Vec(2);
  s.q << 1.0 - e, 0.0;
  s.p << 0.0, std::sqrt((1.0 + e) / (1.0 - e));
  s.t = 0.0;
  return {CentralForceModel(1.0, 2), s};
}

}  // namespace sqq
