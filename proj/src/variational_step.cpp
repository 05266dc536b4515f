#include "sqq/variational_step.hpp"

#include "sqq/errors.hpp"

namespace sqq {

Vec StepUnknowns::flatten() const {
  const int d = dof();
  Vec x(unknown_count(d, m(), n()));
  Eigen::Map<Mat>(x.data(), d, m()) = q_nodes.rightCols(m());
  Eigen::Map<Mat>(x.data() + d * m(), d, n() + 1) = p_nodes;
  return x;
}

StepUnknowns StepUnknowns::unflatten(const Vec& x, const VecRef& q_in, int m, int n) {
  const int d = static_cast<int>(q_in.size());
  if (x.size() != unknown_count(d, m, n)) {
    throw Error(ErrorCode::invalid_argument, "StepUnknowns: unknown vector has wrong length");
  }
  StepUnknowns u;
  u.q_nodes.resize(d, m + 1);
  u.q_nodes.col(0) = q_in;
  u.q_nodes.rightCols(m) = Eigen::Map<const Mat>(x.data(), d, m);
  u.p_nodes = Eigen::Map<const Mat>(x.data() + d * m, d, n + 1);
  return u;
}

StepWorkspace::StepWorkspace(StepContext ctx, int m, int n)
    : ctx_(ctx), d_(ctx.model ? ctx.model->dof() : 0), m_(m), n_(n) {
  if (!ctx_.model) throw Error(ErrorCode::invalid_argument, "StepWorkspace: no model");
  if (m_ < 1 || n_ < 0) throw Error(ErrorCode::invalid_argument, "StepWorkspace: bad m or n");
  if (ctx_.mode == StepMode::transformed) ctx_.sigma.validate();
  Q_.resize(d_, m_ + 1);
  P_.resize(d_, n_ + 1);
  q_in_ = Vec::Zero(d_);
  p_in_ = Vec::Zero(d_);
}

StepWorkspace::StepWorkspace(StepContext ctx, const ReferenceBasis& ref)
    : StepWorkspace(ctx, ref.m(), ref.n()) {
  q_ref_nodes_ = ref.q_nodes;
  N_end_ = ref.N_end;
}

void StepWorkspace::set_basis(const MappedBasis& basis) {
  if (basis.M.rows() != m_ + 1 || basis.N.rows() != n_ + 1 || basis.M.cols() != basis.N.cols()) {
    throw Error(ErrorCode::invalid_argument, "StepWorkspace: basis shape does not match (m, n)");
  }
  basis_ = basis;
  const auto g = basis_.gauss_weights.size();
  Qg_.resize(d_, g);
  Qdot_.resize(d_, g);
  Pg_.resize(d_, g);
  A_.resize(d_, g);
  B_.resize(d_, g);
  Hs_.resize(g);
  sig_.resize(g);
}

void StepWorkspace::set_incoming(const VecRef& q_in, const VecRef& p_in) {
  if (q_in.size() != d_ || p_in.size() != d_) {
    throw Error(ErrorCode::invalid_argument, "StepWorkspace: incoming state has wrong length");
  }
  q_in_ = q_in;
  p_in_ = p_in;
}

void StepWorkspace::gather(const Vec& x) {
  if (x.size() != size()) throw Error(ErrorCode::invalid_argument, "StepWorkspace: x has wrong length");
  if (basis_.M.size() == 0) throw Error(ErrorCode::invalid_argument, "StepWorkspace: basis not set");
  Q_.col(0) = q_in_;
  Q_.rightCols(m_) = Eigen::Map<const Mat>(x.data(), d_, m_);
  P_ = Eigen::Map<const Mat>(x.data() + d_ * m_, d_, n_ + 1);
  Qg_.noalias() = Q_ * basis_.M;
  Qdot_.noalias() = Q_ * basis_.M_dot;
  Pg_.noalias() = P_ * basis_.N;
}

void StepWorkspace::evaluate_points(bool want_gradients) {
  const HamiltonianModel& model = *ctx_.model;
  const Vec& inv_mass = model.inverse_mass();
  const auto g = Qg_.cols();
  ++evaluations_;
  if (ctx_.mode == StepMode::fixed) {
    for (Eigen::Index j = 0; j < g; ++j) {
      const double U = model.evaluate(Qg_.col(j), want_gradients ? &point_.grad_U : nullptr, nullptr);
      Hs_[j] = model.kinetic(Pg_.col(j)) + U;
      sig_[j] = 1.0;
      if (want_gradients) {
        A_.col(j) = point_.grad_U;
        B_.col(j) = inv_mass.cwiseProduct(Pg_.col(j));
      }
    }
    return;
  }
  for (Eigen::Index j = 0; j < g; ++j) {
    if (want_gradients) {
      evaluate_transformed(ctx_.sigma, model, Qg_.col(j), Pg_.col(j), point_);
      A_.col(j) = point_.dK_dq;
      B_.col(j) = point_.dK_dp;
      Hs_[j] = point_.K;
      sig_[j] = point_.sigma;
    } else {
      const double U = model.evaluate(Qg_.col(j), &point_.grad_U, nullptr);
      const double s = sigma_from_potential(ctx_.sigma, model, Qg_.col(j), U, point_.grad_U);
      Hs_[j] = s * (model.kinetic(Pg_.col(j)) + U - ctx_.sigma.H0);
      sig_[j] = s;
    }
  }
}

double StepWorkspace::action(const Vec& x) {
  gather(x);
  evaluate_points(false);
  const Vec& w = basis_.gauss_weights;
  double S = 0.0;
  for (Eigen::Index j = 0; j < w.size(); ++j) {
    S += w[j] * (Pg_.col(j).dot(Qdot_.col(j)) - Hs_[j]);
  }
  return S;
}

void StepWorkspace::residual(const Vec& x, Vec& out) {
  gather(x);
  evaluate_points(true);
  const auto& w = basis_.gauss_weights;
  Rq_.noalias() = (Pg_ * w.asDiagonal()) * basis_.M_dot.transpose();
  Rq_.noalias() -= (A_ * w.asDiagonal()) * basis_.M.transpose();
  Rp_.noalias() = ((Qdot_ - B_) * w.asDiagonal()) * basis_.N.transpose();
  out.resize(size());
  Eigen::Map<Mat>(out.data(), d_, m_) = Rq_.leftCols(m_);
  out.head(d_) += p_in_;
  Eigen::Map<Mat>(out.data() + d_ * m_, d_, n_ + 1) = Rp_;
}

Vec StepWorkspace::outgoing_momentum(const Vec& x) {
  gather(x);
  evaluate_points(true);
  const auto& w = basis_.gauss_weights;
  return (Pg_ * w.asDiagonal()) * basis_.M_dot.row(m_).transpose() -
         (A_ * w.asDiagonal()) * basis_.M.row(m_).transpose();
}

double StepWorkspace::time_increment(const Vec& x) {
  if (ctx_.mode == StepMode::fixed || ctx_.sigma.kind == SigmaKind::unit) {
    return basis_.length();
  }
  gather(x);
  evaluate_points(false);
  return basis_.gauss_weights.dot(sig_);
}

double StepWorkspace::momentum_discrepancy(const Vec& x, const Vec& p_out) const {
  if (N_end_.size() != n_ + 1) {
    throw Error(ErrorCode::invalid_argument, "StepWorkspace: constructed without a reference basis");
  }
  const Eigen::Map<const Mat> P(x.data() + d_ * m_, d_, n_ + 1);
  return (P * N_end_ - p_out).norm();
}

Vec StepWorkspace::initial_guess() const {
  if (q_ref_nodes_.size() != m_ + 1) {
    throw Error(ErrorCode::invalid_argument, "StepWorkspace: constructed without a reference basis");
  }
  const HamiltonianModel& model = *ctx_.model;
  Vec drift = model.inverse_mass().cwiseProduct(p_in_);
  if (ctx_.mode == StepMode::transformed) drift *= sigma(ctx_.sigma, model, q_in_);
  const double L = basis_.length();
  Vec x(size());
  for (int k = 1; k <= m_; ++k) {
    const double offset = 0.5 * (q_ref_nodes_[k] + 1.0) * L;
    x.segment((k - 1) * d_, d_) = q_in_ + offset * drift;
  }
  for (int k = 0; k <= n_; ++k) x.segment(d_ * m_ + k * d_, d_) = p_in_;
  return x;
}

namespace {

StepWorkspace make_workspace(const MappedBasis& basis, const StepUnknowns& u,
                             const StepContext& ctx) {
  StepWorkspace ws(ctx, u.m(), u.n());
  ws.set_basis(basis);
  return ws;
}

}  // namespace

double discrete_action(const MappedBasis& basis, const StepUnknowns& unknowns,
                       const StepContext& ctx) {
  StepWorkspace ws = make_workspace(basis, unknowns, ctx);
  ws.set_incoming(unknowns.q_nodes.col(0), Vec::Zero(unknowns.dof()));
  return ws.action(unknowns.flatten());
}

Vec residual(const MappedBasis& basis, const StepUnknowns& unknowns, const PhaseState& incoming,
             const StepContext& ctx) {
  StepWorkspace ws = make_workspace(basis, unknowns, ctx);
  ws.set_incoming(incoming.q, incoming.p);
  Vec out;
  // q_0 is the incoming position by construction; the stored node column is ignored.
  ws.residual(unknowns.flatten(), out);
  return out;
}

Vec outgoing_momentum(const MappedBasis& basis, const StepUnknowns& unknowns,
                      const StepContext& ctx) {
  StepWorkspace ws = make_workspace(basis, unknowns, ctx);
  ws.set_incoming(unknowns.q_nodes.col(0), Vec::Zero(unknowns.dof()));
  return ws.outgoing_momentum(unknowns.flatten());
}

double physical_time_increment(const MappedBasis& basis, const StepUnknowns& unknowns,
                               const StepContext& ctx) {
  StepWorkspace ws = make_workspace(basis, unknowns, ctx);
  ws.set_incoming(unknowns.q_nodes.col(0), Vec::Zero(unknowns.dof()));
  return ws.time_increment(unknowns.flatten());
}

}  // namespace sqq
