/**
 * @file variational_step.hpp
 * @brief Discrete action of one step and its stationarity system.
 *
 * Inside a step q(t) = sum_k M_k(t) q_k (k = 0..m) and p(t) = sum_k N_k(t) p_k (k = 0..n).
 * The action S = sum_j w_j [p(xi_j)^T qdot(xi_j) - Hs(q(xi_j), p(xi_j))] is evaluated by
 * Gauss quadrature, where Hs is H in fixed mode and K = sigma (H - H0) in transformed mode
 * (the interval is then in the fictitious time tau).
 *
 * Unknowns are q_1..q_m and p_0..p_n, flattened node by node (all d coordinates of a node
 * are contiguous), giving d (m + n + 1) entries. q_0 is the incoming position. The residual
 * has the same length:
 *   dS/dq_0 + p_in                (d equations)
 *   dS/dq_i,  i = 1..m-1          (d (m-1) equations)
 *   dS/dp_i,  i = 0..n            (d (n+1) equations)
 * and the outgoing momentum is dS/dq_m.
 */
#pragma once

#include "sqq/basis.hpp"
#include "sqq/forces.hpp"
#include "sqq/time_transform.hpp"

namespace sqq {

enum class StepMode { fixed, transformed };

struct StepContext {
  const HamiltonianModel* model = nullptr;
  StepMode mode = StepMode::fixed;
  SigmaConfig sigma;
};

/// Node values of one step; column k of q_nodes is q_k, column 0 being the incoming q.
struct StepUnknowns {
  Mat q_nodes;  // d x (m+1)
  Mat p_nodes;  // d x (n+1)

  int dof() const { return static_cast<int>(q_nodes.rows()); }
  int m() const { return static_cast<int>(q_nodes.cols()) - 1; }
  int n() const { return static_cast<int>(p_nodes.cols()) - 1; }

  Vec flatten() const;
  static StepUnknowns unflatten(const Vec& x, const VecRef& q_in, int m, int n);
};

inline int unknown_count(int d, int m, int n) { return d * (m + n + 1); }

/// Reusable buffers for evaluating one step's action and residual.
class StepWorkspace {
 public:
  StepWorkspace(StepContext ctx, int m, int n);
  /// Also keeps the reference node positions used by initial_guess and the p(t_b) diagnostic.
  StepWorkspace(StepContext ctx, const ReferenceBasis& ref);

  const StepContext& context() const { return ctx_; }
  int dof() const { return d_; }
  int size() const { return unknown_count(d_, m_, n_); }

  void set_basis(const MappedBasis& basis);
  const MappedBasis& basis() const { return basis_; }
  void set_incoming(const VecRef& q_in, const VecRef& p_in);

  double action(const Vec& x);
  void residual(const Vec& x, Vec& out);
  /// dS/dq_m at x.
  Vec outgoing_momentum(const Vec& x);
  /// Fixed mode: the interval length. Transformed mode: sum_j w_j sigma(q(xi_j)).
  double time_increment(const Vec& x);
  /// |p(t_b) - dS/dq_m| where p(t_b) is the momentum polynomial at the interval end.
  double momentum_discrepancy(const Vec& x, const Vec& p_out) const;

  /// Initial guess: q nodes drift linearly with M^-1 p_in (scaled by sigma(q_in) in
  /// transformed mode), p nodes equal p_in.
  Vec initial_guess() const;

  long evaluations() const { return evaluations_; }

 private:
  void gather(const Vec& x);
  void evaluate_points(bool want_gradients);

  StepContext ctx_;
  int d_;
  int m_;
  int n_;
  MappedBasis basis_;
  Vec q_in_;
  Vec p_in_;
  Vec q_ref_nodes_;
  Vec N_end_;

  Mat Q_;     // d x (m+1)
  Mat P_;     // d x (n+1)
  Mat Qg_;    // d x g
  Mat Qdot_;  // d x g
  Mat Pg_;    // d x g
  Mat A_;     // dHs/dq at Gauss points
  Mat B_;     // dHs/dp at Gauss points
  Vec Hs_;    // Hs at Gauss points
  Vec sig_;   // sigma at Gauss points
  Mat Rq_;    // d x (m+1)
  Mat Rp_;    // d x (n+1)
  TransformedPoint point_;
  long evaluations_ = 0;
};

double discrete_action(const MappedBasis& basis, const StepUnknowns& unknowns,
                       const StepContext& ctx);
Vec residual(const MappedBasis& basis, const StepUnknowns& unknowns, const PhaseState& incoming,
             const StepContext& ctx);
Vec outgoing_momentum(const MappedBasis& basis, const StepUnknowns& unknowns,
                      const StepContext& ctx);
double physical_time_increment(const MappedBasis& basis, const StepUnknowns& unknowns,
                               const StepContext& ctx);

}  // namespace sqq
