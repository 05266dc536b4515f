/**
 * @file basis.hpp
 * @brief Polynomial cardinal bases on [-1, 1] and their affine projection onto step intervals.
 *
 * The q and p trajectories inside one step are polynomials in cardinal (Lagrange) form.
 * Basis values and derivatives are computed once on the reference interval at the
 * Gauss-Legendre points (the warm-up) and reused on any interval [t_a, t_b]: values are
 * unchanged and derivatives scale by 2/L, so no linear system is solved per step.
 */
#pragma once

#include <Eigen/Dense>

namespace sqq {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

enum class NodeKind { equidistant, chebyshev_lobatto, chebyshev_gauss };

const char* to_string(NodeKind kind);

struct NodeFamily {
  NodeKind kind = NodeKind::chebyshev_lobatto;
  int count = 2;
};

/// Largest node count accepted by the monomial Vandermonde construction.
inline constexpr int kMaxBasisNodes = 25;
/// Tolerance on ||G^T x - rhs||_inf for the Vandermonde solve.
inline constexpr double kVandermondeResidualTol = 1e-8;

struct GaussRule {
  Vec nodes;
  Vec weights;
};

/// Gauss-Legendre rule on [-1, 1] with g points (exact to degree 2g-1).
GaussRule gauss_legendre_reference(int g);

/// Node positions on [-1, 1], strictly increasing.
Vec make_nodes(NodeFamily family);

struct BasisValues {
  Mat values;       // c x g, column j = cardinal basis at eval point j
  Mat derivatives;  // c x g
};

/// Cardinal basis values and derivatives through the monomial Vandermonde system.
BasisValues reference_basis_values(const Vec& nodes, const Vec& eval_points);

/// Warm-up product: everything a step needs that does not depend on the interval.
struct ReferenceBasis {
  NodeFamily q_family;
  NodeFamily p_family;
  Vec q_nodes;  // m+1 positions on [-1, 1]
  Vec p_nodes;  // n+1 positions on [-1, 1]
  Vec gauss_nodes;
  Vec gauss_weights;
  Mat M_hat;      // (m+1) x g
  Mat M_dot_hat;  // (m+1) x g
  Mat N_hat;      // (n+1) x g
  Mat N_dot_hat;  // (n+1) x g
  Vec N_end;      // p basis evaluated at +1, used for the node/endpoint momentum diagnostic

  int m() const { return static_cast<int>(q_nodes.size()) - 1; }
  int n() const { return static_cast<int>(p_nodes.size()) - 1; }
  int g() const { return static_cast<int>(gauss_nodes.size()); }
};

/// Default quadrature size: exact for the p^T qdot part of the action integrand.
inline int default_gauss_points(int m, int n) { return m + n + 1; }

ReferenceBasis warm_up(int m, int n, int g, NodeKind q_kind, NodeKind p_kind);

struct MappedBasis {
  double t_a = -1.0;
  double t_b = 1.0;
  Vec gauss_points;
  Vec gauss_weights;
  Mat M;
  Mat M_dot;
  Mat N;
  Mat N_dot;

  double length() const { return t_b - t_a; }
};

/// Projects the reference basis onto [t_a, t_b].
MappedBasis map_to_interval(const ReferenceBasis& ref, double t_a, double t_b);

/// Builds the basis for [t_a, t_b] from scratch: nodes are mapped into the interval and a
/// Vandermonde system in the interval's centred local time is solved. This is the
/// per-step-inversion path used when projection is switched off.
MappedBasis direct_interval_basis(const ReferenceBasis& ref, double t_a, double t_b);

}  // namespace sqq
