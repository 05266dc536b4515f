#include "sqq/basis.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "sqq/errors.hpp"

namespace sqq {

const char* to_string(NodeKind kind) {
  switch (kind) {
    case NodeKind::equidistant:
      return "equidistant";
    case NodeKind::chebyshev_lobatto:
      return "chebyshev-lobatto";
    case NodeKind::chebyshev_gauss:
      return "chebyshev-gauss";
  }
  return "unknown";
}

GaussRule gauss_legendre_reference(int g) {
  if (g < 1) {
    throw Error(ErrorCode::invalid_argument, "gauss_legendre_reference: g must be >= 1");
  }
  GaussRule rule{Vec::Zero(g), Vec::Zero(g)};
  const int half = (g + 1) / 2;
  for (int i = 0; i < half; ++i) {
    // Root i of P_g counted from the right end, refined by Newton on the three-term recurrence.
    double x = std::cos(std::numbers::pi * (i + 0.75) / (g + 0.5));
    double dp = 0.0;
    for (int it = 0; it < 100; ++it) {
      double p0 = 1.0;
      double p1 = x;
      for (int k = 2; k <= g; ++k) {
        const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
        p0 = p1;
        p1 = pk;
      }
      dp = g * (x * p1 - p0) / (x * x - 1.0);
      const double dx = p1 / dp;
      x -= dx;
      if (std::abs(dx) < 1e-16) break;
    }
    // Final derivative at the converged root for the weight formula.
    double p0 = 1.0;
    double p1 = x;
    for (int k = 2; k <= g; ++k) {
      const double pk = ((2.0 * k - 1.0) * x * p1 - (k - 1.0) * p0) / k;
      p0 = p1;
      p1 = pk;
    }
    dp = g * (x * p1 - p0) / (x * x - 1.0);
    const double w = 2.0 / ((1.0 - x * x) * dp * dp);
    rule.nodes[i] = -x;
    rule.nodes[g - 1 - i] = x;
    rule.weights[i] = w;
    rule.weights[g - 1 - i] = w;
  }
  if (g % 2 == 1) rule.nodes[g / 2] = 0.0;
  return rule;
}

Vec make_nodes(NodeFamily family) {
  const int c = family.count;
  const double pi = std::numbers::pi;
  Vec nodes(std::max(c, 0));
  switch (family.kind) {
    case NodeKind::equidistant:
      if (c < 2) throw Error(ErrorCode::invalid_argument, "equidistant nodes need count >= 2");
      for (int k = 0; k < c; ++k) nodes[k] = -1.0 + 2.0 * k / (c - 1);
      nodes[c - 1] = 1.0;
      break;
    case NodeKind::chebyshev_lobatto:
      if (c < 2) throw Error(ErrorCode::invalid_argument, "Chebyshev-Lobatto nodes need count >= 2");
      for (int k = 0; k < c; ++k) nodes[k] = -std::cos(k * pi / (c - 1));
      nodes[0] = -1.0;
      nodes[c - 1] = 1.0;
      break;
    case NodeKind::chebyshev_gauss:
      if (c < 1) throw Error(ErrorCode::invalid_argument, "Chebyshev-Gauss nodes need count >= 1");
      for (int k = 0; k < c; ++k) nodes[k] = -std::cos((2.0 * k + 1.0) * pi / (2.0 * c));
      break;
  }
  // Symmetric families: snap the middle node so cos roundoff does not leave 6e-17 behind.
  if (c % 2 == 1) nodes[c / 2] = 0.0;
  return nodes;
}

namespace {

void check_nodes(const Vec& nodes) {
  const auto c = nodes.size();
  if (c < 1) throw Error(ErrorCode::invalid_argument, "basis needs at least one node");
  if (c > kMaxBasisNodes) {
    throw Error(ErrorCode::conditioning_limit,
                "basis with " + std::to_string(c) + " nodes exceeds the Vandermonde cap of " +
                    std::to_string(kMaxBasisNodes));
  }
  for (Eigen::Index i = 0; i < c; ++i) {
    for (Eigen::Index j = i + 1; j < c; ++j) {
      if (nodes[i] == nodes[j]) {
        throw Error(ErrorCode::invalid_argument, "basis nodes must be distinct");
      }
    }
  }
}

// Monomial rows of p(t) and pdot(t), one column per evaluation point.
void monomial_columns(const Vec& points, int c, Mat& p, Mat& pdot) {
  const auto g = points.size();
  p.resize(c, g);
  pdot.resize(c, g);
  for (Eigen::Index j = 0; j < g; ++j) {
    const double t = points[j];
    double power = 1.0;
    pdot(0, j) = 0.0;
    for (int k = 0; k < c; ++k) {
      p(k, j) = power;
      if (k + 1 < c) pdot(k + 1, j) = (k + 1) * power;
      power *= t;
    }
  }
}

// Solves G^T X = rhs for the cardinal coefficients, with G_ik = t_i^k. Columns of G are
// optionally equilibrated (scale[k]) before factorisation.
Mat solve_cardinal(const Mat& G, const Mat& rhs, const Vec& scale) {
  const Mat Gs = G * scale.asDiagonal();
  const Mat rhs_s = scale.asDiagonal() * rhs;
  Eigen::FullPivLU<Mat> lu(Gs.transpose());
  if (!lu.isInvertible()) {
    throw Error(ErrorCode::invalid_argument, "Vandermonde matrix is singular (duplicate nodes?)");
  }
  Mat X = lu.solve(rhs_s);
  const double residual = (Gs.transpose() * X - rhs_s).cwiseAbs().maxCoeff();
  if (!(residual < kVandermondeResidualTol)) {
    throw Error(ErrorCode::conditioning_limit,
                "Vandermonde residual " + format_number(residual) + " above tolerance");
  }
  return X;
}

Mat vandermonde(const Vec& nodes) {
  const auto c = nodes.size();
  Mat G(c, c);
  for (Eigen::Index i = 0; i < c; ++i) {
    double power = 1.0;
    for (Eigen::Index k = 0; k < c; ++k) {
      G(i, k) = power;
      power *= nodes[i];
    }
  }
  return G;
}

BasisValues cardinal_basis(const Vec& nodes, const Vec& eval_points, const Vec& scale) {
  const int c = static_cast<int>(nodes.size());
  Mat p;
  Mat pdot;
  monomial_columns(eval_points, c, p, pdot);
  const Mat G = vandermonde(nodes);
  Mat rhs(c, 2 * eval_points.size());
  rhs << p, pdot;
  const Mat X = solve_cardinal(G, rhs, scale);
  return BasisValues{X.leftCols(eval_points.size()), X.rightCols(eval_points.size())};
}

}  // namespace

BasisValues reference_basis_values(const Vec& nodes, const Vec& eval_points) {
  check_nodes(nodes);
  return cardinal_basis(nodes, eval_points, Vec::Ones(nodes.size()));
}

ReferenceBasis warm_up(int m, int n, int g, NodeKind q_kind, NodeKind p_kind) {
  if (m < 1) throw Error(ErrorCode::invalid_argument, "warm_up: m must be >= 1");
  if (n < 0) throw Error(ErrorCode::invalid_argument, "warm_up: n must be >= 0");
  if (g < 1) throw Error(ErrorCode::invalid_argument, "warm_up: g must be >= 1");

  ReferenceBasis ref;
  ref.q_family = NodeFamily{q_kind, m + 1};
  ref.p_family = NodeFamily{p_kind, n + 1};
  ref.q_nodes = make_nodes(ref.q_family);
  ref.p_nodes = make_nodes(ref.p_family);
  if (ref.q_nodes[0] != -1.0 || ref.q_nodes[m] != 1.0) {
    throw Error(ErrorCode::invalid_argument,
                "q nodes must include both interval endpoints (equidistant or Chebyshev-Lobatto)");
  }
  const GaussRule rule = gauss_legendre_reference(g);
  ref.gauss_nodes = rule.nodes;
  ref.gauss_weights = rule.weights;

  BasisValues q_basis = reference_basis_values(ref.q_nodes, ref.gauss_nodes);
  ref.M_hat = std::move(q_basis.values);
  ref.M_dot_hat = std::move(q_basis.derivatives);

  Vec p_points(g + 1);
  p_points << ref.gauss_nodes, 1.0;
  BasisValues p_basis = reference_basis_values(ref.p_nodes, p_points);
  ref.N_hat = p_basis.values.leftCols(g);
  ref.N_dot_hat = p_basis.derivatives.leftCols(g);
  ref.N_end = p_basis.values.col(g);
  return ref;
}

MappedBasis map_to_interval(const ReferenceBasis& ref, double t_a, double t_b) {
  if (!(t_b > t_a)) {
    throw Error(ErrorCode::invalid_interval, "map_to_interval: need t_b > t_a");
  }
  const double L = t_b - t_a;
  MappedBasis out;
  out.t_a = t_a;
  out.t_b = t_b;
  out.gauss_points = (t_a + (ref.gauss_nodes.array() + 1.0) * (0.5 * L)).matrix();
  out.gauss_weights = (0.5 * L) * ref.gauss_weights;
  out.M = ref.M_hat;
  out.N = ref.N_hat;
  out.M_dot = (2.0 / L) * ref.M_dot_hat;
  out.N_dot = (2.0 / L) * ref.N_dot_hat;
  return out;
}

MappedBasis direct_interval_basis(const ReferenceBasis& ref, double t_a, double t_b) {
  if (!(t_b > t_a)) {
    throw Error(ErrorCode::invalid_interval, "direct_interval_basis: need t_b > t_a");
  }
  const double L = t_b - t_a;
  const double mid = 0.5 * (t_a + t_b);
  MappedBasis out;
  out.t_a = t_a;
  out.t_b = t_b;
  out.gauss_points = (t_a + (ref.gauss_nodes.array() + 1.0) * (0.5 * L)).matrix();
  out.gauss_weights = (0.5 * L) * ref.gauss_weights;

  const Vec local_points = (out.gauss_points.array() - mid).matrix();
  auto solve = [&](const Vec& ref_nodes, Mat& values, Mat& derivatives) {
    const Vec local_nodes = (t_a + (ref_nodes.array() + 1.0) * (0.5 * L) - mid).matrix();
    check_nodes(local_nodes);
    // Column k of G is equilibrated by the largest |u_i|^k over the nodes.
    const double span = local_nodes.cwiseAbs().maxCoeff();
    Vec scale(local_nodes.size());
    for (Eigen::Index k = 0; k < scale.size(); ++k) scale[k] = std::pow(span, -static_cast<double>(k));
    BasisValues b = cardinal_basis(local_nodes, local_points, scale);
    values = std::move(b.values);
    derivatives = std::move(b.derivatives);
  };
  solve(ref.q_nodes, out.M, out.M_dot);
  solve(ref.p_nodes, out.N, out.N_dot);
  return out;
}

}  // namespace sqq
