#include "sqq/solver.hpp"

#include <cmath>
#include <limits>
#include <string>

#include "sqq/errors.hpp"

namespace sqq {

const char* to_string(SolverMethod method) {
  switch (method) {
    case SolverMethod::newton_fd:
      return "newton-fd";
    case SolverMethod::broyden:
      return "broyden";
  }
  return "unknown";
}

void SolverConfig::validate() const {
  if (!(epsilon > 0.0)) throw Error(ErrorCode::invalid_argument, "SolverConfig: epsilon must be > 0");
  if (k_max < 1) throw Error(ErrorCode::invalid_argument, "SolverConfig: k_max must be >= 1");
  if (!(fd_step > 0.0)) throw Error(ErrorCode::invalid_argument, "SolverConfig: fd_step must be > 0");
  if (!(denom_guard > 0.0)) {
    throw Error(ErrorCode::invalid_argument, "SolverConfig: denom_guard must be > 0");
  }
}

Mat fd_jacobian(const ResidualFn& F, const Vec& x, double h, long* evaluations) {
  const auto n = x.size();
  Vec xp = x;
  Vec fp;
  Vec fm;
  Mat J(n, n);
  for (Eigen::Index j = 0; j < n; ++j) {
    const double xj = xp[j];
    xp[j] = xj + h;
    F(xp, fp);
    xp[j] = xj - h;
    F(xp, fm);
    xp[j] = xj;
    if (fp.size() != n) throw Error(ErrorCode::invalid_argument, "fd_jacobian: F must be square");
    J.col(j) = (fp - fm) / (2.0 * h);
  }
  if (evaluations) *evaluations += 2 * n;
  return J;
}

void broyden_update_in_place(Mat& J_inv, const Vec& s, const Vec& y, double guard) {
  const Vec Jy = J_inv * y;
  const double denom = s.dot(Jy);
  if (!(std::abs(denom) > guard * s.norm() * y.norm())) {
    throw Error(ErrorCode::degenerate_update, "Broyden update denominator s^T J^-1 y is degenerate");
  }
  const Eigen::RowVectorXd sJ = s.transpose() * J_inv;
  J_inv.noalias() += ((s - Jy) / denom) * sJ;
}

Mat broyden_update(const Mat& J_inv, const Vec& s, const Vec& y, double guard) {
  Mat out = J_inv;
  broyden_update_in_place(out, s, y, guard);
  return out;
}

namespace {

bool all_finite(const Vec& v) { return v.allFinite(); }

Mat inverse_of_fd_jacobian(const ResidualFn& F, const Vec& x, double h, long& evaluations) {
  const Mat J = fd_jacobian(F, x, h, &evaluations);
  Eigen::PartialPivLU<Mat> lu(J);
  Mat inv = lu.inverse();
  if (!inv.allFinite()) {
    throw Error(ErrorCode::non_finite, "finite-difference Jacobian is singular");
  }
  return inv;
}

[[noreturn]] void throw_non_convergence(const Vec& best, double best_norm, int iterations,
                                        double rel_err) {
  throw NonConvergenceError("solver did not converge in " + std::to_string(iterations) +
                                " iterations (relative step " + format_number(rel_err, 3) +
                                ", best residual " + format_number(best_norm, 3) + ")",
                            best, best_norm, iterations);
}

// Tracks the smallest relative step seen. Once it is within noise_floor_factor * epsilon and
// has not improved for noise_floor_window iterations, further iterations only reshuffle
// roundoff.
struct FloorTracker {
  double best = std::numeric_limits<double>::infinity();
  int since_best = 0;

  bool at_floor(const SolverConfig& cfg, double rel_err) {
    if (rel_err < best) {
      best = rel_err;
      since_best = 0;
      return false;
    }
    ++since_best;
    return since_best >= cfg.noise_floor_window && best <= cfg.noise_floor_factor * cfg.epsilon;
  }
};

double step_denominator(const Vec& x) {
  const double nx = x.norm();
  return nx < 1e-30 ? 1.0 : nx;
}

SolverState solve_newton(const ResidualFn& F, const Vec& x0, const SolverConfig& cfg) {
  SolverState st;
  st.x = x0;
  Vec Fx;
  Vec best = x0;
  double best_norm = std::numeric_limits<double>::infinity();
  Eigen::PartialPivLU<Mat> lu;
  FloorTracker floor;
  for (int k = 0; k < cfg.k_max; ++k) {
    F(st.x, Fx);
    ++st.residual_evaluations;
    if (!all_finite(Fx)) throw Error(ErrorCode::non_finite, "residual is not finite");
    st.residual_norm = Fx.norm();
    if (st.residual_norm < best_norm) {
      best_norm = st.residual_norm;
      best = st.x;
    }
    lu.compute(fd_jacobian(F, st.x, cfg.fd_step, &st.residual_evaluations));
    ++st.jacobian_builds;
    const Vec step = lu.solve(Fx);
    if (!all_finite(step)) throw Error(ErrorCode::non_finite, "Newton step is not finite");
    st.relative_error = step.norm() / step_denominator(st.x);
    st.x -= step;
    st.iterations = k + 1;
    if (st.relative_error <= cfg.epsilon) {
      st.converged = true;
      return st;
    }
    if (floor.at_floor(cfg, st.relative_error)) {
      st.converged = true;
      st.noise_floor = true;
      return st;
    }
  }
  throw_non_convergence(best, best_norm, st.iterations, st.relative_error);
}

SolverState solve_broyden(const ResidualFn& F, const Vec& x0, const Mat& J_inv0,
                          const SolverConfig& cfg, const UpdateObserver& on_update) {
  SolverState st;
  st.x = x0;
  const auto n = x0.size();
  if (J_inv0.size() == 0) {
    st.J_inv = inverse_of_fd_jacobian(F, x0, cfg.fd_step, st.residual_evaluations);
    ++st.jacobian_builds;
  } else {
    if (J_inv0.rows() != n || J_inv0.cols() != n) {
      throw Error(ErrorCode::invalid_argument, "solve: J_inv0 does not match x0");
    }
    st.J_inv = J_inv0;
  }

  Vec Fx;
  Vec F_prev;
  Vec x_prev;
  Vec step;
  Vec s;
  Vec y;
  bool have_prev = false;
  bool degenerate_rebuilt = false;
  bool stall_rebuilt = false;
  int stall_count = 0;
  double prev_err = std::numeric_limits<double>::infinity();
  FloorTracker floor;
  Vec best = x0;
  double best_norm = std::numeric_limits<double>::infinity();

  for (int k = 0; k < cfg.k_max; ++k) {
    F(st.x, Fx);
    ++st.residual_evaluations;
    if (!all_finite(Fx)) throw Error(ErrorCode::non_finite, "residual is not finite");
    st.residual_norm = Fx.norm();
    if (st.residual_norm < best_norm) {
      best_norm = st.residual_norm;
      best = st.x;
    }
    if (have_prev) {
      s = st.x - x_prev;
      y = Fx - F_prev;
      try {
        broyden_update_in_place(st.J_inv, s, y, cfg.denom_guard);
        if (on_update) on_update(st.J_inv, s, y);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::degenerate_update || degenerate_rebuilt) throw;
        degenerate_rebuilt = true;
        st.J_inv = inverse_of_fd_jacobian(F, st.x, cfg.fd_step, st.residual_evaluations);
        ++st.jacobian_builds;
      }
    }
    step.noalias() = st.J_inv * Fx;
    if (!all_finite(step)) throw Error(ErrorCode::non_finite, "Broyden step is not finite");
    x_prev = st.x;
    F_prev = Fx;
    st.relative_error = step.norm() / step_denominator(st.x);
    st.x -= step;
    have_prev = true;
    st.iterations = k + 1;
    if (st.relative_error <= cfg.epsilon) {
      st.converged = true;
      return st;
    }
    stall_count = st.relative_error >= prev_err ? stall_count + 1 : 0;
    prev_err = st.relative_error;
    if (floor.at_floor(cfg, st.relative_error)) {
      st.converged = true;
      st.noise_floor = true;
      return st;
    }
    if (stall_count >= cfg.stall_window && !stall_rebuilt) {
      stall_rebuilt = true;
      stall_count = 0;
      st.J_inv = inverse_of_fd_jacobian(F, st.x, cfg.fd_step, st.residual_evaluations);
      ++st.jacobian_builds;
      have_prev = false;
    }
  }
  throw_non_convergence(best, best_norm, st.iterations, st.relative_error);
}

}  // namespace

SolverState solve(const ResidualFn& F, const Vec& x0, const Mat& J_inv0, const SolverConfig& cfg,
                  const UpdateObserver& on_update) {
  cfg.validate();
  if (!all_finite(x0)) throw Error(ErrorCode::non_finite, "solve: initial guess is not finite");
  if (cfg.method == SolverMethod::newton_fd) return solve_newton(F, x0, cfg);
  return solve_broyden(F, x0, J_inv0, cfg, on_update);
}

}  // namespace sqq
