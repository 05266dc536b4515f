#include "sqq/diagnostics.hpp"

#include <algorithm>
#include <cmath>

#include "sqq/errors.hpp"

namespace sqq {

EnergyErrorSeries energy_error_series(const Trajectory& traj) {
  const auto n = static_cast<Eigen::Index>(traj.samples.size());
  EnergyErrorSeries out;
  out.t.resize(n);
  out.abs_err.resize(n);
  out.rel_err.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const Sample& s = traj.samples[i];
    out.t[i] = s.t;
    out.abs_err[i] = std::abs(s.H - traj.H0);
    out.rel_err[i] = traj.H0 != 0.0 ? out.abs_err[i] / std::abs(traj.H0) : 0.0;
  }
  return out;
}

namespace {

int body_count(const VecRef& q, int space_dim) { return static_cast<int>(q.size()) / space_dim; }

void check_space_dim(int space_dim) {
  if (space_dim < 1) throw Error(ErrorCode::invalid_argument, "space_dim must be >= 1");
}

}  // namespace

ClosestApproach closest_approach(const Trajectory& traj, int space_dim, int body_a, int body_b) {
  check_space_dim(space_dim);
  ClosestApproach best;
  for (const Sample& s : traj.samples) {
    const int nb = body_count(s.q, space_dim);
    for (int i = 0; i < nb; ++i) {
      for (int j = i + 1; j < nb; ++j) {
        if (body_a >= 0 && body_b >= 0 &&
            !((i == body_a && j == body_b) || (i == body_b && j == body_a))) {
          continue;
        }
        const double r = (s.q.segment(i * space_dim, space_dim) -
                          s.q.segment(j * space_dim, space_dim)).norm();
        if (r < best.distance) best = {r, s.t, i, j};
      }
    }
  }
  return best;
}

Mat speed_series(const Trajectory& traj, const NBodySystem& system) {
  const int sd = system.space_dim();
  const int nb = system.n_bodies();
  Mat out(static_cast<Eigen::Index>(traj.samples.size()), nb);
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    const Vec& p = traj.samples[k].p;
    for (int i = 0; i < nb; ++i) {
      out(static_cast<Eigen::Index>(k), i) = p.segment(i * sd, sd).norm() / system.masses()[i];
    }
  }
  return out;
}

Mat phase_series(const Trajectory& traj, int coordinate) {
  if (coordinate < 0 || coordinate >= traj.dof) {
    throw Error(ErrorCode::invalid_argument, "phase_series: coordinate out of range");
  }
  Mat out(static_cast<Eigen::Index>(traj.samples.size()), 2);
  for (std::size_t k = 0; k < traj.samples.size(); ++k) {
    out(static_cast<Eigen::Index>(k), 0) = traj.samples[k].q[coordinate];
    out(static_cast<Eigen::Index>(k), 1) = traj.samples[k].p[coordinate];
  }
  return out;
}

DiagnosticBundle diagnostics(const Trajectory& traj, const ProblemSpec& problem) {
  if (traj.samples.empty()) throw Error(ErrorCode::invalid_argument, "diagnostics: empty trajectory");
  DiagnosticBundle out;
  out.energy = energy_error_series(traj);
  out.max_abs_energy_error = std::max(traj.stats.max_abs_energy_error, out.energy.abs_err.maxCoeff());
  out.max_rel_energy_error = std::max(traj.stats.max_rel_energy_error, out.energy.rel_err.maxCoeff());
  if (const NBodySystem* nb = problem.nbody()) {
    out.speeds = speed_series(traj, *nb);
    out.closest = closest_approach(traj, nb->space_dim());
  }
  return out;
}

// ---------------------------------------------------------------------------------------

EnergyTracker::EnergyTracker(const HamiltonianModel& model, double H0, double t0, double duration,
                             int bins, double fit_from_fraction)
    : model_(&model),
      H0_(H0),
      t0_(t0),
      duration_(duration),
      fit_from_(t0 + fit_from_fraction * duration),
      bin_max_(Vec::Zero(std::max(bins, 1))) {
  if (!(duration > 0.0)) throw Error(ErrorCode::invalid_argument, "EnergyTracker: duration <= 0");
}

void EnergyTracker::observe(const PhaseState& s) {
  const double e = std::abs(model_->hamiltonian(s) - H0_);
  const auto nbins = bin_max_.size();
  auto bin = static_cast<Eigen::Index>(std::floor((s.t - t0_) / duration_ * static_cast<double>(nbins)));
  bin = std::clamp<Eigen::Index>(bin, 0, nbins - 1);
  bin_max_[bin] = std::max(bin_max_[bin], e);
  if (s.t >= fit_from_) {
    ++n_;
    st_ += s.t;
    se_ += e;
    stt_ += s.t * s.t;
    ste_ += s.t * e;
  }
}

double EnergyTracker::max_between(double a, double b) const {
  const auto nbins = static_cast<double>(bin_max_.size());
  const auto lo = static_cast<Eigen::Index>(std::floor(a * nbins + 1e-9));
  const auto hi = static_cast<Eigen::Index>(std::ceil(b * nbins - 1e-9));
  double out = 0.0;
  for (Eigen::Index i = std::max<Eigen::Index>(lo, 0); i < std::min(hi, bin_max_.size()); ++i) {
    out = std::max(out, bin_max_[i]);
  }
  return out;
}

double EnergyTracker::drift_rate() const {
  if (n_ < 2) return 0.0;
  const double n = static_cast<double>(n_);
  // Centre before differencing; raw sums of t^2 lose digits over long runs.
  const double mt = st_ / n;
  const double me = se_ / n;
  const double var = stt_ / n - mt * mt;
  if (!(var > 0.0)) return 0.0;
  return (ste_ / n - mt * me) / var;
}

void EncounterTracker::observe(const PhaseState& s) {
  const int nb = body_count(s.q, space_dim_);
  if (pairs_.empty()) pairs_.resize(static_cast<std::size_t>(nb * nb));
  for (int i = 0; i < nb; ++i) {
    for (int j = i + 1; j < nb; ++j) {
      const double r =
          (s.q.segment(i * space_dim_, space_dim_) - s.q.segment(j * space_dim_, space_dim_)).norm();
      ClosestApproach& c = pairs_[static_cast<std::size_t>(i * nb + j)];
      if (r < c.distance) c = {r, s.t, i, j};
    }
  }
}

ClosestApproach EncounterTracker::closest(int body_a, int body_b) const {
  ClosestApproach best;
  for (const ClosestApproach& c : pairs_) {
    if (c.body_a < 0) continue;
    if (body_a >= 0 && body_b >= 0 &&
        !((c.body_a == body_a && c.body_b == body_b) || (c.body_a == body_b && c.body_b == body_a))) {
      continue;
    }
    if (c.distance < best.distance) best = c;
  }
  return best;
}

SpeedRangeTracker::SpeedRangeTracker(const NBodySystem& system)
    : system_(&system),
      min_(Vec::Constant(system.n_bodies(), std::numeric_limits<double>::infinity())),
      max_(Vec::Zero(system.n_bodies())) {}

void SpeedRangeTracker::observe(const PhaseState& s) {
  const int sd = system_->space_dim();
  for (int i = 0; i < system_->n_bodies(); ++i) {
    const double v = s.p.segment(i * sd, sd).norm() / system_->masses()[i];
    min_[i] = std::min(min_[i], v);
    max_[i] = std::max(max_[i], v);
  }
}

MomentumTracker::MomentumTracker(int space_dim, const PhaseState& initial)
    : space_dim_(space_dim),
      P0_(total_linear_momentum(space_dim, initial.p)),
      L0_(total_angular_momentum(space_dim, initial.q, initial.p)) {}

void MomentumTracker::observe(const PhaseState& s) {
  max_linear_ = std::max(max_linear_, (total_linear_momentum(space_dim_, s.p) - P0_).cwiseAbs().maxCoeff());
  max_angular_ = std::max(
      max_angular_, (total_angular_momentum(space_dim_, s.q, s.p) - L0_).cwiseAbs().maxCoeff());
}

}  // namespace sqq
