// Acceptance harness. `sqq_acceptance <n>` evaluates criterion n (1..12), `sqq_acceptance all`
// evaluates every criterion. Each prints one PASS/FAIL line; the exit status is non-zero when
// any evaluated criterion fails.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <string>
#include <vector>

#include "sqq/diagnostics.hpp"
#include "sqq/errors.hpp"
#include "sqq/integrator.hpp"
#include "sqq/problems.hpp"
#include "sqq/validation.hpp"

using namespace sqq;

namespace {

struct Verdict {
  bool pass = true;
  std::string detail;

  void require(bool ok, const std::string& what) {
    pass = pass && ok;
    if (!detail.empty()) detail += "; ";
    detail += (ok ? "" : "MISSED ") + what;
  }
};

std::string num(double v, int precision = 3) { return format_number(v, precision); }

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void runtime_limit(Verdict& v, const Stopwatch& sw, double limit_s) {
  const double s = sw.seconds();
  v.require(s < limit_s, "runtime " + num(s, 3) + " s (limit " + num(limit_s) + " s)");
}

// Max |H - H0| in the first and last tenth of a run, plus the linear drift fit.
struct EnergyProfile {
  double first_decile = 0.0;
  double last_decile = 0.0;
  double max_error = 0.0;
  double drift_per_period = 0.0;
  Trajectory traj;
};

EnergyProfile energy_profile(const ProblemSpec& pb, const VariantConfig& v, double periods,
                             const StepObserver& extra = {}) {
  const double T = periods * pb.period;
  EnergyTracker et(*pb.model, pb.H0, pb.initial.t, T, 10, 0.2);
  EnergyProfile out;
  out.traj = integrate(*pb.model, pb.initial, v, T, 1000000, [&](long k, const PhaseState& s, const StepDiagnostics& d) {
    et.observe(s);
    if (extra) extra(k, s, d);
  });
  out.first_decile = et.max_between(0.0, 0.1);
  out.last_decile = et.max_between(0.9, 1.0);
  out.max_error = out.traj.stats.max_abs_energy_error;
  out.drift_per_period = et.drift_rate() * pb.period;
  return out;
}

Verdict from_check(const CheckResult& r, const Stopwatch& sw, double limit_s) {
  Verdict v;
  v.require(r.passed, r.detail + " (threshold " + num(r.threshold) + ")");
  runtime_limit(v, sw, limit_s);
  return v;
}

// Linear secular growth from zero puts the last-decile maximum at about ten times the first;
// a bounded oscillation keeps them comparable.
constexpr double kBoundedDecileRatio = 5.0;

// ---------------------------------------------------------------------------------------

Verdict criterion_1() {
  Stopwatch sw;
  return from_check(check_residual_gradients(50, 1), sw, 60.0);
}

Verdict criterion_2() {
  Stopwatch sw;
  return from_check(check_projection_equivalence(100, 2), sw, 30.0);
}

Verdict criterion_3() {
  Stopwatch sw;
  return from_check(check_symplecticity(5, 5, 0.1), sw, 30.0);
}

Verdict criterion_4() {
  Stopwatch sw;
  Verdict v;
  const CheckResult secant = check_broyden_secant(2000);
  v.require(secant.passed, secant.detail + " (threshold " + num(secant.threshold) + ")");

  const ProblemSpec pb = three_body_problem();
  const double T = 10 * pb.period;
  std::vector<PhaseState> newton;
  std::vector<PhaseState> broyden;
  auto recorder = [](std::vector<PhaseState>& into) {
    return [&into](long, const PhaseState& s, const StepDiagnostics&) { into.push_back(s); };
  };
  const Trajectory tn =
      integrate(*pb.model, pb.initial, VariantConfig::make(Variant::SQQ_PTN, 3, 3, 0.01), T, 1000000, recorder(newton));
  const Trajectory tb =
      integrate(*pb.model, pb.initial, VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01), T, 1000000, recorder(broyden));
  double worst = 0.0;
  const std::size_t common = std::min(newton.size(), broyden.size());
  for (std::size_t k = 0; k < common; ++k) {
    worst = std::max({worst, (newton[k].q - broyden[k].q).cwiseAbs().maxCoeff(),
                      (newton[k].p - broyden[k].p).cwiseAbs().maxCoeff(), std::abs(newton[k].t - broyden[k].t)});
  }
  v.require(newton.size() == broyden.size(), "step counts " + std::to_string(newton.size()) + " vs " +
                                                 std::to_string(broyden.size()));
  v.require(worst <= 1e-9, "Newton vs Broyden max state difference " + num(worst) + " over " +
                               std::to_string(common) + " steps (limit 1e-9)");
  v.require(true, "max energy error Newton " + num(tn.stats.max_abs_energy_error) + ", Broyden " +
                      num(tb.stats.max_abs_energy_error));
  runtime_limit(v, sw, 120.0);
  return v;
}

Verdict criterion_5() {
  Stopwatch sw;
  Verdict v;
  const ProblemSpec pb = kepler_problem(0.5);
  const EnergyProfile e = energy_profile(pb, VariantConfig::make(Variant::SQQ_P, 9, 9, 0.4), 500);
  v.require(std::abs(e.drift_per_period) <= 1e-12,
            "drift of |H - H0| over the last 80% " + num(e.drift_per_period) + " per period (limit 1e-12)");
  v.require(e.max_error < 1e-6, "max energy error " + num(e.max_error));
  runtime_limit(v, sw, 300.0);
  return v;
}

Verdict criterion_6() {
  Stopwatch sw;
  Verdict v;
  const ProblemSpec pb = kepler_problem(0.5);
  const EnergyProfile eq = energy_profile(pb, VariantConfig::make(Variant::SQQ, 18, 18, 1.0), 500);
  const EnergyProfile ch = energy_profile(pb, VariantConfig::make(Variant::SQQ_P, 18, 18, 1.0), 500);
  const double eq_ratio = eq.last_decile / eq.first_decile;
  const double ch_ratio = ch.last_decile / ch.first_decile;
  v.require(eq_ratio >= 10.0, "equidistant last/first decile max error " + num(eq_ratio) + " (" + num(eq.last_decile) +
                                  " / " + num(eq.first_decile) + ", need >= 10)");
  v.require(ch_ratio < kBoundedDecileRatio, "Chebyshev last/first decile ratio " + num(ch_ratio) + " (" +
                                                num(ch.last_decile) + " / " + num(ch.first_decile) + ", bounded below " +
                                                num(kBoundedDecileRatio) + ")");
  runtime_limit(v, sw, 300.0);
  return v;
}

Verdict criterion_7() {
  Stopwatch sw;
  Verdict v;
  for (double e : {0.9, 0.99}) {
    const ProblemSpec pb = kepler_problem(e);
    const EnergyProfile p = energy_profile(pb, VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01), 50);
    const double ratio = p.last_decile / p.first_decile;
    const double dt_ratio = p.traj.stats.max_dt / p.traj.stats.min_dt;
    const std::string tag = "e=" + num(e) + ": ";
    v.require(ratio < kBoundedDecileRatio, tag + "last/first decile max error " + num(ratio) + " (max " +
                                               num(p.max_error) + ", bounded below " + num(kBoundedDecileRatio) + ")");
    v.require(dt_ratio > 10.0, tag + "physical step ratio max/min " + num(dt_ratio) + " (need > 10)");
  }
  runtime_limit(v, sw, 900.0);
  return v;
}

Verdict criterion_8() {
  Stopwatch sw;
  Verdict v;
  const ProblemSpec pb = three_body_problem();
  EncounterTracker enc(2);
  SpeedRangeTracker speeds(*pb.nbody());
  enc.observe(pb.initial);
  speeds.observe(pb.initial);
  const EnergyProfile e =
      energy_profile(pb, VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01), 500, observe_all(enc, speeds));
  const double ref = 1.32e-7;
  v.require(e.max_error >= 0.4 * ref && e.max_error <= 3.0 * ref,
            "max energy error " + num(e.max_error) + " (relative " + num(e.traj.stats.max_rel_energy_error) +
                "), band [" + num(0.4 * ref) + ", " + num(3.0 * ref) + "]");
  const ClosestApproach c = enc.closest(0, 2);
  v.require(std::abs(c.distance - 0.014) <= 0.2 * 0.014,
            "closest 1-3 distance " + num(c.distance, 4) + " at t=" + num(c.time, 6) + " (0.014 +/- 20%)");
  v.require(std::abs(speeds.ratio(0) - 10.0) <= 0.3 * 10.0, "speed ratio body 1 " + num(speeds.ratio(0), 4) + " (10 +/- 30%)");
  v.require(std::abs(speeds.ratio(2) - 34.0) <= 0.3 * 34.0, "speed ratio body 3 " + num(speeds.ratio(2), 4) + " (34 +/- 30%)");
  runtime_limit(v, sw, 900.0);
  return v;
}

struct OuterRun {
  bool ok = false;
  std::string failure;
  EnergyProfile profile;
  double wall = 0.0;
};

OuterRun outer_run(Variant variant, double periods) {
  const ProblemSpec pb = outer_solar_problem();
  OuterRun r;
  Stopwatch sw;
  try {
    r.profile = energy_profile(pb, VariantConfig::make(variant, 5, 5, 250.0), periods);
    r.ok = true;
  } catch (const StepFailure& f) {
    r.failure = f.what();
  }
  r.wall = sw.seconds();
  return r;
}

void outer_band(Verdict& v, const std::string& name, const OuterRun& r, double ref) {
  if (!r.ok) {
    v.require(false, name + " failed: " + r.failure);
    return;
  }
  const double e = r.profile.max_error;
  v.require(e >= 0.4 * ref && e <= 3.0 * ref, name + " max energy error " + num(e) + " (relative " +
                                                  num(r.profile.traj.stats.max_rel_energy_error) + "), band [" +
                                                  num(0.4 * ref) + ", " + num(3.0 * ref) + "]");
}

Verdict criterion_9() {
  Stopwatch sw;
  Verdict v;
  outer_band(v, "SQQ-PTQ", outer_run(Variant::SQQ_PTQ, 100), 2.85e-8);
  outer_band(v, "SQQ-PN", outer_run(Variant::SQQ_PN, 100), 3.21e-8);
  runtime_limit(v, sw, 300.0);
  return v;
}

Verdict criterion_10() {
  Stopwatch sw;
  Verdict v;
  for (Variant variant : {Variant::SQQ_PN, Variant::SQQ_PTQ}) {
    const std::string name = to_string(variant);
    const OuterRun r = outer_run(variant, 1000);
    if (!r.ok) {
      v.require(false, name + " failed: " + r.failure);
      continue;
    }
    const EnergyProfile& p = r.profile;
    const double ratio = p.last_decile / p.first_decile;
    v.require(ratio < kBoundedDecileRatio, name + " last/first decile max error " + num(ratio) + " (max " +
                                               num(p.max_error) + ", bounded below " + num(kBoundedDecileRatio) + ")");
    const double ref = variant == Variant::SQQ_PN ? 3.21e-8 : 2.85e-8;
    const double order = std::abs(std::log10(p.max_error / ref));
    v.require(order < 1.0, name + " max error " + num(p.max_error) + " within one order of " + num(ref));
  }
  v.require(true, "runtime " + num(sw.seconds()) + " s");
  return v;
}

Verdict criterion_11() {
  Verdict v;
  const ProblemSpec tb = three_body_problem();
  auto wall = [&](Variant variant) {
    return integrate(*tb.model, tb.initial, VariantConfig::make(variant, 3, 3, 0.01), tb.period, 1000000).wall_time;
  };
  const double w_ptn = wall(Variant::SQQ_PTN);
  const double w_ptq = wall(Variant::SQQ_PTQ);
  v.require(w_ptq < w_ptn, "three-body (1 period) wall SQQ-PTQ " + num(w_ptq) + " s < SQQ-PTN " + num(w_ptn) + " s");

  const OuterRun ptn = outer_run(Variant::SQQ_PTN, 10);
  const OuterRun ptq = outer_run(Variant::SQQ_PTQ, 10);
  if (!ptn.ok || !ptq.ok) {
    v.require(false, "outer Solar System timing unavailable: " + (ptq.ok ? "" : "SQQ-PTQ " + ptq.failure) +
                         (ptn.ok ? "" : std::string(ptq.ok ? "" : "; ") + "SQQ-PTN " + ptn.failure));
  } else {
    v.require(ptq.wall < ptn.wall, "outer Solar System (10 periods) wall SQQ-PTQ " + num(ptq.wall) + " s < SQQ-PTN " +
                                       num(ptn.wall) + " s");
  }
  return v;
}

Verdict criterion_12() {
  Stopwatch sw;
  Verdict v;
  {
    const ProblemSpec pb = kepler_problem(0.5);
    MomentumTracker mt(2, pb.initial);
    integrate(*pb.model, pb.initial, VariantConfig::make(Variant::SQQ_P, 9, 9, 0.4), 500 * pb.period, 1000000,
              observe_all(mt));
    v.require(mt.max_angular_drift() <= 1e-8,
              "Kepler |q x p| drift over 500 periods " + num(mt.max_angular_drift()) + " (limit 1e-8)");
  }
  struct NBodyRun {
    std::string label;
    ProblemSpec pb;
    Variant variant;
    double step;
    double periods;
  };
  const std::vector<NBodyRun> runs = {
      {"three-body SQQ-PTQ 50 periods", three_body_problem(), Variant::SQQ_PTQ, 0.01, 50},
      {"three-body SQQ-PTN 1 period", three_body_problem(), Variant::SQQ_PTN, 0.01, 1},
      {"three-body SQQ-PQ 1 period", three_body_problem(), Variant::SQQ_PQ, 1e-3, 1},
      {"outer Solar System SQQ-PN 100 periods", outer_solar_problem(), Variant::SQQ_PN, 250.0, 100},
  };
  for (const NBodyRun& r : runs) {
    MomentumTracker mt(r.pb.space_dim(), r.pb.initial);
    try {
      integrate(*r.pb.model, r.pb.initial, VariantConfig::make(r.variant, r.variant == Variant::SQQ_PN ? 5 : 3,
                                                               r.variant == Variant::SQQ_PN ? 5 : 3, r.step),
                r.periods * r.pb.period, 1000000, observe_all(mt));
      v.require(mt.max_linear_drift() <= 1e-9,
                r.label + " linear momentum drift " + num(mt.max_linear_drift()) + " (limit 1e-9)");
    } catch (const StepFailure& f) {
      v.require(false, r.label + " failed: " + f.what());
    }
  }
  v.require(true, "runtime " + num(sw.seconds()) + " s");
  return v;
}

const std::vector<std::pair<std::string, std::function<Verdict()>>>& criteria() {
  static const std::vector<std::pair<std::string, std::function<Verdict()>>> all = {
      {"gradient consistency", criterion_1},
      {"projection equivalence", criterion_2},
      {"symplecticity of the step map", criterion_3},
      {"Broyden correctness", criterion_4},
      {"Kepler bounded energy", criterion_5},
      {"Runge phenomenon", criterion_6},
      {"high-eccentricity adaptivity", criterion_7},
      {"three-body reproduction", criterion_8},
      {"outer Solar System", criterion_9},
      {"long-term stability", criterion_10},
      {"performance ordering", criterion_11},
      {"conservation suite", criterion_12},
  };
  return all;
}

bool evaluate(int n) {
  const auto& [name, fn] = criteria()[static_cast<std::size_t>(n - 1)];
  Verdict v;
  try {
    v = fn();
  } catch (const std::exception& e) {
    v.pass = false;
    v.detail = std::string("unexpected error: ") + e.what();
  }
  std::printf("%s criterion %d (%s): %s\n", v.pass ? "PASS" : "FAIL", n, name.c_str(), v.detail.c_str());
  std::fflush(stdout);
  return v.pass;
}

}  // namespace

int main(int argc, char** argv) {
  const int count = static_cast<int>(criteria().size());
  if (argc != 2) {
    std::fprintf(stderr, "usage: sqq_acceptance <1..%d | all>\n", count);
    return 2;
  }
  const std::string arg = argv[1];
  if (arg == "all") {
    bool ok = true;
    for (int n = 1; n <= count; ++n) ok = evaluate(n) && ok;
    return ok ? 0 : 1;
  }
  const int n = std::atoi(arg.c_str());
  if (n < 1 || n > count) {
    std::fprintf(stderr, "criterion must be 1..%d or all\n", count);
    return 2;
  }
  return evaluate(n) ? 0 : 1;
}
