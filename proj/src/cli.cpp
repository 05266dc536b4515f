#include "sqq/cli.hpp"

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <thread>

#include "sqq/bench.hpp"
#include "sqq/diagnostics.hpp"
#include "sqq/errors.hpp"
#include "sqq/run_config.hpp"
#include "sqq/validation.hpp"

namespace sqq {

namespace {

// Raised for flag combinations CLI11 cannot express; mapped to the usage exit code.
struct UsageError : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string g(double v, int precision = 6) { return format_number(v, precision); }

// Flags shared by run and compare. Values are applied over the --config file (or the
// defaults) only when given on the command line.
struct RunFlags {
  std::string config;
  std::string problem;
  double e = 0.0;
  std::string data_file;
  std::string variant;
  int m = 0;
  int n = 0;
  double dt = 0.0;
  double dtau = 0.0;
  int gauss_points = 0;
  std::string duration;
  std::string out;
  int sample_every = 1;
  std::string node_kind;
  bool no_projection = false;
  double sigma_a = 0.0;
  double sigma_b = 0.0;
  double epsilon = 0.0;
  int k_max = 0;

  CLI::Option* o_problem = nullptr;
  CLI::Option* o_e = nullptr;
  CLI::Option* o_data = nullptr;
  CLI::Option* o_variant = nullptr;
  CLI::Option* o_m = nullptr;
  CLI::Option* o_n = nullptr;
  CLI::Option* o_dt = nullptr;
  CLI::Option* o_dtau = nullptr;
  CLI::Option* o_gauss = nullptr;
  CLI::Option* o_duration = nullptr;
  CLI::Option* o_out = nullptr;
  CLI::Option* o_sample = nullptr;
  CLI::Option* o_node = nullptr;
  CLI::Option* o_sigma_a = nullptr;
  CLI::Option* o_sigma_b = nullptr;
  CLI::Option* o_eps = nullptr;
  CLI::Option* o_kmax = nullptr;

  void add_to(CLI::App* app, bool with_variant) {
    app->add_option("--config", config, "RunConfig JSON file; flags override its values");
    o_problem = app->add_option("--problem", problem, "kepler | three-body | outer-solar");
    o_e = app->add_option("--e", e, "Kepler eccentricity, 0 <= e < 1");
    o_data = app->add_option("--data-file", data_file, "N-body data file (outer-solar)");
    if (with_variant) o_variant = app->add_option("--variant", variant, "SQQ, SQQ-P, SQQ-PN, SQQ-PQ, SQQ-PTN, SQQ-PTQ");
    o_m = app->add_option("--m", m, "q polynomial degree (m+1 nodes)");
    o_n = app->add_option("--n", n, "p polynomial degree (n+1 nodes)");
    o_dt = app->add_option("--dt", dt, "physical step (fixed-step variants)");
    o_dtau = app->add_option("--dtau", dtau, "fictitious-time step (time-transformed variants)");
    o_gauss = app->add_option("--gauss-points", gauss_points, "quadrature size (default m+n+1)");
    o_duration = app->add_option("--duration", duration, "<N>periods or an absolute time");
    o_out = app->add_option("--out", out, "output file");
    o_sample = app->add_option("--sample-every", sample_every, "keep every k-th step in the dump");
    o_node = app->add_option("--node-kind", node_kind, "equidistant | chebyshev (must match the variant)");
    app->add_flag("--no-projection", no_projection, "solve the Vandermonde system on every step");
    o_sigma_a = app->add_option("--sigma-a", sigma_a, "lower regularisation constant a");
    o_sigma_b = app->add_option("--sigma-b", sigma_b, "upper bound b on sigma");
    o_eps = app->add_option("--epsilon", epsilon, "solver relative-step threshold");
    o_kmax = app->add_option("--k-max", k_max, "solver iteration limit");
  }

  RunConfig resolve() const {
    RunConfig c = config.empty() ? RunConfig{} : load_run_config(config);
    if (*o_problem) c.problem = problem;
    if (*o_e) c.e = e;
    if (*o_data) c.data_file = data_file;
    if (o_variant && *o_variant) c.variant = variant;
    if (*o_m) c.m = m;
    if (*o_n) c.n = n;
    if (*o_dt && *o_dtau) throw UsageError("--dt and --dtau are mutually exclusive");
    if (*o_dt) c.step = dt;
    if (*o_dtau) c.step = dtau;
    if (*o_gauss) c.gauss_points = gauss_points;
    if (*o_duration) c.duration = Duration::parse(duration);
    if (*o_out) c.out = out;
    if (*o_sample) c.sample_every = sample_every;
    if (*o_node) c.node_kind = node_kind;
    if (no_projection) c.projection = false;
    if (*o_sigma_a) c.sigma_a = sigma_a;
    if (*o_sigma_b) c.sigma_b = sigma_b;
    if (*o_eps) c.epsilon = epsilon;
    if (*o_kmax) c.k_max = k_max;
    return c;
  }

  // --dt / --dtau must match the variant's clock; checked once the variant is known.
  void check_step_flag(const std::string& variant_name, const char* variant_flag) const {
    const bool transformed = traits(parse_variant(variant_name)).time_transform;
    if (transformed && *o_dt) {
      throw UsageError(std::string("--dt conflicts with ") + variant_flag + " " + variant_name +
                       ": time-transformed variants take --dtau");
    }
    if (!transformed && *o_dtau) {
      throw UsageError(std::string("--dtau conflicts with ") + variant_flag + " " + variant_name +
                       ": fixed-step variants take --dt");
    }
  }
};

std::string summary_line(const RunResult& r) {
  const Trajectory& t = r.trajectory;
  const StepStats& s = t.stats;
  std::string line = "problem=" + r.problem.name + " variant=" + t.variant + " steps=" + std::to_string(s.steps) +
                     " t_end=" + g(t.samples.back().t, 12) + " max_abs_energy_error=" + g(s.max_abs_energy_error, 3) +
                     " max_rel_energy_error=" + g(s.max_rel_energy_error, 3) +
                     " mean_iterations=" + g(s.mean_iterations(), 4) + " dt_min=" + g(s.min_dt, 4) +
                     " dt_max=" + g(s.max_dt, 4);
  if (t.overshoot > 0.0) line += " overshoot=" + g(t.overshoot, 4);
  if (s.cold_restarts > 0) line += " cold_restarts=" + std::to_string(s.cold_restarts);
  line += " wall_time=" + g(t.wall_time, 4) + "s";
  return line;
}

int cmd_run(const RunFlags& flags, const std::string& summary_path, std::ostream& out) {
  RunConfig cfg = flags.resolve();
  cfg.validate();
  flags.check_step_flag(cfg.variant, "--variant");

  const ProblemSpec problem = load_problem(cfg);
  const NBodySystem* nb = problem.nbody();
  const int sd = problem.space_dim();
  std::optional<EncounterTracker> enc;
  std::optional<SpeedRangeTracker> speeds;
  MomentumTracker mom(sd, problem.initial);
  if (nb) {
    enc.emplace(sd);
    speeds.emplace(*nb);
    enc->observe(problem.initial);
    speeds->observe(problem.initial);
  }
  const StepObserver obs = [&](long, const PhaseState& s, const StepDiagnostics&) {
    mom.observe(s);
    if (enc) enc->observe(s);
    if (speeds) speeds->observe(s);
  };
  const RunResult r = run(cfg, obs);
  out << summary_line(r) << '\n';

  nlohmann::json summary = {{"config", to_json(cfg)},
                            {"steps", r.trajectory.stats.steps},
                            {"max_abs_energy_error", r.trajectory.stats.max_abs_energy_error},
                            {"max_rel_energy_error", r.trajectory.stats.max_rel_energy_error},
                            {"max_angular_momentum_drift", mom.max_angular_drift()},
                            {"max_linear_momentum_drift", mom.max_linear_drift()}};
  if (nb) {
    const ClosestApproach c = enc->closest();
    out << "closest_approach=" << g(c.distance, 6) << " bodies=" << c.body_a + 1 << "," << c.body_b + 1
        << " at t=" << g(c.time, 8) << " speed_ratio=";
    nlohmann::json ratios = nlohmann::json::array();
    for (int i = 0; i < nb->n_bodies(); ++i) {
      out << (i ? "," : "") << g(speeds->ratio(i), 4);
      ratios.push_back(speeds->ratio(i));
    }
    out << " linear_momentum_drift=" << g(mom.max_linear_drift(), 3) << '\n';
    summary["closest_approach"] = {{"distance", c.distance}, {"time", c.time},
                                   {"bodies", {c.body_a + 1, c.body_b + 1}}};
    summary["speed_max_over_min"] = ratios;
  } else {
    out << "angular_momentum_drift=" << g(mom.max_angular_drift(), 3) << '\n';
  }
  if (!summary_path.empty()) {
    std::ofstream s(summary_path);
    if (!s) throw Error(ErrorCode::data_load, "cannot write '" + summary_path + "'");
    s << summary.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_compare(const RunFlags& flags, const std::string& variant_a, const std::string& variant_b,
                std::ostream& out) {
  RunConfig a = flags.resolve();
  const std::string report_path = a.out;
  a.out.clear();
  RunConfig b = a;
  a.variant = variant_a;
  b.variant = variant_b;
  a.validate();
  b.validate();
  flags.check_step_flag(a.variant, "--variant-a");
  flags.check_step_flag(b.variant, "--variant-b");
  const RunResult ra = run(a);
  const RunResult rb = run(b);

  const auto& sa = ra.trajectory.samples;
  const auto& sb = rb.trajectory.samples;
  double max_dq = 0.0;
  double max_dp = 0.0;
  long aligned = 0;
  for (std::size_t k = 0; k < std::min(sa.size(), sb.size()); ++k) {
    if (std::abs(sa[k].t - sb[k].t) > 1e-12 * std::max(1.0, std::abs(sa[k].t))) continue;
    ++aligned;
    max_dq = std::max(max_dq, (sa[k].q - sb[k].q).cwiseAbs().maxCoeff());
    max_dp = std::max(max_dp, (sa[k].p - sb[k].p).cwiseAbs().maxCoeff());
  }
  const Sample& fa = sa.back();
  const Sample& fb = sb.back();
  nlohmann::json report = {
      {"problem", ra.problem.name},
      {"variants", {variant_a, variant_b}},
      {"final_time", {fa.t, fb.t}},
      {"final_q_difference", (fa.q - fb.q).cwiseAbs().maxCoeff()},
      {"final_p_difference", (fa.p - fb.p).cwiseAbs().maxCoeff()},
      {"aligned_samples", aligned},
      {"max_q_difference", max_dq},
      {"max_p_difference", max_dp},
      {"max_abs_energy_error", {ra.trajectory.stats.max_abs_energy_error, rb.trajectory.stats.max_abs_energy_error}},
      {"steps", {ra.trajectory.stats.steps, rb.trajectory.stats.steps}}};
  out << summary_line(ra) << '\n' << summary_line(rb) << '\n';
  out << "aligned_samples=" << aligned << " max_q_difference=" << g(max_dq, 3) << " max_p_difference=" << g(max_dp, 3)
      << " final_q_difference=" << g(report["final_q_difference"].get<double>(), 3)
      << " final_p_difference=" << g(report["final_p_difference"].get<double>(), 3) << '\n';
  if (aligned <= 1) {
    out << "note: sample times differ (time-transformed runs); only final states are compared\n";
  }
  if (!report_path.empty()) {
    std::ofstream f(report_path);
    if (!f) throw Error(ErrorCode::data_load, "cannot write '" + report_path + "'");
    f << report.dump(2) << '\n';
  }
  return kExitOk;
}

int cmd_validate(const std::vector<std::string>& checks, std::uint64_t seed, std::ostream& out) {
  bool ok = true;
  for (const CheckResult& r : run_validation(checks, seed)) {
    out << (r.passed ? "PASS " : "FAIL ") << r.name << ": " << r.detail << " (threshold " << g(r.threshold, 3)
        << ")\n";
    ok = ok && r.passed;
  }
  return ok ? kExitOk : kExitNumerical;
}

bool is_numerical(ErrorCode c) {
  switch (c) {
    case ErrorCode::invalid_argument:
    case ErrorCode::data_load:
    case ErrorCode::conditioning_limit:
    case ErrorCode::invalid_interval:
      return false;
    default:
      return true;
  }
}

}  // namespace

int parse_and_run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  CLI::App app{"Generating-function symplectic integrators (SQQ family) for gravitational dynamics", "sqq"};
  app.require_subcommand(1);

  RunFlags run_flags;
  std::string summary_path;
  CLI::App* run_cmd = app.add_subcommand("run", "integrate one trajectory and write a CSV dump");
  run_flags.add_to(run_cmd, true);
  run_cmd->add_option("--summary", summary_path, "write a JSON diagnostics summary");

  RunFlags cmp_flags;
  std::string variant_a = "SQQ-PTN";
  std::string variant_b = "SQQ-PTQ";
  CLI::App* cmp_cmd = app.add_subcommand("compare", "run two variants on the same problem and diff the states");
  cmp_flags.add_to(cmp_cmd, false);
  cmp_cmd->add_option("--variant-a", variant_a, "first variant")->capture_default_str();
  cmp_cmd->add_option("--variant-b", variant_b, "second variant")->capture_default_str();

  std::string suite = "paper-tables";
  std::string bench_out = "bench-out";
  BenchOptions bench_opts;
  bench_opts.workers = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  std::vector<std::string> tables;
  CLI::App* bench_cmd = app.add_subcommand("bench", "run a benchmark suite and write its tables");
  bench_cmd->add_option("--suite", suite, "suite name under data/suites or a path")->capture_default_str();
  bench_cmd->add_option("--out", bench_out, "output directory")->capture_default_str();
  bench_cmd->add_option("--workers", bench_opts.workers, "parallel cells")->check(CLI::PositiveNumber);
  bench_cmd->add_flag("--serial-timing", bench_opts.serial_timing, "run timing-critical cells alone");
  bench_cmd->add_option("--table", tables, "only these tables (repeatable)");

  std::vector<std::string> checks;
  std::uint64_t seed = 1;
  CLI::App* val_cmd = app.add_subcommand("validate", "run the invariant self-checks");
  val_cmd->add_option("--check", checks, "gradients | projection | symplecticity | secant (repeatable)");
  val_cmd->add_option("--seed", seed, "random seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kExitOk;
  } catch (const CLI::ParseError& e) {
    err << "usage error: " << e.what() << '\n';
    if (!app.get_subcommands().empty()) {
      err << "run '" << app.get_name() << " " << app.get_subcommands().front()->get_name() << " --help' for the flags\n";
    }
    return kExitUsage;
  }

  try {
    if (*run_cmd) return cmd_run(run_flags, summary_path, out);
    if (*cmp_cmd) return cmd_compare(cmp_flags, variant_a, variant_b, out);
    if (*val_cmd) return cmd_validate(checks, seed, out);
    if (*bench_cmd) {
      BenchSuite s = load_suite(suite);
      if (!tables.empty()) {
        std::erase_if(s.tables, [&](const BenchTable& t) {
          return std::find(tables.begin(), tables.end(), t.name) == tables.end();
        });
        if (s.tables.empty()) throw UsageError("--table matched no table of suite '" + s.name + "'");
      }
      return run_suite(s, bench_out, bench_opts, out) ? kExitOk : kExitNumerical;
    }
  } catch (const UsageError& e) {
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const StepFailure& e) {
    err << "numerical failure: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const Error& e) {
    if (is_numerical(e.code())) {
      err << "numerical failure (" << to_string(e.code()) << "): " << e.what() << '\n';
      return kExitNumerical;
    }
    err << "usage error: " << e.what() << '\n';
    return kExitUsage;
  }
  return kExitUsage;
}

}  // namespace sqq
