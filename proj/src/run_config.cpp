#include "sqq/run_config.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <set>

#include "sqq/errors.hpp"
#include "sqq/trajectory_io.hpp"

namespace sqq {

namespace {

[[noreturn]] void invalid(const std::string& what) { throw Error(ErrorCode::invalid_argument, what); }

double parse_number(const std::string& text, const std::string& what) {
  std::size_t used = 0;
  double v = 0.0;
  try {
    v = std::stod(text, &used);
  } catch (const std::exception&) {
    invalid("cannot parse " + what + " '" + text + "'");
  }
  if (used != text.size()) invalid("cannot parse " + what + " '" + text + "'");
  return v;
}

}  // namespace

Duration Duration::parse(const std::string& text) {
  Duration d;
  for (const char* suffix : {"periods", "period"}) {
    const std::string sfx(suffix);
    if (text.size() > sfx.size() && text.compare(text.size() - sfx.size(), sfx.size(), sfx) == 0) {
      d.value = parse_number(text.substr(0, text.size() - sfx.size()), "duration");
      d.in_periods = true;
      if (!(d.value > 0.0) || !std::isfinite(d.value)) invalid("duration must be positive");
      return d;
    }
  }
  d.value = parse_number(text, "duration");
  d.in_periods = false;
  if (!(d.value > 0.0) || !std::isfinite(d.value)) invalid("duration must be positive");
  return d;
}

std::string Duration::to_string() const {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", value);
  return in_periods ? std::string(buf) + "periods" : std::string(buf);
}

void RunConfig::validate() const {
  if (problem != "kepler" && problem != "three-body" && problem != "outer-solar") {
    invalid("--problem must be kepler, three-body or outer-solar (got '" + problem + "')");
  }
  if (problem == "kepler" && !(e >= 0.0 && e < 1.0)) {
    invalid("--e must lie in [0, 1) for the Kepler problem (got " + format_number(e) + ")");
  }
  const Variant v = parse_variant(variant);
  if (m < 1) invalid("--m must be >= 1");
  if (n < 0) invalid("--n must be >= 0");
  if (m + 1 > kMaxBasisNodes || n + 1 > kMaxBasisNodes) {
    invalid("--m/--n: at most " + std::to_string(kMaxBasisNodes) + " nodes per basis");
  }
  if (gauss_points < 0) invalid("--gauss-points must be >= 0");
  if (!(step > 0.0) || !std::isfinite(step)) invalid("--dt/--dtau must be positive");
  if (!(duration.value > 0.0)) invalid("--duration must be positive");
  if (sample_every < 1) invalid("--sample-every must be >= 1");
  if (!node_kind.empty()) {
    if (node_kind != "equidistant" && node_kind != "chebyshev") {
      invalid("--node-kind must be equidistant or chebyshev");
    }
    const bool equi = traits(v).interpolation == NodeKind::equidistant;
    if (equi != (node_kind == "equidistant")) {
      invalid("--variant " + variant + " conflicts with --node-kind " + node_kind + " (" + variant +
              " uses " + (equi ? "equidistant" : "Chebyshev") + " nodes)");
    }
  }
  if (!(sigma_a > 0.0 && sigma_a < 1.0 && sigma_b > 1.0)) invalid("sigma bounds need 0 < a < 1 < b");
  if (!(epsilon > 0.0)) invalid("epsilon must be positive");
  if (k_max < 1) invalid("k_max must be >= 1");
}

nlohmann::json to_json(const RunConfig& c) {
  return nlohmann::json{{"problem", c.problem},
                        {"e", c.e},
                        {"data_file", c.data_file},
                        {"variant", c.variant},
                        {"m", c.m},
                        {"n", c.n},
                        {"step", c.step},
                        {"gauss_points", c.gauss_points},
                        {"duration", c.duration.to_string()},
                        {"out", c.out},
                        {"sample_every", c.sample_every},
                        {"node_kind", c.node_kind},
                        {"projection", c.projection},
                        {"sigma_a", c.sigma_a},
                        {"sigma_b", c.sigma_b},
                        {"epsilon", c.epsilon},
                        {"k_max", c.k_max}};
}

RunConfig run_config_from_json(const nlohmann::json& j) {
  if (!j.is_object()) invalid("run config must be a JSON object");
  static const std::set<std::string> known = {
      "problem", "e",  "data_file",  "variant", "m",       "n",       "step",    "gauss_points",
      "duration", "out", "sample_every", "node_kind", "projection", "sigma_a", "sigma_b", "epsilon",
      "k_max"};
  for (const auto& [key, value] : j.items()) {
    if (!known.count(key)) invalid("unknown run config key '" + key + "'");
  }
  RunConfig c;
  try {
    c.problem = j.value("problem", c.problem);
    c.e = j.value("e", c.e);
    c.data_file = j.value("data_file", c.data_file);
    c.variant = j.value("variant", c.variant);
    c.m = j.value("m", c.m);
    c.n = j.value("n", c.n);
    c.step = j.value("step", c.step);
    c.gauss_points = j.value("gauss_points", c.gauss_points);
    if (j.contains("duration")) {
      const auto& d = j["duration"];
      c.duration = d.is_number() ? Duration{d.get<double>(), false} : Duration::parse(d.get<std::string>());
    }
    c.out = j.value("out", c.out);
    c.sample_every = j.value("sample_every", c.sample_every);
    c.node_kind = j.value("node_kind", c.node_kind);
    c.projection = j.value("projection", c.projection);
    c.sigma_a = j.value("sigma_a", c.sigma_a);
    c.sigma_b = j.value("sigma_b", c.sigma_b);
    c.epsilon = j.value("epsilon", c.epsilon);
    c.k_max = j.value("k_max", c.k_max);
  } catch (const nlohmann::json::exception& e) {
    invalid(std::string("run config: ") + e.what());
  }
  return c;
}

RunConfig load_run_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::data_load, "cannot open config '" + path + "'");
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(in);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::data_load, "config '" + path + "': " + e.what());
  }
  return run_config_from_json(j);
}

ProblemSpec load_problem(const RunConfig& cfg) { return make_problem(cfg.problem, cfg.e, cfg.data_file); }

VariantConfig variant_config(const RunConfig& cfg) {
  VariantConfig v = VariantConfig::make(parse_variant(cfg.variant), cfg.m, cfg.n, cfg.step);
  v.gauss_points = cfg.gauss_points;
  if (!cfg.projection) v.use_projection = false;
  v.sigma.a = cfg.sigma_a;
  v.sigma.b = cfg.sigma_b;
  v.solver.epsilon = cfg.epsilon;
  v.solver.k_max = cfg.k_max;
  return v;
}

RunResult run(const RunConfig& cfg, const StepObserver& observer) {
  cfg.validate();
  RunResult r{load_problem(cfg), {}};
  const VariantConfig v = variant_config(cfg);
  r.trajectory = integrate(*r.problem.model, r.problem.initial, v, cfg.duration.resolve(r.problem.period),
                           cfg.sample_every, observer);
  r.trajectory.problem = r.problem.name;
  if (!cfg.out.empty()) write_trajectory_csv(cfg.out, r.trajectory);
  return r;
}

}  // namespace sqq
