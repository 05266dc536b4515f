#include <doctest.h>

#include <cmath>
#include <numbers>

#include "error_code.hpp"
#include "oracles.hpp"
#include "sqq/diagnostics.hpp"
#include "sqq/integrator.hpp"
#include "sqq/problems.hpp"

using namespace sqq;

constexpr double kTwoPi = 2.0 * std::numbers::pi;

TEST_CASE("variant table") {
  CHECK(parse_variant("SQQ-PTQ") == Variant::SQQ_PTQ);
  CHECK(std::string(to_string(parse_variant("SQQ-PN"))) == "SQQ-PN");
  CHECK(code_of([] { parse_variant("SQQ-X"); }) == ErrorCode::invalid_argument);

  const VariantTraits sqq = traits(Variant::SQQ);
  CHECK(sqq.interpolation == NodeKind::equidistant);
  CHECK_FALSE(sqq.projection);
  CHECK_FALSE(sqq.time_transform);
  CHECK(traits(Variant::SQQ_P).projection);
  CHECK(traits(Variant::SQQ_PQ).solver == SolverMethod::broyden);
  CHECK(traits(Variant::SQQ_PTN).solver == SolverMethod::newton_fd);
  CHECK(traits(Variant::SQQ_PTN).time_transform);
  CHECK(traits(Variant::SQQ_PTQ).time_transform);

  const VariantConfig c = VariantConfig::make(Variant::SQQ, 18, 18, 1.0);
  CHECK(c.q_kind == NodeKind::equidistant);
  CHECK(c.p_kind == NodeKind::equidistant);
  CHECK_FALSE(c.use_projection);
  CHECK(c.mode() == StepMode::fixed);
  const VariantConfig t = VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01);
  CHECK(t.sigma.kind == SigmaKind::energy);
  CHECK(t.mode() == StepMode::transformed);
  CHECK(t.effective_gauss_points() == 7);
}

TEST_CASE("single steps") {
  SUBCASE("circular orbit keeps its radius") {
    const auto [model, s] = kepler_model(0.0);
    Integrator integ(model, VariantConfig::make(Variant::SQQ_P, 5, 5, 0.1), model.hamiltonian(s));
    WarmStart warm;
    const PhaseState out = integ.step_once(s, warm);
    CHECK(std::abs(out.q.norm() - 1.0) < 1e-8);
    CHECK(out.t == doctest::Approx(0.1).epsilon(1e-15));
  }
  SUBCASE("one Kepler step matches the analytic propagation") {
    const auto [model, s] = kepler_model(0.5);
    Integrator integ(model, VariantConfig::make(Variant::SQQ_P, 9, 9, 0.4), model.hamiltonian(s));
    WarmStart warm;
    const PhaseState out = integ.step_once(s, warm);
    Vec q, p;
    oracle::kepler_propagate(s.q, s.p, 0.4, q, p);
    CHECK((out.q - q).cwiseAbs().maxCoeff() < 1e-8);
    CHECK((out.p - p).cwiseAbs().maxCoeff() < 1e-8);
  }
  SUBCASE("unit sigma in transformed mode reproduces the fixed step") {
    const auto [model, s] = kepler_model(0.5);
    VariantConfig fixed = VariantConfig::make(Variant::SQQ_PQ, 5, 5, 0.1);
    VariantConfig transformed = fixed;
    transformed.use_time_transform = true;
    transformed.sigma.kind = SigmaKind::unit;
    Integrator a(model, fixed, -0.5);
    Integrator b(model, transformed, -0.5);
    WarmStart wa, wb;
    const PhaseState oa = a.step_once(s, wa);
    const PhaseState ob = b.step_once(s, wb);
    const double eps = fixed.solver.epsilon;
    CHECK((oa.q - ob.q).cwiseAbs().maxCoeff() <= 10 * eps * oa.q.norm());
    CHECK((oa.p - ob.p).cwiseAbs().maxCoeff() <= 10 * eps * oa.p.norm());
    CHECK(oa.t == ob.t);
  }
  SUBCASE("warm start does not need more iterations") {
    const auto [model, s] = kepler_model(0.5);
    Integrator integ(model, VariantConfig::make(Variant::SQQ_PQ, 5, 5, 0.1), -0.5);
    WarmStart warm;
    StepDiagnostics d1, d2;
    integ.step_once(s, warm, &d1);
    CHECK_FALSE(warm.empty());
    integ.step_once(s, warm, &d2);
    CHECK(d2.iterations <= d1.iterations);
    CHECK(d1.jacobian_builds == 1);
    CHECK(d2.jacobian_builds == 0);
  }
  SUBCASE("projection and per-step solve agree") {
    const auto [model, s] = kepler_model(0.5);
    VariantConfig proj = VariantConfig::make(Variant::SQQ_P, 6, 6, 0.3);
    VariantConfig direct = proj;
    direct.use_projection = false;
    Integrator a(model, proj, -0.5), b(model, direct, -0.5);
    PhaseState sa = s, sb = s;
    WarmStart wa, wb;
    for (int k = 0; k < 5; ++k) {
      sa = a.step_once(sa, wa);
      sb = b.step_once(sb, wb);
    }
    CHECK((sa.q - sb.q).cwiseAbs().maxCoeff() < 1e-9);
  }
}

TEST_CASE("integrate") {
  SUBCASE("one Kepler period returns to the start") {
    const auto [model, s] = kepler_model(0.5);
    const Trajectory tr = integrate(model, s, VariantConfig::make(Variant::SQQ_P, 9, 9, 0.4), kTwoPi);
    const Sample& last = tr.samples.back();
    CHECK(last.t == kTwoPi);
    CHECK((last.q - s.q).cwiseAbs().maxCoeff() < 1e-6);
    CHECK((last.p - s.p).cwiseAbs().maxCoeff() < 1e-6);
    CHECK(tr.stats.steps == 16);
    CHECK(tr.overshoot == 0.0);
    CHECK(tr.stats.max_dt == doctest::Approx(0.4));
    CHECK(tr.stats.min_dt == doctest::Approx(kTwoPi - 15 * 0.4));
    CHECK(tr.H0 == model.hamiltonian(s));
  }
  SUBCASE("sampling stride keeps the final step") {
    const auto [model, s] = kepler_model(0.5);
    const Trajectory tr = integrate(model, s, VariantConfig::make(Variant::SQQ_P, 5, 5, 0.1), 1.05, 4);
    CHECK(tr.stats.steps == 11);
    // initial, steps 4 and 8, and the final step 11
    CHECK(tr.samples.size() == 4);
    CHECK(tr.samples.back().t == 1.05);
  }
  SUBCASE("transformed mode overshoots by less than one step") {
    const auto [model, s] = kepler_model(0.9);
    const Trajectory tr = integrate(model, s, VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01), 1.0);
    CHECK(tr.overshoot >= 0.0);
    CHECK(tr.overshoot < tr.stats.max_dt);
    CHECK(tr.samples.back().t == doctest::Approx(1.0 + tr.overshoot));
    CHECK(tr.stats.max_dt > tr.stats.min_dt);
  }
  SUBCASE("observer sees every step") {
    const auto [model, s] = kepler_model(0.5);
    long seen = 0;
    double last_t = 0.0;
    const Trajectory tr = integrate(model, s, VariantConfig::make(Variant::SQQ_PQ, 3, 3, 0.05), 1.0, 1000,
                                    [&](long step, const PhaseState& st, const StepDiagnostics& d) {
                                      CHECK(step == seen + 1);
                                      CHECK(st.t > last_t);
                                      CHECK(d.iterations >= 1);
                                      seen = step;
                                      last_t = st.t;
                                    });
    CHECK(seen == tr.stats.steps);
  }
  SUBCASE("preconditions") {
    const auto [model, s] = kepler_model(0.5);
    const VariantConfig v = VariantConfig::make(Variant::SQQ_P, 3, 3, 0.1);
    CHECK(code_of([&] { integrate(model, s, v, 0.0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { integrate(model, s, v, -1.0); }) == ErrorCode::invalid_argument);
    CHECK(code_of([&] { integrate(model, s, v, 1.0, 0); }) == ErrorCode::invalid_argument);
    VariantConfig bad = v;
    bad.q_kind = NodeKind::chebyshev_gauss;
    CHECK(code_of([&] { integrate(model, s, bad, 1.0); }) == ErrorCode::invalid_argument);
  }
  SUBCASE("failures report the step") {
    const auto [model, s] = kepler_model(0.5);
    VariantConfig v = VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01);
    v.solver.k_max = 1;
    try {
      integrate(model, s, v, 1.0);
      FAIL("expected a step failure");
    } catch (const StepFailure& f) {
      CHECK(f.step_index == 1);
      CHECK(f.time == 0.0);
      CHECK(f.cause == ErrorCode::non_convergence);
      CHECK(std::string(f.what()).find("step 1 at t = 0") != std::string::npos);
    }
  }
}

TEST_CASE("three-body close encounter over one period") {
  const ProblemSpec pb = three_body_problem();
  EncounterTracker enc(2);
  const Trajectory tr = integrate(*pb.model, pb.initial, VariantConfig::make(Variant::SQQ_PTQ, 3, 3, 0.01),
                                  pb.period, 100, observe_all(enc));
  const ClosestApproach c = enc.closest(0, 2);
  CHECK(c.distance == doctest::Approx(0.014).epsilon(0.2));
  CHECK(tr.stats.max_abs_energy_error < 1e-9);
}
