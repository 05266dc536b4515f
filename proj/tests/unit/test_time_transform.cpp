#include <doctest.h>

#include <cmath>
#include <random>

#include "error_code.hpp"
#include "oracles.hpp"
#include "sqq/time_transform.hpp"

using namespace sqq;

namespace {

SigmaConfig energy_cfg(double H0) {
  SigmaConfig c;
  c.kind = SigmaKind::energy;
  c.H0 = H0;
  return c;
}

}  // namespace

TEST_CASE("raw step-size functions") {
  const CentralForceModel kepler;
  SigmaConfig radial;
  radial.kind = SigmaKind::radial;
  radial.alpha = 2.0;
  Vec q(2);
  q << 2.0, 0.0;
  CHECK(sigma_raw(radial, kepler, q) == 4.0);
  q << 0.6, 0.8;
  for (double alpha : {0.5, 1.5, 3.0}) {
    radial.alpha = alpha;
    CHECK(sigma_raw(radial, kepler, q) == doctest::Approx(1.0).epsilon(1e-15));
  }
  CHECK(sigma_raw(SigmaConfig{}, kepler, q) == 1.0);

  const auto [model, s] = kepler_model(0.5);
  // W = (H0 - U) + |grad U|^2 = 1.5 + 16
  CHECK(sigma_raw(energy_cfg(-0.5), model, s.q) == doctest::Approx(1.0 / std::sqrt(17.5)).epsilon(1e-14));
  CHECK(sigma_raw(energy_cfg(-0.5), model, s.q) == doctest::Approx(0.23905).epsilon(1e-5));

  // far from the centre with H0 well below U the radicand turns negative
  Vec far(2);
  far << 10.0, 0.0;
  CHECK(code_of([&] { sigma_raw(energy_cfg(-5.0), model, far); }) == ErrorCode::nonpositive_radicand);
}

TEST_CASE("bounded step-size function") {
  const double a = 1e-6, b = 100.0;
  CHECK(regularize_sigma(0.0, a, b) == doctest::Approx(a * b / (a + b)).epsilon(1e-14));
  CHECK(regularize_sigma(1e300, a, b) == doctest::Approx(b).epsilon(1e-12));
  const double x = std::sqrt(1.0 + 1e-12);
  CHECK(regularize_sigma(1.0, a, b) == doctest::Approx(x / (x / 100.0 + 1.0)).epsilon(1e-15));
  CHECK(regularize_sigma(1.0, a, b) == doctest::Approx(0.990099).epsilon(1e-6));

  std::mt19937_64 rng(1);
  std::uniform_real_distribution<double> lg(-12.0, 12.0);
  const double lo = a * b / (a + b);
  for (int i = 0; i < 10000; ++i) {
    const double s = regularize_sigma(std::pow(10.0, lg(rng)), a, b);
    CHECK(s >= lo);
    CHECK(s < b);
  }

  const CentralForceModel kepler;
  std::uniform_real_distribution<double> u(-3.0, 3.0);
  SigmaConfig cfg = energy_cfg(-0.5);
  for (int i = 0; i < 10000; ++i) {
    Vec q(2);
    q << u(rng), u(rng);
    if (q.norm() < 1e-3 || q.norm() > 1.9) continue;
    const double s = sigma_bounded(cfg, kepler, q);
    CHECK(s >= lo);
    CHECK(s < b);
  }
}

TEST_CASE("step-size gradient") {
  const CentralForceModel kepler;
  Vec q(2);
  q << 0.3, -1.1;
  CHECK(grad_sigma(SigmaConfig{}, kepler, q).cwiseAbs().maxCoeff() == 0.0);
  SigmaConfig radial;
  radial.kind = SigmaKind::radial;
  radial.alpha = 2.0;
  CHECK((grad_sigma(radial, kepler, q) - 2.0 * q).cwiseAbs().maxCoeff() < 1e-15);

  const auto [model, s] = kepler_model(0.5);
  const SigmaConfig cfg = energy_cfg(-0.5);
  const Vec fd = oracle::fd_gradient([&](const Vec& x) { return sigma_bounded(cfg, model, x); }, s.q, 1e-7);
  CHECK((grad_sigma(cfg, model, s.q) - fd).cwiseAbs().maxCoeff() < 1e-5);

  const NBodySystem sys(2, (Vec(3) << 0.9, 0.85, 1.0).finished(), 1.0);
  Vec q3(6), p3(6);
  q3 << -0.2227, 0.0, 1.0, 0.0, 0.0, 0.0;
  p3 << 0.0, 0.9 * 1.7813, 0.0, 0.85 * 0.4150, 0.0, -1.9559;
  const SigmaConfig c3 = energy_cfg(sys.hamiltonian(q3, p3));
  const Vec fd3 = oracle::fd_gradient([&](const Vec& x) { return sigma_bounded(c3, sys, x); }, q3, 1e-7);
  CHECK((grad_sigma(c3, sys, q3) - fd3).cwiseAbs().maxCoeff() < 1e-5);
}

TEST_CASE("transformed Hamiltonian") {
  const auto [model, s] = kepler_model(0.5);
  SUBCASE("on the energy surface K vanishes") {
    const SigmaConfig cfg = energy_cfg(model.hamiltonian(s));
    CHECK(transformed_hamiltonian(cfg, model, s) == 0.0);
    const HamiltonianGradient g = grad_transformed_hamiltonian(cfg, model, s);
    const double sg = sigma(cfg, model, s.q);
    CHECK((g.dq - sg * model.grad_potential(s.q)).cwiseAbs().maxCoeff() < 1e-14);
    CHECK((g.dp - sg * s.p).cwiseAbs().maxCoeff() < 1e-14);
  }
  SUBCASE("unit kind is the identity transformation") {
    SigmaConfig cfg;
    cfg.H0 = -0.3;
    CHECK(transformed_hamiltonian(cfg, model, s) == doctest::Approx(model.hamiltonian(s) + 0.3));
    const HamiltonianGradient g = grad_transformed_hamiltonian(cfg, model, s);
    const HamiltonianGradient h = model.grad_hamiltonian(s);
    CHECK((g.dq - h.dq).cwiseAbs().maxCoeff() == 0.0);
    CHECK((g.dp - h.dp).cwiseAbs().maxCoeff() == 0.0);
  }
  SUBCASE("gradient matches finite differences on perturbed states") {
    std::mt19937_64 rng(4);
    std::normal_distribution<double> nd(0.0, 0.05);
    for (SigmaKind kind : {SigmaKind::energy, SigmaKind::radial}) {
      SigmaConfig cfg = energy_cfg(-0.5);
      cfg.kind = kind;
      for (int trial = 0; trial < 20; ++trial) {
        Vec x(4);
        x << s.q[0] + nd(rng), s.q[1] + nd(rng), s.p[0] + nd(rng), s.p[1] + nd(rng);
        auto K = [&](const Vec& y) { return transformed_hamiltonian(cfg, model, PhaseState{y.head(2), y.tail(2), 0.0}); };
        const Vec fd = oracle::fd_gradient(K, x, 1e-7);
        const HamiltonianGradient g = grad_transformed_hamiltonian(cfg, model, PhaseState{x.head(2), x.tail(2), 0.0});
        CHECK((g.dq - fd.head(2)).cwiseAbs().maxCoeff() < 1e-5);
        CHECK((g.dp - fd.tail(2)).cwiseAbs().maxCoeff() < 1e-5);
      }
    }
  }
  SUBCASE("finite-difference sigma gradient matches the analytic one") {
    SigmaConfig cfg = energy_cfg(-0.5);
    const HamiltonianGradient analytic = grad_transformed_hamiltonian(cfg, model, s);
    cfg.fd_gradient = true;
    const HamiltonianGradient fd = grad_transformed_hamiltonian(cfg, model, s);
    CHECK((analytic.dq - fd.dq).cwiseAbs().maxCoeff() < 1e-6);
  }
}

TEST_CASE("sigma configuration validation") {
  SigmaConfig c;
  CHECK_NOTHROW(c.validate());
  c.a = 0.0;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::invalid_argument);
  c.a = 1e-6;
  c.b = 0.5;
  CHECK(code_of([&] { c.validate(); }) == ErrorCode::invalid_argument);
}
