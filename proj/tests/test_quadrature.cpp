#include <cmath>
#include <numbers>
#include <vector>

#include "doctest.h"
#include "tunneltime/closedform.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/phasetime.hpp"
#include "tunneltime/quadrature.hpp"

using namespace tunneltime;

namespace {
const Barrier base = Barrier::from_two_m_v(1.0, 15.0);
constexpr double pi = std::numbers::pi;
const double zero[] = {0.0};
}  // namespace

TEST_CASE("principal value of 1/k on a symmetric window") {
  QuadratureConfig cfg;
  const auto r = pv_integrate([](double k) -> cplx { return 1.0 / k; }, -3.0, 3.0, zero, cfg, 0.5);
  CHECK(std::abs(r.value) < 1e-12);
}

TEST_CASE("principal value of e^{ikL}/k") {
  // Window edges where cos(W L) = 0 leave a truncation error of 2/(W L)^2 in the sine integral.
  const double L = 10.0;
  const double W = (800.0 * pi + 0.5 * pi) / L;
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-10;
  const auto r = pv_integrate([&](double k) -> cplx { return std::polar(1.0, k * L) / k; }, -W, W, zero, cfg, pi / L);
  CHECK(std::abs(r.value.real()) < 1e-9);
  CHECK(std::abs(r.value.imag() - pi) < 1e-6);
}

TEST_CASE("pole off the centre and several poles") {
  QuadratureConfig cfg;
  // PV int_0^3 dk/(k-1) = ln 2
  auto r = pv_integrate([](double k) -> cplx { return 1.0 / (k - 1.0); }, 0.0, 3.0, std::vector<double>{1.0}, cfg);
  CHECK(r.value.real() == doctest::Approx(std::log(2.0)).epsilon(1e-10));
  // PV int_{-2}^{3} [1/(k+1) + 1/(k-1)] dk = ln 2 + ln 2 - ln 3... computed term by term
  const std::vector<double> poles{-1.0, 1.0};
  r = pv_integrate([](double k) -> cplx { return 1.0 / (k + 1.0) + 1.0 / (k - 1.0); }, -2.0, 3.0, poles, cfg);
  CHECK(r.value.real() == doctest::Approx(std::log(4.0) + std::log(2.0 / 3.0)).epsilon(1e-10));
}

TEST_CASE("smooth integrand without poles") {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-10;
  const auto r = pv_integrate([](double x) -> cplx { return std::exp(-x * x); }, -8.0, 8.0, {}, cfg);
  CHECK(r.value.real() == doctest::Approx(std::sqrt(pi)).epsilon(1e-10));
  CHECK(r.error_estimate <= 1e-10 * r.l1_norm);
}

TEST_CASE("panel budget") {
  QuadratureConfig cfg;
  cfg.rel_tol = 1e-12;
  cfg.max_panels = 20;
  CHECK_THROWS_AS(pv_integrate([](double x) -> cplx { return std::sin(200.0 * x); }, 0.0, 10.0, {}, cfg, 1.0),
                  NonConvergence);
}

TEST_CASE("config validation") {
  const Packet p{1.0, 150.0};
  QuadratureConfig cfg;
  cfg.rel_tol = 0.1;
  CHECK_THROWS_AS(cfg.validate(p), DomainError);
  cfg.rel_tol = 1e-6;
  cfg.window_half_width = 0.1;
  CHECK_THROWS_AS(cfg.validate(p), DomainError);
  cfg.window_half_width = 0.0;
  CHECK_NOTHROW(cfg.validate(p));
  CHECK(cfg.window(p) == doctest::Approx(400.0 * pi / 150.0));
}

TEST_CASE("inverse velocity oracle") {
  QuadratureConfig cfg;
  const Packet one{1.0, 150.0};
  const auto r = oracle_inverse_velocity(one, base, cfg);
  CHECK(std::abs(r.value - inverse_velocity(one, base)) < 1e-3 * inverse_velocity(one, base));
  CHECK(std::abs(r.imag) < 1e-8 * std::abs(r.value));
  const Packet half{pi / 150.0, 150.0};
  CHECK(oracle_inverse_velocity(half, base, cfg).value == doctest::Approx(1.0 / half.k0).epsilon(1e-3));
}

TEST_CASE("window convergence") {
  QuadratureConfig cfg;
  QuadratureConfig wide = cfg;
  for (double k0 : {0.3, 1.1}) {
    const Packet p{k0, 150.0};
    wide.window_half_width = 2.0 * cfg.window(p);
    for (auto kind : {OracleKind::inverse_velocity, OracleKind::tunneling_time, OracleKind::delay_B}) {
      const double x = run_oracle(kind, p, base, cfg).value;
      const double y = run_oracle(kind, p, base, wide).value;
      CHECK(std::abs(x - y) < cfg.rel_tol * std::max(1.0, std::abs(x)));
    }
  }
}

TEST_CASE("epsilon regulator extrapolates to the principal value") {
  QuadratureConfig pv;
  for (double k0 : {0.3, 1.1}) {
    const Packet p{k0, 150.0};
    for (auto kind : {OracleKind::inverse_velocity, OracleKind::tunneling_time, OracleKind::delay_B}) {
      QuadratureConfig e1 = pv, e2 = pv;
      e1.epsilon = 1e-4 * k0;
      e2.epsilon = 1e-5 * k0;
      const double r1 = run_oracle(kind, p, base, e1).value;
      const double r2 = run_oracle(kind, p, base, e2).value;
      const double extrapolated = (10.0 * r2 - r1) / 9.0;
      const double ref = run_oracle(kind, p, base, pv).value;
      CHECK(std::abs(extrapolated - ref) < 3.0 * pv.rel_tol * std::max(1.0, std::abs(ref)));
    }
  }
}

TEST_CASE("tunnelling-time oracle") {
  QuadratureConfig cfg;
  const Packet p{1.1, 150.0};
  const double tau = phase_time(1.1, base);
  CHECK(std::abs(oracle_tunneling_time(p, base, cfg).value - tunneling_time(p, base)) < 0.05 * tau);

  // the L0-dependent deviation from tau at small k0
  const Packet slow{0.01, 150.0};
  const double predicted = tunneling_time(slow, base) - phase_time(0.01, base);
  const double measured = oracle_tunneling_time(slow, base, cfg).value - phase_time(0.01, base);
  CHECK(measured == doctest::Approx(predicted).epsilon(0.05));
}

TEST_CASE("vanishing barrier") {
  QuadratureConfig cfg;
  const Barrier faint{1e-12, 15.0, 1.0};
  SUBCASE("on the nodes k0 L0 = 2 pi n the split is the free one") {
    const Packet p{2.0 * pi * 24.0 / 150.0, 150.0};
    const double tt = oracle_tunneling_time(p, faint, cfg).value;
    CHECK(tt == doctest::Approx(faint.mass * faint.width / p.k0).epsilon(1e-6));
    CHECK(std::abs(oracle_delay_B(p, faint, cfg).value) < 0.05 * faint.mass / (p.k0 * p.k0));
    CHECK(std::abs(oracle_delay_B(p, faint, cfg).value) < 1e-6);
  }
  SUBCASE("for any k0 the total delay vanishes") {
    // The split between the two delays depends on a resonance of width m V a at
    // k = 0 that survives V -> 0; their sum does not.
    for (double k0 : {0.3, 0.77}) {
      const Packet p{k0, 150.0};
      const double dA = oracle_tunneling_time(p, faint, cfg).value - faint.width * oracle_inverse_velocity(p, faint, cfg).value;
      const double dB = oracle_delay_B(p, faint, cfg).value;
      CHECK(std::abs(dA + dB) < 1e-6 * faint.mass / k0 * 150.0);
      CHECK(std::abs(dB) > 1e-3);
    }
  }
  SUBCASE("exactly transparent barrier") {
    const Barrier open{0.0, 15.0, 1.0};
    const Packet p{0.77, 150.0};
    CHECK(std::abs(oracle_delay_B(p, open, cfg).value) < 1e-12);
    CHECK(oracle_tunneling_time(p, open, cfg).value ==
          doctest::Approx(open.width * oracle_inverse_velocity(p, open, cfg).value).epsilon(1e-9));
  }
}

TEST_CASE("delay-B oracle") {
  QuadratureConfig cfg;
  const Packet p{0.1, 150.0};
  const auto r = oracle_delay_B(p, base, cfg);
  CHECK(std::abs(r.value - delay_B(p, base)) < 0.05 / (0.1 * 0.1));
  const Packet node{2.0 * pi / 150.0, 150.0};
  CHECK(std::abs(oracle_delay_B(node, base, cfg).value) < 0.05 / (node.k0 * node.k0));
}

TEST_CASE("realness of every oracle") {
  QuadratureConfig cfg;
  for (double k0 : {0.3, 0.7, 1.1}) {
    const Packet p{k0, 150.0};
    for (auto kind : {OracleKind::inverse_velocity, OracleKind::tunneling_time, OracleKind::delay_B}) {
      const auto r = run_oracle(kind, p, base, cfg);
      CHECK(std::abs(r.imag) < 1e-8 * std::abs(r.value));
    }
  }
}
