#include <cmath>
#include <numbers>

#include "doctest.h"
#include "tunneltime/errors.hpp"
#include "tunneltime/quadrature.hpp"
#include "tunneltime/wavepacket.hpp"

using namespace tunneltime;

namespace {
const Packet packet{1.1, 150.0};
constexpr double a = 15.0;
}  // namespace

TEST_CASE("f at the origin and at its first zero") {
  CHECK(std::abs(f_star(0.0, packet, a)) == doctest::Approx(std::sqrt(packet.L0)).epsilon(1e-15));
  CHECK(f_abs_sq(2.0 * std::numbers::pi / packet.L0, packet) < 1e-28);
  CHECK(std::norm(f_star(2.0 * std::numbers::pi / packet.L0, packet, a)) < 1e-28);
}

TEST_CASE("packet validation") {
  CHECK_THROWS_AS(Packet({0.0, 150.0}).validate(), DomainError);
  CHECK_THROWS_AS(Packet({1.0, -1.0}).validate(), DomainError);
}

TEST_CASE("normalisation over a finite window") {
  const double W = 200.0 * std::numbers::pi / packet.L0;
  QuadratureConfig cfg;
  const auto r = pv_integrate([](double q) -> cplx { return f_abs_sq(q, packet) / (2.0 * std::numbers::pi); }, -W, W,
                              {}, cfg, std::numbers::pi / packet.L0);
  CHECK(std::abs(r.value.real() - 1.0) < 2e-3);
}

TEST_CASE("conjugation symmetry and the closed modulus") {
  double worst_sym = 0, worst_mod = 0;
  for (int i = -500; i <= 500; ++i) {
    const double q = 0.0137 * i + 1e-3;
    worst_sym = std::max(worst_sym, std::abs(f_amp(q, packet, a) - std::conj(f_amp(-q, packet, a))));
    const double closed = 2.0 / (packet.L0 * q * q) * (1.0 - std::cos(q * packet.L0));
    if (closed > 1e-6) worst_mod = std::max(worst_mod, std::abs(std::norm(f_star(q, packet, a)) - closed) / closed);
  }
  CHECK(worst_sym < 1e-13);
  CHECK(worst_mod < 1e-12);
}

TEST_CASE("small-q expansion joins the exact form") {
  for (double x : {1e-7, 1e-6, 2e-6}) {
    const double q = x / packet.L0;
    const cplx exact = f_star(q, packet, 0.0);
    const cplx direct = (1.0 - std::polar(1.0, q * packet.L0)) / (cplx{0.0, -1.0} * q) / std::sqrt(packet.L0);
    CHECK(std::abs(exact - direct) < 1e-8 * std::abs(exact));
  }
}

TEST_CASE("derivative of f*") {
  for (double q : {-0.3, -1e-4, 0.0, 2e-5, 0.05, 0.71}) {
    const double h = 1e-6;
    const cplx fd = (f_star(q + h, packet, a) - f_star(q - h, packet, a)) / (2.0 * h);
    CHECK(std::abs(f_star_derivative(q, packet, a) - fd) < 1e-5 * std::max(1.0, std::abs(fd)));
  }
}

TEST_CASE("g phase") {
  CHECK(std::abs(g_star(0.0, packet, a) - 1.0) < 1e-15);
  CHECK(std::abs(g_star(std::numbers::pi / (packet.L0 + a), packet, a) + 1.0) < 1e-15);
  CHECK(std::abs(std::abs(g_star(0.37, packet, a)) - 1.0) < 1e-15);
  CHECK(std::abs(g_phase(0.37, packet, a) - std::conj(g_star(0.37, packet, a))) < 1e-15);
}
