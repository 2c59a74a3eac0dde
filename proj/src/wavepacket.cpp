#include "tunneltime/wavepacket.hpp"

#include <cmath>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"

namespace tunneltime {
namespace {

// phi(x) = (e^{ix} - 1)/(ix), so that f*(q) = e^{iqa/2} L0 phi(q L0) / sqrt(L0).
cplx phi(double x) {
  if (std::abs(x) < 1e-6) return {1.0 - x * x / 6.0, 0.5 * x};
  const double h = std::sin(0.5 * x);
  return {std::sin(x) / x, 2.0 * h * h / x};
}

cplx phi_prime(double x) {
  if (std::abs(x) < 0.1) {
    const double x2 = x * x;
    return {-x * (1.0 / 3.0 - x2 / 30.0 + x2 * x2 / 840.0), 0.5 - x2 / 8.0 + x2 * x2 / 144.0};
  }
  const double s = std::sin(x);
  const double h = std::sin(0.5 * x);
  const double x2 = x * x;
  return {-(s - x * std::cos(x)) / x2, (x * s - 2.0 * h * h) / x2};
}

}  // namespace

void Packet::validate() const {
  if (!(k0 > 0.0) || !std::isfinite(k0)) throw DomainError("packet k0 must be > 0");
  if (!(L0 > 0.0) || !std::isfinite(L0)) throw DomainError("packet L0 must be > 0");
}

cplx f_star(double q, const Packet& packet, double barrier_width) {
  const double L0 = packet.L0;
  const cplx edge = std::polar(1.0, 0.5 * q * barrier_width);
  return edge * (std::sqrt(L0) * phi(q * L0));
}

cplx f_amp(double q, const Packet& packet, double barrier_width) {
  return std::conj(f_star(q, packet, barrier_width));
}

cplx f_star_derivative(double q, const Packet& packet, double barrier_width) {
  const double L0 = packet.L0;
  const cplx i{0.0, 1.0};
  const cplx edge = std::polar(1.0, 0.5 * q * barrier_width);
  const double x = q * L0;
  return edge / std::sqrt(L0) * (0.5 * i * barrier_width * L0 * phi(x) + L0 * L0 * phi_prime(x));
}

double f_abs_sq(double q, const Packet& packet) {
  const double s = detail::sinc(0.5 * q * packet.L0);
  return packet.L0 * s * s;
}

cplx g_star(double q, const Packet& packet, double barrier_width) {
  return std::polar(1.0, -q * (packet.L0 + barrier_width));
}

cplx g_phase(double q, const Packet& packet, double barrier_width) {
  return std::conj(g_star(q, packet, barrier_width));
}

}  // namespace tunneltime
