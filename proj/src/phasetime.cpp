#include "tunneltime/phasetime.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"

namespace tunneltime {
namespace {

// (sinhc(z) - 1) / z^2
cplx sinhc_excess(cplx z) {
  const cplx z2 = z * z;
  if (std::abs(z) < 0.1) {
    return 1.0 / 6.0 + z2 * (1.0 / 120.0 + z2 * (1.0 / 5040.0 + z2 * (1.0 / 362880.0 + z2 / 39916800.0)));
  }
  return (detail::sinhc(z) - 1.0) / z2;
}

}  // namespace

double k_times_phase_time(double k, const Barrier& barrier) {
  const double m = barrier.mass;
  const double a = barrier.width;
  const double l4 = barrier.two_m_v() * barrier.two_m_v();
  const double k2 = k * k;
  const cplx kap = kappa(k, barrier);
  const cplx kap2 = barrier.two_m_v() - k2;

  cplx num, den;
  if ((kap * a).real() > 20.0) {
    // Numerator and denominator both multiplied by e^{-2 kappa a}.
    const cplx e2 = std::exp(-2.0 * kap * a);
    num = l4 * (1.0 - e2 * e2) / (2.0 * kap) + 2.0 * a * k2 * (kap2 - k2) * e2;
    den = l4 * (1.0 - e2) * (1.0 - e2) / 4.0 + 4.0 * kap2 * k2 * e2;
  } else {
    // Both sides carry a factor kappa^2, removed analytically so that the barrier
    // top kappa = 0 is an ordinary point: with l0^4 - k^4 = kappa^2 (l0^2 + k^2)
    // and sinhc(z) = 1 + z^2 g(z),
    // num / kappa^2 = 2a (4 l0^4 a^2 g(2 kappa a) + l0^2 + 2 k^2).
    const cplx s1 = detail::sinhc(kap * a);
    num = 2.0 * a * (4.0 * l4 * a * a * sinhc_excess(2.0 * kap * a) + barrier.two_m_v() + 2.0 * k2);
    den = l4 * a * a * s1 * s1 + 4.0 * k2;
  }
  const cplx v = m * num / den;
  if (std::abs(v.imag()) > 1e-12 * std::abs(v.real())) {
    throw ImaginaryResidue("phase time has imaginary part " + detail::fmt_g(v.imag()) + " at k = " +
                           detail::fmt_g(k));
  }
  return v.real();
}

double phase_time(double k, const Barrier& barrier) {
  if (!(k > 0.0)) throw DomainError("phase time needs k > 0");
  return k_times_phase_time(k, barrier) / k;
}

double k_tau_limit(const Barrier& barrier) {
  if (!barrier.is_opaque()) throw DomainError("[k tau]_0 needs V a > 0");
  const double k0 = barrier.kappa0();
  const double x = k0 * barrier.width;
  // sinh(2x)/sinh^2(x) = 2 coth(x)
  return barrier.mass / k0 * 2.0 / std::tanh(x);
}

double phase_time_fd(double k, const Barrier& barrier) {
  if (!(k > 0.0)) throw DomainError("phase time needs k > 0");
  const double h = std::min(std::max(1e-6, 1e-8 / k), 0.25 * k);
  auto t = [&](double q) { return amplitudes(q, barrier).T; };
  return barrier.mass / k * detail::richardson_phase_derivative(t, k, h);
}

PhaseTimeSample sample_phase_time(double k, const Barrier& barrier) {
  PhaseTimeSample s;
  s.k = k;
  s.tau_ph = phase_time(k, barrier);
  s.k_tau_at_zero = barrier.is_opaque() ? k_tau_limit(barrier) : 0.0;
  return s;
}

}  // namespace tunneltime
