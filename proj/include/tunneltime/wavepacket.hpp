#pragma once

// Truncated plane-wave packets e^{ik0 x}/sqrt(L0) on [-L0 - a/2, -a/2] and
// their momentum-space amplitudes.

#include <complex>

namespace tunneltime {

using cplx = std::complex<double>;

struct Packet {
  double k0 = 1.0;
  double L0 = 150.0;

  /// Throws DomainError unless k0 > 0 and L0 > 0 (finite).
  void validate() const;
};

/// f*(q) = e^{iqa/2} (1 - e^{iqL0}) / (-iq sqrt(L0)); f*(0) = sqrt(L0).
cplx f_star(double q, const Packet& packet, double barrier_width);

/// f(q) = conj f*(q) for real q.
cplx f_amp(double q, const Packet& packet, double barrier_width);

/// d f*(q) / dq.
cplx f_star_derivative(double q, const Packet& packet, double barrier_width);

/// |f(q)|^2 = L0 sinc^2(q L0 / 2), independent of a.
double f_abs_sq(double q, const Packet& packet);

/// g*(q) = e^{-iq(L0 + a)}.
cplx g_star(double q, const Packet& packet, double barrier_width);

/// g(q) = conj g*(q).
cplx g_phase(double q, const Packet& packet, double barrier_width);

}  // namespace tunneltime
