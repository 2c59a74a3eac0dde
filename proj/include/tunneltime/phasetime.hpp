#pragma once

// Phase time tau(k) = (m/k) d theta/dk of the square barrier.

#include "tunneltime/scattering.hpp"

namespace tunneltime {

struct PhaseTimeSample {
  double k = 0.0;
  double tau_ph = 0.0;
  double k_tau_at_zero = 0.0;
};

/// k tau(k), even in k and finite at k = 0. For V = 0 it reduces to m a.
/// Above the barrier top the complex-kappa continuation is used; an imaginary
/// part above 1e-12 of the value raises ImaginaryResidue.
double k_times_phase_time(double k, const Barrier& barrier);

/// Closed-form phase time. Throws DomainError for k <= 0.
double phase_time(double k, const Barrier& barrier);

/// [k tau]_{k=0} = (m/kappa0) sinh(2 kappa0 a)/sinh^2(kappa0 a). Throws DomainError if V a = 0.
double k_tau_limit(const Barrier& barrier);

/// (m/k) d theta/dk from the transmission amplitude, central difference with one
/// Richardson step and h = max(1e-6, 1e-8/k).
double phase_time_fd(double k, const Barrier& barrier);

PhaseTimeSample sample_phase_time(double k, const Barrier& barrier);

}  // namespace tunneltime
