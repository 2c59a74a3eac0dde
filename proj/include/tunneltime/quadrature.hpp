#pragma once

// Direct principal-value quadrature of the defining packet integrals, used as
// an oracle for the closed forms.

#include <cstddef>
#include <functional>
#include <limits>
#include <span>

#include "tunneltime/scattering.hpp"
#include "tunneltime/wavepacket.hpp"

namespace tunneltime {

struct QuadratureConfig {
  double epsilon = 0.0;            // > 0 replaces 1/k by k/(k^2 + eps^2); 0 means PV by folding
  double window_half_width = 0.0;  // 0 means 400 pi / L0
  double rel_tol = 1e-9;
  std::size_t max_panels = 500000;

  double window(const Packet& packet) const;
  /// Throws DomainError unless rel_tol in (0, 1e-2] and the window is at least 20 (2 pi / L0).
  void validate(const Packet& packet) const;
};

using Integrand = std::function<cplx(double)>;

struct QuadResult {
  cplx value;
  double error_estimate = 0.0;
  double l1_norm = 0.0;
  std::size_t panels = 0;
};

/// Adaptive Gauss-Kronrod (7/15) integral of f over [lo, hi].
///
/// Each declared simple pole p is handled by folding: the interval
/// [p - d, p + d] becomes the integral of f(p + t) + f(p - t) over (0, d), where
/// the 1/t parts cancel. The folded range starts on a geometrically graded mesh
/// so that structure very close to the pole is seen. Initial panels are no wider
/// than max_panel_width; refinement is global by largest error until the summed
/// error is below rel_tol times the integral of |f|. The final sum runs in a fixed
/// order. Throws NonConvergence when max_panels is exceeded.
QuadResult pv_integrate(const Integrand& f, double lo, double hi, std::span<const double> poles,
                        const QuadratureConfig& config,
                        double max_panel_width = std::numeric_limits<double>::infinity(),
                        std::span<const double> breakpoints = {});

struct OracleResult {
  double value = 0.0;  // real part, including the tail correction
  double imag = 0.0;
  double error_estimate = 0.0;
  double tail = 0.0;  // analytic estimate of the part outside the window, already added to value
  std::size_t panels = 0;
};

enum class OracleKind { inverse_velocity, tunneling_time, delay_B };

/// (1/2pi) int |f(k - k0)|^2 m/k dk.
OracleResult oracle_inverse_velocity(const Packet& packet, const Barrier& barrier, const QuadratureConfig& config);

/// (1/2pi) int |f(k - k0)|^2 tau(k) dk.
OracleResult oracle_tunneling_time(const Packet& packet, const Barrier& barrier, const QuadratureConfig& config);

/// (i/2) sum over parities of (1/2pi) int (m/k) F(k) [f*(k-k0) f*'(k+k0) - f*(k+k0) f*'(k-k0)] dk.
OracleResult oracle_delay_B(const Packet& packet, const Barrier& barrier, const QuadratureConfig& config);

OracleResult run_oracle(OracleKind kind, const Packet& packet, const Barrier& barrier, const QuadratureConfig& config);

}  // namespace tunneltime
