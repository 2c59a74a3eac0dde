#pragma once

// Square-barrier scattering amplitudes in natural units (hbar = 1).
//
// The barrier V(x) = V for |x| <= a/2 is centred at the origin. Stationary
// states behave as e^{ikx} + R e^{-ik(x+a)} on the left and T e^{ik(x-a)} on
// the right; the symmetric/antisymmetric channel amplitudes are
// F+-(k) = (R +- T) e^{-ika}, unimodular for real k.

#include <complex>
#include <span>
#include <utility>
#include <vector>

namespace tunneltime {

using cplx = std::complex<double>;

enum class Parity { plus, minus };

inline const char* to_string(Parity p) { return p == Parity::plus ? "+" : "-"; }

struct Barrier {
  double height = 0.0;  // V
  double width = 0.0;   // a
  double mass = 1.0;    // m

  /// Builds a barrier from 2mV, the convention used for the published figures.
  static Barrier from_two_m_v(double two_m_v, double width, double mass = 1.0);

  /// l0^2 = 2 m V = kappa^2 + k^2.
  double two_m_v() const { return 2.0 * mass * height; }
  double kappa0() const;
  bool is_opaque() const { return height * width > 0.0; }

  /// Throws DomainError unless V >= 0, a >= 0, m > 0 (all finite).
  void validate() const;
};

struct ScatteringData {
  cplx k;
  cplx F_plus;
  cplx F_minus;
  cplx R;
  cplx T;
  // Phases are only meaningful for real k. A single-point evaluation carries
  // principal values mapped to [0, 2pi); PhaseSweep produces unwrapped ones.
  double theta_plus = 0.0;
  double theta_minus = 0.0;
  double theta = 0.0;
};

/// kappa = sqrt(2mV - k^2), Re kappa >= 0, and +i sqrt(k^2 - 2mV) on the real axis above the barrier top.
cplx kappa(cplx k, const Barrier& barrier);

/// Channel amplitude written as F = e^{-ika} numerator / denominator with both
/// factors entire in k (no kappa branch cut). Overall scale is arbitrary.
struct ChannelFraction {
  cplx numerator;
  cplx denominator;
};

ChannelFraction channel_fraction(cplx k, const Barrier& barrier, Parity parity);

/// Full amplitude set at one wavenumber. Throws PoleProximity when a channel
/// denominator is below 1e-14 of its numerator.
ScatteringData amplitudes(cplx k, const Barrier& barrier);

/// Leading-order amplitudes for a thin barrier, sqrt(mV) a < 0.1.
/// Throws RegimeViolation outside that gate.
std::pair<cplx, cplx> small_a_amplitudes(cplx k, const Barrier& barrier);

/// Tracks continuous phases theta+, theta-, theta along an increasing k sweep.
///
/// The sweep starts just above k = 0 where F+- = -1 fixes theta+- = pi for an
/// opaque barrier. theta is initialised from theta = pi/2 + (theta+ + theta- + 2ka)/2
/// so that the relation holds along the whole sweep.
class PhaseSweep {
 public:
  explicit PhaseSweep(const Barrier& barrier, double k_start = 1e-9);

  /// Advances to k (k >= current position) and returns the unwrapped data.
  ScatteringData advance_to(double k);

  double position() const { return current_.k.real(); }
  const ScatteringData& current() const { return current_; }

 private:
  void step(const ScatteringData& next, int depth);

  Barrier barrier_;
  ScatteringData current_;
};

/// Unwrapped amplitudes for an ascending list of positive wavenumbers.
std::vector<ScatteringData> amplitude_sweep(const Barrier& barrier, std::span<const double> ks);

}  // namespace tunneltime
