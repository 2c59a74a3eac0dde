#pragma once

// Closed-form time budget of a truncated plane wave crossing the barrier.

#include <optional>
#include <string>

#include "tunneltime/scattering.hpp"
#include "tunneltime/wavepacket.hpp"

namespace tunneltime {

struct ValidityCheck {
  double ratio = 0.0;  // m V a L0
  bool valid = false;  // ratio >= 50
};

/// Attached (not thrown) when m V a L0 < 50: the closed forms are still
/// evaluated but neglect amplitude-pole residues that are no longer small.
struct ValidityWarning {
  double ratio = 0.0;
  std::string message;
};

struct WarnedValue {
  double value = 0.0;
  std::optional<ValidityWarning> warning;
};

struct TimeBudget {
  double v_inv = 0.0;
  double t0 = 0.0;
  double dtau_A = 0.0;
  double dtau_B = 0.0;
  double t_tunnel = 0.0;
  double t_outside = 0.0;
  double t_age = 0.0;
  double tau_ph = 0.0;
  double bp_tunnel_term = 0.0;
  double bp_outside_term = 0.0;
  ValidityCheck validity;
  std::optional<ValidityWarning> warning;
};

struct BranchPointTerms {
  double tunnel = 0.0;
  double outside = 0.0;
};

inline constexpr double kValidityThreshold = 50.0;

ValidityCheck validity_check(const Packet& packet, const Barrier& barrier);

/// (m/k0)(1 - sin(k0 L0)/(k0 L0)).
double inverse_velocity(const Packet& packet, const Barrier& barrier);

/// (L0 + a) v^-1.
double t_no_barrier(const Packet& packet, const Barrier& barrier);

/// -sin(k0 L0)/(k0^2 L0) [k tau]_0 and -(m/k0) L0 sinc^2(k0 L0/2). For V a = 0
/// the amplitudes at k = 0 change character and the terms become -(m a/k0) sinc(k0 L0)
/// and -(m L0/k0) sinc(k0 L0), so that both delays vanish.
BranchPointTerms branch_point_terms(const Packet& packet, const Barrier& barrier);

/// tau(k0) + bp_tunnel_term.
double tunneling_time(const Packet& packet, const Barrier& barrier);

/// (m/k0) L0 (1 - sinc^2(k0 L0/2)).
double t_outside(const Packet& packet, const Barrier& barrier);

/// t_tunnel - a v^-1, with a warning when the validity gate fails.
WarnedValue delay_A(const Packet& packet, const Barrier& barrier);

/// t_outside - L0 v^-1.
double delay_B(const Packet& packet, const Barrier& barrier);

/// All of the above from shared subexpressions.
TimeBudget age_difference(const Packet& packet, const Barrier& barrier);

}  // namespace tunneltime
