#include "tunneltime/closedform.hpp"

#include <cmath>
#include <cstdio>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/phasetime.hpp"

namespace tunneltime {
namespace {

void check(const Packet& packet, const Barrier& barrier) {
  packet.validate();
  barrier.validate();
}

std::optional<ValidityWarning> warning_for(const ValidityCheck& v) {
  if (v.valid) return std::nullopt;
  char buf[160];
  std::snprintf(buf, sizeof buf, "m V a L0 = %.6g is below %.0f; pole residues neglected by the closed form are not small",
                v.ratio, kValidityThreshold);
  return ValidityWarning{v.ratio, buf};
}

}  // namespace

ValidityCheck validity_check(const Packet& packet, const Barrier& barrier) {
  ValidityCheck v;
  v.ratio = barrier.mass * barrier.height * barrier.width * packet.L0;
  v.valid = v.ratio >= kValidityThreshold;
  return v;
}

double inverse_velocity(const Packet& packet, const Barrier& barrier) {
  check(packet, barrier);
  const double m_k = barrier.mass / packet.k0;
  return m_k * (1.0 - detail::sinc(packet.k0 * packet.L0));
}

double t_no_barrier(const Packet& packet, const Barrier& barrier) {
  return (packet.L0 + barrier.width) * inverse_velocity(packet, barrier);
}

BranchPointTerms branch_point_terms(const Packet& packet, const Barrier& barrier) {
  check(packet, barrier);
  const double k0 = packet.k0;
  const double L0 = packet.L0;
  const double m_k = barrier.mass / k0;
  BranchPointTerms bp;
  if (barrier.is_opaque()) {
    bp.tunnel = -std::sin(k0 * L0) / (k0 * k0 * L0) * k_tau_limit(barrier);
    const double s = detail::sinc(0.5 * k0 * L0);
    bp.outside = -m_k * L0 * s * s;
  } else {
    // No barrier: F+-(0) = +-1 instead of -1, k tau = m a for every k, and the
    // pole at k = 0 contributes only through the free inverse velocity.
    bp.tunnel = -m_k * barrier.width * detail::sinc(k0 * L0);
    bp.outside = -m_k * L0 * detail::sinc(k0 * L0);
  }
  return bp;
}

double tunneling_time(const Packet& packet, const Barrier& barrier) {
  return age_difference(packet, barrier).t_tunnel;
}

double t_outside(const Packet& packet, const Barrier& barrier) {
  return age_difference(packet, barrier).t_outside;
}

WarnedValue delay_A(const Packet& packet, const Barrier& barrier) {
  const TimeBudget b = age_difference(packet, barrier);
  return {b.dtau_A, b.warning};
}

double delay_B(const Packet& packet, const Barrier& barrier) {
  return age_difference(packet, barrier).dtau_B;
}

TimeBudget age_difference(const Packet& packet, const Barrier& barrier) {
  check(packet, barrier);
  const double k0 = packet.k0;
  const double L0 = packet.L0;
  const double a = barrier.width;
  const double m_k = barrier.mass / k0;

  TimeBudget b;
  b.validity = validity_check(packet, barrier);
  b.warning = warning_for(b.validity);
  b.v_inv = inverse_velocity(packet, barrier);
  b.t0 = (L0 + a) * b.v_inv;
  b.tau_ph = phase_time(k0, barrier);
  const BranchPointTerms bp = branch_point_terms(packet, barrier);
  b.bp_tunnel_term = bp.tunnel;
  b.bp_outside_term = bp.outside;
  b.t_tunnel = b.tau_ph + bp.tunnel;
  b.t_outside = m_k * L0 + bp.outside;
  b.dtau_A = b.t_tunnel - a * b.v_inv;
  b.dtau_B = b.t_outside - L0 * b.v_inv;
  b.t_age = b.t_tunnel + b.t_outside;
  return b;
}

}  // namespace tunneltime
