#include "tunneltime/scattering.hpp"

#include <cmath>
#include <numbers>
#include <string>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"

namespace tunneltime {
namespace {

constexpr double kPoleProximity = 1e-14;
constexpr double kMaxPhaseStep = std::numbers::pi / 4.0;

// Half-width hyperbolic factors c = cosh(kappa a/2), s = sinh(kappa a/2)/kappa and
// det = c^2 - kappa^2 s^2. For Re(kappa a) large every factor is rescaled by
// e^{-kappa a/2}; all amplitudes are ratios, so the common scale drops out.
struct HalfTerms {
  cplx kappa_sq;
  cplx c;
  cplx s;
  cplx det;
};

HalfTerms half_terms(cplx k, const Barrier& barrier) {
  const cplx kap = kappa(k, barrier);
  const cplx x = 0.5 * kap * barrier.width;
  HalfTerms h;
  h.kappa_sq = barrier.two_m_v() - k * k;
  if (x.real() > 20.0) {
    const cplx e = std::exp(-2.0 * x);
    h.c = 0.5 * (1.0 + e);
    h.s = 0.5 * (1.0 - e) / kap;
    h.det = e;
  } else {
    h.c = std::cosh(x);
    h.s = 0.5 * barrier.width * detail::sinhc(x);
    h.det = 1.0;
  }
  return h;
}

ChannelFraction fraction_from(cplx k, const HalfTerms& h, Parity parity) {
  const cplx i{0.0, 1.0};
  if (parity == Parity::plus) {
    return {h.c * k - i * h.kappa_sq * h.s, h.c * k + i * h.kappa_sq * h.s};
  }
  return {k * h.s - i * h.c, k * h.s + i * h.c};
}

}  // namespace

Barrier Barrier::from_two_m_v(double two_m_v, double width, double mass) {
  Barrier b{two_m_v / (2.0 * mass), width, mass};
  b.validate();
  return b;
}

double Barrier::kappa0() const { return std::sqrt(two_m_v()); }

void Barrier::validate() const {
  if (!std::isfinite(height) || !std::isfinite(width) || !std::isfinite(mass)) {
    throw DomainError("barrier parameters must be finite");
  }
  if (height < 0.0) throw DomainError("barrier height must be >= 0");
  if (width < 0.0) throw DomainError("barrier width must be >= 0");
  if (mass <= 0.0) throw DomainError("mass must be > 0");
}

cplx kappa(cplx k, const Barrier& barrier) {
  const cplx z = barrier.two_m_v() - k * k;
  if (z.imag() == 0.0 && z.real() < 0.0) return {0.0, std::sqrt(-z.real())};
  return std::sqrt(z);
}

ChannelFraction channel_fraction(cplx k, const Barrier& barrier, Parity parity) {
  return fraction_from(k, half_terms(k, barrier), parity);
}

ScatteringData amplitudes(cplx k, const Barrier& barrier) {
  const HalfTerms h = half_terms(k, barrier);
  const ChannelFraction fp = fraction_from(k, h, Parity::plus);
  const ChannelFraction fm = fraction_from(k, h, Parity::minus);
  for (const auto* f : {&fp, &fm}) {
    if (std::abs(f->denominator) < kPoleProximity * std::abs(f->numerator)) {
      throw PoleProximity("F" + std::string(f == &fp ? "+" : "-") + " denominator vanishes at k = (" +
                          detail::fmt_g(k.real()) + ", " + detail::fmt_g(k.imag()) + ")");
    }
  }
  const cplx i{0.0, 1.0};
  const cplx shift = std::exp(-i * k * barrier.width);
  const cplx den = fp.denominator * fm.denominator;

  ScatteringData d;
  d.k = k;
  d.F_plus = shift * fp.numerator / fp.denominator;
  d.F_minus = shift * fm.numerator / fm.denominator;
  // R = (F+ + F-) e^{ika}/2 and T = (F+ - F-) e^{ika}/2, combined over the common
  // denominator so that tunnelling-suppressed T keeps full relative precision.
  d.R = h.c * h.s * barrier.two_m_v() / den;
  d.T = i * k * h.det / den;
  if (k.imag() == 0.0) {
    d.theta_plus = detail::arg_positive(d.F_plus);
    d.theta_minus = detail::arg_positive(d.F_minus);
    d.theta = detail::arg_positive(d.T);
  }
  return d;
}

std::pair<cplx, cplx> small_a_amplitudes(cplx k, const Barrier& barrier) {
  const double gate = std::sqrt(barrier.mass * barrier.height) * barrier.width;
  if (!(gate < 0.1)) {
    throw RegimeViolation("thin-barrier amplitudes need sqrt(mV) a < 0.1, got " + detail::fmt_g(gate));
  }
  if (barrier.width == 0.0) return {1.0, -1.0};
  const cplx i{0.0, 1.0};
  const double a = barrier.width;
  const cplx shift = std::exp(-i * k * a);
  const cplx g = (barrier.mass * barrier.height - 0.5 * k * k) * a;
  const cplx f_plus = shift * (k - i * g) / (k + i * g);
  const cplx f_minus = shift * (k - 2.0 * i / a) / (k + 2.0 * i / a);
  return {f_plus, f_minus};
}

PhaseSweep::PhaseSweep(const Barrier& barrier, double k_start) : barrier_(barrier) {
  barrier_.validate();
  if (!(k_start > 0.0)) throw DomainError("phase sweep must start at k > 0");
  current_ = amplitudes(k_start, barrier_);
  // arg_positive places F = -1 + o(1) at pi, which is the k -> 0+ convention.
  current_.theta = 0.5 * std::numbers::pi +
                   0.5 * (current_.theta_plus + current_.theta_minus + 2.0 * k_start * barrier_.width);
}

ScatteringData PhaseSweep::advance_to(double k) {
  if (k < position()) throw DomainError("phase sweep must be monotone increasing");
  if (k > position()) step(amplitudes(k, barrier_), 0);
  return current_;
}

void PhaseSweep::step(const ScatteringData& next, int depth) {
  const double dp = std::arg(next.F_plus / current_.F_plus);
  const double dm = std::arg(next.F_minus / current_.F_minus);
  const double dt = std::arg(next.T / current_.T);
  const bool too_coarse =
      std::abs(dp) > kMaxPhaseStep || std::abs(dm) > kMaxPhaseStep || std::abs(dt) > kMaxPhaseStep;
  if (too_coarse && depth < 60) {
    const double mid = 0.5 * (current_.k.real() + next.k.real());
    step(amplitudes(mid, barrier_), depth + 1);
    step(next, depth + 1);
    return;
  }
  const double tp = current_.theta_plus + dp;
  const double tm = current_.theta_minus + dm;
  const double tt = current_.theta + dt;
  current_ = next;
  current_.theta_plus = tp;
  current_.theta_minus = tm;
  current_.theta = tt;
}

std::vector<ScatteringData> amplitude_sweep(const Barrier& barrier, std::span<const double> ks) {
  std::vector<ScatteringData> out;
  out.reserve(ks.size());
  if (ks.empty()) return out;
  PhaseSweep sweep(barrier, std::min(1e-9, ks.front()));
  for (double k : ks) out.push_back(sweep.advance_to(k));
  return out;
}

}  // namespace tunneltime
