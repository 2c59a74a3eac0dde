#include "tunneltime/resonances.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"

namespace tunneltime {
namespace {

constexpr double kSeedStep = 0.05;
constexpr double kPolishTarget = 1e-12;
constexpr double kDedupe = 1e-8;

double residual(cplx k, const Barrier& barrier, Parity parity) {
  const ChannelFraction f = channel_fraction(k, barrier, parity);
  return std::abs(f.denominator) / std::abs(f.numerator);
}

cplx denominator(cplx k, const Barrier& barrier, Parity parity) {
  return channel_fraction(k, barrier, parity).denominator;
}

// Damped Newton on the denominator; the ratio |D|/|N| is the scale-free residual.
bool polish(cplx& k, const Barrier& barrier, Parity parity) {
  const double h = 1e-7;
  for (int it = 0; it < 60; ++it) {
    const cplx d = denominator(k, barrier, parity);
    const cplx dd = (denominator(k + h, barrier, parity) - denominator(k - h, barrier, parity)) / (2.0 * h);
    if (dd == 0.0) return false;
    cplx step = d / dd;
    double lambda = 1.0;
    cplx next = k - step;
    while (std::abs(denominator(next, barrier, parity)) > std::abs(d) && lambda > 1e-3) {
      lambda *= 0.5;
      next = k - lambda * step;
    }
    k = next;
    if (!std::isfinite(k.real()) || !std::isfinite(k.imag())) return false;
    if (std::abs(step) < 1e-15 * std::max(1.0, std::abs(k))) break;
  }
  return residual(k, barrier, parity) < kPolishTarget;
}

ResonancePole make_pole(cplx k, const Barrier& barrier, Parity parity) {
  ResonancePole p;
  p.parity = parity;
  p.k_pole = k;
  p.E_pole = k * k / (2.0 * barrier.mass);
  p.E_R = p.E_pole.real();
  p.Gamma = -2.0 * p.E_pole.imag();
  p.lifetime = 1.0 / p.Gamma;
  p.residual = residual(k, barrier, parity);
  p.resonance = p.E_pole.imag() < 0.0;
  return p;
}

// Accumulated argument change of D from z0 to z1, bisecting while the
// increment exceeds pi/8.
double arg_change(const Barrier& barrier, Parity parity, cplx z0, cplx d0, cplx z1, cplx d1, int depth) {
  const double step = std::arg(d1 / d0);
  if (std::abs(step) <= std::numbers::pi / 8.0 || depth > 40) return step;
  const cplx zm = 0.5 * (z0 + z1);
  const cplx dm = denominator(zm, barrier, parity);
  return arg_change(barrier, parity, z0, d0, zm, dm, depth + 1) + arg_change(barrier, parity, zm, dm, z1, d1, depth + 1);
}

std::vector<ResonancePole> resonances_of(const ResonanceDecomposition& dec, Parity parity) {
  std::vector<ResonancePole> out;
  for (const auto& p : dec.poles)
    if (p.parity == parity && p.resonance && p.k_pole.real() > 0.0) out.push_back(p);
  return out;
}

}  // namespace

int winding_count(const Barrier& barrier, const SearchRect& rect, Parity parity) {
  const cplx corners[] = {{rect.re_min, rect.im_min}, {rect.re_max, rect.im_min}, {rect.re_max, rect.im_max},
                          {rect.re_min, rect.im_max}};
  double total = 0.0;
  for (int e = 0; e < 4; ++e) {
    const cplx a = corners[e];
    const cplx b = corners[(e + 1) % 4];
    const int n = std::max(8, static_cast<int>(std::ceil(std::abs(b - a) / 0.01)));
    cplx z0 = a;
    cplx d0 = denominator(z0, barrier, parity);
    for (int i = 1; i <= n; ++i) {
      const cplx z1 = i == n ? b : a + (b - a) * (static_cast<double>(i) / n);
      const cplx d1 = denominator(z1, barrier, parity);
      total += arg_change(barrier, parity, z0, d0, z1, d1, 0);
      z0 = z1;
      d0 = d1;
    }
  }
  return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

std::vector<ResonancePole> find_poles(const Barrier& barrier, const SearchRect& rect, std::size_t max_poles) {
  barrier.validate();
  if (!(rect.re_max > rect.re_min) || !(rect.im_max > rect.im_min)) throw DomainError("empty search rectangle");
  if (rect.contains(0.0)) throw DomainError("search rectangle must exclude the branch point k = 0");

  std::vector<ResonancePole> out;
  for (Parity parity : {Parity::plus, Parity::minus}) {
    std::vector<cplx> roots;
    const int nr = static_cast<int>(std::floor((rect.re_max - rect.re_min) / kSeedStep + 1e-9));
    const int ni = static_cast<int>(std::floor((rect.im_max - rect.im_min) / kSeedStep + 1e-9));
    for (int i = 0; i <= nr; ++i) {
      for (int j = 0; j <= ni; ++j) {
        cplx k{rect.re_min + i * kSeedStep, rect.im_min + j * kSeedStep};
        if (!polish(k, barrier, parity) || !rect.contains(k)) continue;
        const bool seen = std::any_of(roots.begin(), roots.end(), [&](cplx r) { return std::abs(r - k) < kDedupe; });
        if (!seen) roots.push_back(k);
      }
    }
    const int winding = winding_count(barrier, rect, parity);
    if (static_cast<int>(roots.size()) != winding) {
      throw CountMismatch("F" + std::string(to_string(parity)) + ": Newton harvest found " +
                              std::to_string(roots.size()) + " poles, argument principle counts " +
                              std::to_string(winding),
                          static_cast<int>(roots.size()), winding);
    }
    std::sort(roots.begin(), roots.end(), [](cplx x, cplx y) { return x.real() < y.real(); });
    for (cplx k : roots) out.push_back(make_pole(k, barrier, parity));
    if (out.size() > max_poles) throw NonConvergence("more than " + std::to_string(max_poles) + " poles in rectangle");
  }
  return out;
}

ResonanceDecomposition decompose(const Barrier& barrier, const SearchRect& rect, std::span<const double> sample_k) {
  ResonanceDecomposition dec;
  dec.barrier = barrier;
  dec.poles = find_poles(barrier, rect);
  for (Parity parity : {Parity::plus, Parity::minus}) {
    for (double k : sample_k) {
      dec.remainder_phase_samples.push_back(
          {parity, k, k * k / (2.0 * barrier.mass), remainder_factor(k, dec, parity)});
    }
  }
  return dec;
}

cplx reconstruct_amplitude(double k, const ResonanceDecomposition& decomposition, Parity parity) {
  const double E = k * k / (2.0 * decomposition.barrier.mass);
  cplx product = 1.0;
  for (const auto& p : decomposition.poles) {
    if (p.parity != parity) continue;
    product *= (E - std::conj(p.E_pole)) / (E - p.E_pole);
  }
  return product;
}

cplx remainder_factor(double k, const ResonanceDecomposition& decomposition, Parity parity) {
  const ScatteringData d = amplitudes(k, decomposition.barrier);
  const cplx F = parity == Parity::plus ? d.F_plus : d.F_minus;
  return F / reconstruct_amplitude(k, decomposition, parity);
}

double lorentzian_delay(double E0, const ResonanceDecomposition& decomposition) {
  double sum = 0.0;
  for (Parity parity : {Parity::plus, Parity::minus}) {
    for (const auto& p : resonances_of(decomposition, parity)) {
      const double g = 0.5 * p.Gamma;
      sum += 2.0 / p.Gamma * g * g / ((E0 - p.E_R) * (E0 - p.E_R) + g * g);
    }
  }
  return sum;
}

std::vector<double> lorentzian_weights(double E0, const ResonanceDecomposition& decomposition) {
  std::vector<double> w;
  for (const auto& p : decomposition.poles) {
    if (!p.resonance) continue;
    const double g = 0.5 * p.Gamma;
    w.push_back(g * g / ((E0 - p.E_R) * (E0 - p.E_R) + g * g));
  }
  return w;
}

double resonance_delay_logderiv(double k0, const Barrier& barrier) {
  if (!(k0 > 0.0)) throw DomainError("resonance delay needs k0 > 0");
  const double h = std::min(std::max(1e-6, 1e-8 / k0), 0.25 * k0);
  auto fp = [&](double k) { return amplitudes(k, barrier).F_plus; };
  auto fm = [&](double k) { return amplitudes(k, barrier).F_minus; };
  const double dp = detail::richardson_phase_derivative(fp, k0, h);
  const double dm = detail::richardson_phase_derivative(fm, k0, h);
  return 0.5 * barrier.mass / k0 * (dp + dm);
}

double remainder_delay(double k0, const ResonanceDecomposition& decomposition) {
  if (!(k0 > 0.0)) throw DomainError("remainder delay needs k0 > 0");
  const double h = std::min(std::max(1e-6, 1e-8 / k0), 0.25 * k0);
  double sum = 0.0;
  for (Parity parity : {Parity::plus, Parity::minus}) {
    auto g = [&](double k) { return remainder_factor(k, decomposition, parity); };
    sum += detail::richardson_phase_derivative(g, k0, h);
  }
  return 0.5 * decomposition.barrier.mass / k0 * sum;
}

DecompositionCheck validate_decomposition(const ResonanceDecomposition& decomposition) {
  DecompositionCheck c;
  for (const auto& s : decomposition.remainder_phase_samples)
    c.max_modulus_error = std::max(c.max_modulus_error, std::abs(std::abs(s.G) - 1.0));
  for (const auto& p : decomposition.poles)
    c.max_pole_residual = std::max(c.max_pole_residual, residual(p.k_pole, decomposition.barrier, p.parity));
  c.ok = c.max_modulus_error <= 1e-6 && c.max_pole_residual < 1e-10;
  return c;
}

}  // namespace tunneltime
