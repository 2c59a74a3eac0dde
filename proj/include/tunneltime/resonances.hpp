#pragma once

// Complex poles of F+- and the pole-product (Lorentzian) picture of the delay.

#include <cstddef>
#include <span>
#include <vector>

#include "tunneltime/scattering.hpp"

namespace tunneltime {

struct ResonancePole {
  Parity parity = Parity::plus;
  cplx k_pole;
  cplx E_pole;  // k^2 / 2m
  double E_R = 0.0;
  double Gamma = 0.0;  // -2 Im E
  double lifetime = 0.0;
  double residual = 0.0;  // |denominator| / |numerator| at k_pole
  bool resonance = false;  // Im E < 0
};

struct SearchRect {
  double re_min = 0.5;
  double re_max = 3.0;
  double im_min = -1.0;
  double im_max = 0.0;

  bool contains(cplx k) const {
    return k.real() >= re_min && k.real() <= re_max && k.imag() >= im_min && k.imag() <= im_max;
  }
};

/// Number of zeros of the parity denominator inside rect, from the change of
/// its argument along the boundary.
int winding_count(const Barrier& barrier, const SearchRect& rect, Parity parity);

/// Newton harvest from a 0.05-spaced seed grid, polished to residual < 1e-12,
/// deduplicated within 1e-8, sorted by parity then Re k. Throws CountMismatch if
/// a channel's harvest differs from its winding count, DomainError if the rect
/// touches k = 0, and NonConvergence if more than max_poles are found.
std::vector<ResonancePole> find_poles(const Barrier& barrier, const SearchRect& rect, std::size_t max_poles = 256);

struct RemainderSample {
  Parity parity = Parity::plus;
  double k = 0.0;
  double E = 0.0;
  cplx G;  // F / pole product
};

struct ResonanceDecomposition {
  Barrier barrier;
  std::vector<ResonancePole> poles;
  std::vector<RemainderSample> remainder_phase_samples;
};

/// Finds the poles in rect and samples G+- at the given real wavenumbers.
ResonanceDecomposition decompose(const Barrier& barrier, const SearchRect& rect, std::span<const double> sample_k);

/// prod_j (E - E_j*) / (E - E_j) over the resonance poles of one parity, E = k^2 / 2m.
cplx reconstruct_amplitude(double k, const ResonanceDecomposition& decomposition, Parity parity);

/// G = F / reconstruct_amplitude.
cplx remainder_factor(double k, const ResonanceDecomposition& decomposition, Parity parity);

/// 2 sum (1/Gamma) (Gamma/2)^2 / ((E0 - E_R)^2 + (Gamma/2)^2) over resonance poles.
double lorentzian_delay(double E0, const ResonanceDecomposition& decomposition);

/// Each pole's Lorentzian weight at E0, in (0, 1].
std::vector<double> lorentzian_weights(double E0, const ResonanceDecomposition& decomposition);

/// (1/2) sum over parities of (m/k0) d theta/dk, by Richardson differences.
double resonance_delay_logderiv(double k0, const Barrier& barrier);

/// The part of resonance_delay_logderiv carried by the phase of G+-.
double remainder_delay(double k0, const ResonanceDecomposition& decomposition);

struct DecompositionCheck {
  double max_modulus_error = 0.0;  // max | |G| - 1 | over the samples
  double max_pole_residual = 0.0;
  bool ok = false;  // modulus within 1e-6 and every residual below 1e-10
};

DecompositionCheck validate_decomposition(const ResonanceDecomposition& decomposition);

}  // namespace tunneltime
