#pragma once

// Small numerical helpers shared by the library sources. Not installed.

#include <cmath>
#include <complex>
#include <cstdio>
#include <numbers>
#include <string>

namespace tunneltime::detail {

using cplx = std::complex<double>;

/// sinh(z)/z, continuous through z = 0.
inline cplx sinhc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 + z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sinh(z) / z;
}

/// sin(x)/x, continuous through x = 0.
inline double sinc(double x) {
  if (std::abs(x) < 1e-4) {
    const double x2 = x * x;
    return 1.0 - x2 / 6.0 + x2 * x2 / 120.0;
  }
  return std::sin(x) / x;
}

/// Maps a principal argument into [0, 2pi).
inline double arg_positive(cplx z) {
  double t = std::arg(z);
  if (t < 0.0) t += 2.0 * std::numbers::pi;
  return t;
}

/// Central difference with one Richardson step: (4 D(h/2) - D(h)) / 3.
template <class Fn>
double richardson_derivative(Fn&& f, double x, double h) {
  auto central = [&](double s) { return (f(x + s) - f(x - s)) / (2.0 * s); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/// d arg g / dx without explicit unwrapping: the phase difference across
/// [x - s, x + s] is taken as arg(g(x+s)/g(x-s)), valid while it stays below pi.
template <class Fn>
double richardson_phase_derivative(Fn&& g, double x, double h) {
  auto central = [&](double s) { return std::arg(g(x + s) / g(x - s)) / (2.0 * s); };
  return (4.0 * central(0.5 * h) - central(h)) / 3.0;
}

/// Short human-readable number for error messages.
inline std::string fmt_g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", x);
  return buf;
}

}  // namespace tunneltime::detail
