#include "tunneltime/propagator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <utility>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/phasetime.hpp"

namespace tunneltime {
namespace {

constexpr double kCoverage = 0.99;
constexpr double kMinTransmission = 1e-6;

// Time by which a fraction kCoverage of the weight has passed, given per-component
// last-arrival times.
double coverage_time(std::vector<std::pair<double, double>>& arrivals) {
  std::sort(arrivals.begin(), arrivals.end());
  double total = 0.0;
  for (const auto& a : arrivals) total += a.second;
  double acc = 0.0;
  for (const auto& a : arrivals) {
    acc += a.second;
    if (acc >= kCoverage * total) return a.first;
  }
  return arrivals.empty() ? 0.0 : arrivals.back().first;
}

}  // namespace

GridSpec plan_grid(const Packet& packet, const Barrier& barrier, double detector_x, int refine) {
  packet.validate();
  barrier.validate();
  if (refine < 1) throw DomainError("refine must be >= 1");
  const double a = barrier.width;
  const double m = barrier.mass;
  const double L0 = packet.L0;
  if (detector_x <= 0.0) detector_x = 0.5 * a + 0.1 * L0;
  if (!(detector_x > 0.5 * a)) throw DomainError("detector must sit beyond the barrier, x > a/2");

  GridSpec g;
  g.k_max = std::max(packet.k0, barrier.kappa0()) + 10.0 * 2.0 * std::numbers::pi / L0;
  double dx = 2.0 * std::numbers::pi / (20.0 * g.k_max);
  if (a > 0.0) dx = std::min(dx, a / 50.0);
  dx /= refine;
  if (a > 0.0) dx = 0.5 * a / std::ceil(0.5 * a / dx - 1e-9);
  g.dx = dx;
  g.dt = m * dx * dx;

  // Last arrival of each plane-wave component of the packet: its back edge starts
  // D away from the detector, and crossing the barrier takes tau(k) instead of m a/k.
  const double D = detector_x + 0.5 * a + L0;
  const double dk = std::numbers::pi / (8.0 * L0);
  const double k_hi = packet.k0 + 400.0 * std::numbers::pi / L0;
  std::vector<std::pair<double, double>> through, free;
  for (double k = dk; k <= k_hi; k += dk) {
    const double w = f_abs_sq(k - packet.k0, packet);
    const double T = std::norm(amplitudes(k, barrier).T);
    const double tau = std::max(0.0, phase_time(k, barrier));
    through.emplace_back(m * (D - a) / k + tau, w * T);
    free.emplace_back(m * D / k, w);
  }
  g.t_max = std::max(coverage_time(through), coverage_time(free));
  g.n_steps = static_cast<std::size_t>(std::ceil(g.t_max / g.dt));
  g.t_max = static_cast<double>(g.n_steps) * g.dt;

  const double margin = 0.5 * g.t_max / (m * dx);
  g.x_min = -dx * std::ceil((L0 + 0.5 * a + margin) / dx);
  g.x_max = dx * std::ceil((detector_x + margin) / dx);
  g.detector_x = dx * std::round(detector_x / dx);
  return g;
}

double Grid1D::norm() const {
  double s = 0.0;
  for (const cplx& z : amplitudes) s += std::norm(z);
  return s * dx;
}

double Grid1D::mean_position() const {
  double s = 0.0, n = 0.0;
  for (std::size_t i = 0; i < amplitudes.size(); ++i) {
    const double p = std::norm(amplitudes[i]);
    s += p * x(i);
    n += p;
  }
  return s / n;
}

Grid1D make_grid(const GridSpec& spec) {
  Grid1D g;
  g.x_min = spec.x_min;
  g.dx = spec.dx;
  g.dt = spec.dt;
  const auto n = static_cast<std::size_t>(std::llround((spec.x_max - spec.x_min) / spec.dx)) + 1;
  g.amplitudes.assign(n, cplx{});
  g.x_max = g.x(n - 1);
  return g;
}

Grid1D init_state(const Packet& packet, const Barrier& barrier, const Grid1D& grid) {
  packet.validate();
  const double hi = -0.5 * barrier.width;
  const double lo = hi - packet.L0;
  if (lo - grid.dx < grid.x_min || hi + grid.dx > grid.x_max) {
    throw GridTooSmall("packet support [" + detail::fmt_g(lo) + ", " + detail::fmt_g(hi) + "] does not fit in [" +
                       detail::fmt_g(grid.x_min) + ", " + detail::fmt_g(grid.x_max) + "]");
  }
  Grid1D out = grid;
  std::fill(out.amplitudes.begin(), out.amplitudes.end(), cplx{});
  const double slack = 1e-9 * grid.dx;
  for (std::size_t i = 0; i < out.amplitudes.size(); ++i) {
    const double x = out.x(i);
    if (x >= lo - slack && x <= hi + slack) out.amplitudes[i] = std::polar(1.0 / std::sqrt(packet.L0), packet.k0 * x);
  }
  const double scale = 1.0 / std::sqrt(out.norm());
  for (cplx& z : out.amplitudes) z *= scale;
  out.step_count = 0;
  return out;
}

double mean_wavenumber(const Grid1D& grid) {
  cplx s = 0.0;
  for (std::size_t i = 0; i + 1 < grid.amplitudes.size(); ++i) s += std::conj(grid.amplitudes[i]) * grid.amplitudes[i + 1];
  return std::arg(s) / grid.dx;
}

CrankNicolson::CrankNicolson(const Grid1D& grid, const Barrier& barrier) : dx_(grid.dx), mass_(barrier.mass) {
  const std::size_t n = grid.amplitudes.size();
  const cplx half_i_dt{0.0, 0.5 * grid.dt};
  const double kinetic = 1.0 / (mass_ * dx_ * dx_);
  off_ = half_i_dt * (-0.5 * kinetic);
  diag_.resize(n);
  rdiag_.resize(n);
  const double edge = 0.5 * barrier.width;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = grid.x(i);
    double v = 0.0;
    if (std::abs(x) < edge - 1e-9 * dx_) {
      v = barrier.height;
    } else if (std::abs(std::abs(x) - edge) <= 1e-9 * dx_ && edge > 0.0) {
      v = 0.5 * barrier.height;
    }
    diag_[i] = 1.0 + half_i_dt * (kinetic + v);
    rdiag_[i] = 1.0 - half_i_dt * (kinetic + v);
  }
  cprime_.resize(n);
  inv_.resize(n);
  inv_[0] = 1.0 / diag_[0];
  cprime_[0] = off_ * inv_[0];
  for (std::size_t i = 1; i < n; ++i) {
    inv_[i] = 1.0 / (diag_[i] - off_ * cprime_[i - 1]);
    cprime_[i] = off_ * inv_[i];
  }
}

void CrankNicolson::step(std::vector<cplx>& psi) const {
  const std::size_t n = psi.size();
  // Forward sweep fused with building the right-hand side; psi[i-1] is already
  // overwritten, so the previous original value is carried along.
  cplx prev_orig = 0.0;
  cplx prev_d = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    const cplx cur = psi[i];
    const cplx next = i + 1 < n ? psi[i + 1] : cplx{};
    const cplx r = rdiag_[i] * cur - off_ * (prev_orig + next);
    prev_d = (r - off_ * prev_d) * inv_[i];
    psi[i] = prev_d;
    prev_orig = cur;
  }
  for (std::size_t i = n - 1; i-- > 0;) psi[i] -= cprime_[i] * psi[i + 1];
}

double CrankNicolson::flux(const std::vector<cplx>& psi, std::size_t j) const {
  return (std::conj(psi[j]) * psi[j + 1]).imag() / (mass_ * dx_);
}

Grid1D evolve(Grid1D state, const Barrier& barrier, std::size_t n_steps) {
  const CrankNicolson cn(state, barrier);
  for (std::size_t s = 0; s < n_steps; ++s) cn.step(state.amplitudes);
  state.step_count += n_steps;
  return state;
}

ArrivalRecord measure_arrival(const Packet& packet, const Barrier& barrier, const GridSpec& spec) {
  Grid1D grid = init_state(packet, barrier, make_grid(spec));
  const CrankNicolson cn(grid, barrier);
  const auto j = static_cast<std::size_t>(std::llround((spec.detector_x - grid.x_min) / grid.dx));
  if (j + 1 >= grid.amplitudes.size()) throw GridTooSmall("detector lies outside the grid");

  double s0 = 0.0, s1 = 0.0;
  std::vector<cplx> mid(2);
  for (std::size_t n = 0; n < spec.n_steps; ++n) {
    const cplx a0 = grid.amplitudes[j], a1 = grid.amplitudes[j + 1];
    cn.step(grid.amplitudes);
    mid[0] = 0.5 * (a0 + grid.amplitudes[j]);
    mid[1] = 0.5 * (a1 + grid.amplitudes[j + 1]);
    const double J = cn.flux(mid, 0) * grid.dt;
    s0 += J;
    s1 += (static_cast<double>(n) + 0.5) * grid.dt * J;
  }
  grid.step_count = spec.n_steps;

  ArrivalRecord r;
  r.detector_x = grid.x(j);
  r.transmitted_fraction = std::clamp(s0, 0.0, 1.0);
  r.mean_arrival = s0 > 0.0 ? s1 / s0 : 0.0;
  r.norm_drift = std::abs(grid.norm() - 1.0);
  return r;
}

DelayMeasurement measure_delay(const Packet& packet, const Barrier& barrier, double detector_x, int refine) {
  DelayMeasurement d;
  d.grid = plan_grid(packet, barrier, detector_x, refine);
  d.with_barrier = measure_arrival(packet, barrier, d.grid);
  if (d.with_barrier.transmitted_fraction < kMinTransmission) {
    throw InsufficientFlux("transmitted fraction " + detail::fmt_g(d.with_barrier.transmitted_fraction) +
                               " is too small for an arrival time",
                           d.with_barrier.transmitted_fraction);
  }
  const Barrier open{0.0, barrier.width, barrier.mass};
  d.free = measure_arrival(packet, open, d.grid);
  d.delay = d.with_barrier.mean_arrival - d.free.mean_arrival;
  return d;
}

double empirical_delay(const Packet& packet, const Barrier& barrier, double detector_x) {
  return measure_delay(packet, barrier, detector_x).delay;
}

}  // namespace tunneltime
