// Acceptance suite: one PASS/FAIL line per criterion, non-zero exit if any fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tunneltime/closedform.hpp"
#include "tunneltime/phasetime.hpp"
#include "tunneltime/propagator.hpp"
#include "tunneltime/quadrature.hpp"
#include "tunneltime/resonances.hpp"
#include "tunneltime/scattering.hpp"

using namespace tunneltime;

namespace {

const Barrier base = Barrier::from_two_m_v(1.0, 15.0);

struct Outcome {
  bool pass = true;
  std::ostringstream notes;

  void require(bool ok, const std::string& what) {
    if (!ok) {
      pass = false;
      notes << " [failed: " << what << "]";
    }
  }
};

std::string g(double x) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", x);
  return buf;
}

void unitarity(Outcome& o) {
  double worst_f = 0, worst_rt = 0, worst_conj = 0;
  const int n = 10000;
  for (int i = 0; i < n; ++i) {
    // symmetric grid on [-10, 10] that skips 0
    const double k = -10.0 + 20.0 * (i + 0.5) / n;
    const ScatteringData d = amplitudes(k, base);
    const ScatteringData m = amplitudes(-k, base);
    worst_f = std::max({worst_f, std::abs(std::abs(d.F_plus) - 1.0), std::abs(std::abs(d.F_minus) - 1.0)});
    worst_rt = std::max(worst_rt, std::abs(std::norm(d.R) + std::norm(d.T) - 1.0));
    worst_conj = std::max({worst_conj, std::abs(m.F_plus - std::conj(d.F_plus)), std::abs(m.F_minus - std::conj(d.F_minus))});
  }
  o.notes << "max||F|-1|=" << g(worst_f) << " max||R|^2+|T|^2-1|=" << g(worst_rt) << " max|F(-k)-F(k)*|=" << g(worst_conj);
  o.require(worst_f < 1e-12, "|F| unimodular");
  o.require(worst_rt < 1e-12, "flux conservation");
  o.require(worst_conj < 1e-12, "reality condition");
}

void phase_time_consistency(Outcome& o) {
  double worst = 0;
  for (double k : {0.3, 0.7, 1.1, 1.5}) {
    const double closed = phase_time(k, base);
    worst = std::max(worst, std::abs(phase_time_fd(k, base) - closed) / std::abs(closed));
  }
  o.notes << "max rel err=" << g(worst);
  o.require(worst < 1e-6, "relative error < 1e-6");
}

// gaps[q] for q = v_inv, t_tunnel, dtau_B; returns whether every gap is within tolerance
bool oracle_gaps(double k0, double L0, const Barrier& b, double gaps[3], Outcome& o, bool record) {
  const Packet p{k0, L0};
  const TimeBudget t = age_difference(p, b);
  const QuadratureConfig cfg;
  const double closed[] = {t.v_inv, t.t_tunnel, t.dtau_B};
  const double tol[] = {1e-3 * std::abs(t.v_inv), 0.05 * t.tau_ph, 0.05 * b.mass / (k0 * k0)};
  const OracleKind kinds[] = {OracleKind::inverse_velocity, OracleKind::tunneling_time, OracleKind::delay_B};
  const char* names[] = {"v_inv", "t_tunnel", "dtau_B"};
  bool all = true;
  for (int q = 0; q < 3; ++q) {
    gaps[q] = std::abs(closed[q] - run_oracle(kinds[q], p, b, cfg).value);
    const bool ok = gaps[q] <= tol[q];
    all = all && ok;
    if (record) o.require(ok, std::string(names[q]) + " gap " + g(gaps[q]) + " > tol " + g(tol[q]) + " at k0=" + g(k0) + " L0=" + g(L0));
  }
  return all;
}

void closed_vs_oracle(Outcome& o) {
  const char* names[] = {"v_inv", "t_tunnel", "dtau_B"};
  for (double k0 : {0.3, 0.7, 1.1}) {
    double g150[3], g300[3];
    oracle_gaps(k0, 150.0, base, g150, o, true);
    oracle_gaps(k0, 300.0, base, g300, o, false);
    for (int q = 0; q < 3; ++q) {
      const double r = g300[q] / g150[q];
      o.notes << " " << names[q] << "@" << g(k0) << ":gap=" << g(g150[q]) << ",ratio=" << g(r);
      o.require(r >= 0.3 && r <= 0.7, std::string(names[q]) + " gap ratio " + g(r) + " at k0=" + g(k0));
    }
  }
}

void figure3(Outcome& o) {
  double best = -INFINITY, best_k = 0, worst_rel = 0;
  for (int i = 0; i <= 60; ++i) {
    const double k0 = 0.8 + 0.01 * i;
    const double t150 = tunneling_time(Packet{k0, 150.0}, base);
    const double t300 = tunneling_time(Packet{k0, 300.0}, base);
    if (t150 > best) {
      best = t150;
      best_k = k0;
    }
    if (k0 >= 0.9 - 1e-12 && k0 <= 1.3 + 1e-12) worst_rel = std::max(worst_rel, std::abs(t150 - t300) / std::abs(t150));
  }
  const double l150 = tunneling_time(Packet{0.01, 150.0}, base);
  const double l300 = tunneling_time(Packet{0.01, 300.0}, base);
  const double low_rel = std::abs(l150 - l300) / std::abs(l150);
  const bool interior = best_k > 0.8 && best_k < 1.4;
  o.notes << "peak at k0=" << g(best_k) << " max rel diff [0.9,1.3]=" << g(worst_rel) << " rel diff at 0.01=" << g(low_rel);
  o.require(interior && std::abs(best_k - 1.1) <= 0.1 + 1e-12, "local maximum at 1.1 +- 0.1");
  o.require(worst_rel < 0.02, "L0 independence in resonance window");
  o.require(low_rel > 0.1, "L0 dependence at k0 = 0.01");
}

void figure4(Outcome& o) {
  for (double k0 : {0.5, 0.005}) {
    const TimeBudget b = age_difference(Packet{k0, 150.0}, base);
    o.notes << " k0=" << g(k0) << ": t_age=" << g(b.t_age) << " t0=" << g(b.t0);
    o.require(b.t_age < b.t0, "t_age < t0 at k0=" + g(k0));
  }
}

void limit_ordering(Outcome& o) {
  std::vector<double> dev;
  for (double L0 : {150.0, 300.0, 600.0}) {
    const double k0 = 1.0 / L0;
    dev.push_back(std::abs(tunneling_time(Packet{k0, L0}, base) - phase_time(k0, base)));
  }
  for (std::size_t i = 1; i < dev.size(); ++i) {
    const double r = dev[i] / dev[i - 1];
    o.notes << " ratio=" << g(r);
    o.require(std::abs(r - 2.0) <= 0.2, "growth ratio 2 +- 0.2");
  }
  const double tau = phase_time(0.5, base);
  const double far = std::abs(tunneling_time(Packet{0.5, 1e4}, base) - tau);
  o.notes << " rel dev at L0=1e4: " << g(far / tau);
  o.require(far < 1e-3 * tau, "convergence to tau_ph at large L0");
}

void resonance_suite(Outcome& o) {
  std::vector<double> ks;
  for (int i = 0; i < 100; ++i) ks.push_back(0.05 + 2.95 * i / 99.0);
  const SearchRect rect;
  const ResonanceDecomposition dec = decompose(base, rect, ks);  // throws CountMismatch on disagreement
  int plus = 0, minus = 0;
  for (const auto& p : dec.poles) (p.parity == Parity::plus ? plus : minus)++;
  const int wp = winding_count(base, rect, Parity::plus), wm = winding_count(base, rect, Parity::minus);
  const DecompositionCheck c = validate_decomposition(dec);
  o.notes << "poles +" << plus << "/-" << minus << " winding +" << wp << "/-" << wm
          << " max residual=" << g(c.max_pole_residual) << " max||G|-1|=" << g(c.max_modulus_error);
  o.require(plus == wp && minus == wm && plus + minus > 0, "harvest equals winding count");
  o.require(c.max_pole_residual < 1e-10, "pole residuals");
  o.require(c.max_modulus_error < 1e-6, "|G| = 1");

  std::mt19937_64 rng(20261015);
  std::uniform_real_distribution<double> U(0.05, 1.5);
  double worst = 0;
  for (int i = 0; i < 20; ++i) {
    const double k0 = U(rng);
    const double direct = phase_time(k0, base) - base.width * base.mass / k0;
    worst = std::max(worst, std::abs(resonance_delay_logderiv(k0, base) - direct) / std::abs(direct));
  }
  o.notes << " identity max rel err=" << g(worst);
  o.require(worst < 1e-8, "log-derivative identity");
}

void validity_gate(Outcome& o) {
  double gaps[3];
  bool base_ok = true;
  for (double k0 : {0.3, 0.7, 1.1}) base_ok = oracle_gaps(k0, 150.0, base, gaps, o, false) && base_ok;
  o.notes << "mVaL0=" << g(validity_check(Packet{0.7, 150.0}, base).ratio) << " tolerances " << (base_ok ? "met" : "missed");
  o.require(base_ok, "default barrier within tolerance");

  const Barrier thin = Barrier::from_two_m_v(1.0, 1e-3);
  const Packet p{0.7, 150.0};
  const TimeBudget t = age_difference(p, thin);
  const double gap = std::abs(t.t_tunnel - oracle_tunneling_time(p, thin, QuadratureConfig{}).value);
  const double tol = 0.05 * t.tau_ph;
  o.notes << "; thin barrier mVaL0=" << g(t.validity.ratio) << " t_tunnel gap=" << g(gap) << " tol=" << g(tol);
  o.require(t.validity.ratio < 1.0, "thin barrier below the gate");
  o.require(gap > tol, "breakdown below the gate");
}

void propagation(Outcome& o) {
  const Barrier open{0.0, base.width, 1.0};
  {
    const Packet p{0.5, 150.0};
    const GridSpec spec = plan_grid(p, base);
    const Grid1D s0 = init_state(p, open, make_grid(spec));
    const Grid1D s1 = evolve(s0, open, 1000);
    const double v = (s1.mean_position() - s0.mean_position()) / (1000 * spec.dt);
    const double rel = std::abs(v - p.k0 / open.mass) / (p.k0 / open.mass);
    o.notes << "free velocity rel err=" << g(rel);
    o.require(rel < 0.01, "free velocity");
  }
  for (double k0 : {0.5, 1.1}) {
    const Packet p{k0, 150.0};
    const DelayMeasurement d = measure_delay(p, base);
    const TimeBudget b = age_difference(p, base);
    const double closed = b.dtau_A + b.dtau_B;
    const double drift = std::max(d.with_barrier.norm_drift, d.free.norm_drift);
    o.notes << " k0=" << g(k0) << ": empirical=" << g(d.delay) << " closed=" << g(closed) << " drift=" << g(drift);
    o.require(drift < 1e-7, "norm drift at k0=" + g(k0));
    o.require(d.delay * closed > 0.0, "sign agreement at k0=" + g(k0));
    if (k0 == 0.5) o.require(d.delay < 0.0, "negative delay at k0=0.5");
    if (k0 == 1.1) o.require(d.delay / closed >= 0.5 && d.delay / closed <= 2.0, "factor of 2 at k0=1.1");
  }
}

struct Criterion {
  int id;
  const char* name;
  double budget_s;
  std::function<void(Outcome&)> body;
};

}  // namespace

int main() {
  const std::vector<Criterion> criteria = {
      {1, "unitarity and modulus", 1.0, unitarity},
      {2, "phase-time consistency", 1.0, phase_time_consistency},
      {3, "closed form vs oracle", 30.0, closed_vs_oracle},
      {4, "t_tunnel peak and L0 dependence", 10.0, figure3},
      {5, "age-difference dips", 5.0, figure4},
      {6, "limit ordering", 5.0, limit_ordering},
      {7, "resonance suite", 30.0, resonance_suite},
      {8, "validity-gate breakdown", 30.0, validity_gate},
      {9, "propagation cross-check", 120.0, propagation},
  };
  int failures = 0;
  for (const auto& c : criteria) {
    Outcome o;
    const auto start = std::chrono::steady_clock::now();
    try {
      c.body(o);
    } catch (const std::exception& e) {
      o.pass = false;
      o.notes << " [exception: " << e.what() << "]";
    }
    const double elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    o.require(elapsed < c.budget_s, "runtime over " + g(c.budget_s) + " s");
    if (!o.pass) ++failures;
    std::printf("%s criterion %d (%s) %.2fs: %s\n", o.pass ? "PASS" : "FAIL", c.id, c.name, elapsed, o.notes.str().c_str());
  }
  std::printf("%d of %zu criteria passed\n", static_cast<int>(criteria.size()) - failures, criteria.size());
  return failures == 0 ? 0 : 1;
}
