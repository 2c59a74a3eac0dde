#include "tunneltime/quadrature.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <queue>
#include <string>
#include <vector>

#include "numeric.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/phasetime.hpp"

namespace tunneltime {
namespace {

constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.0};
constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
constexpr std::array<double, 4> kWg = {0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
                                       0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Panel {
  int segment;
  double a;
  double b;
  cplx value;
  double error;
  double l1;
};

struct Segment {
  bool folded;
  double pole;  // folded segments integrate f(pole + t) + f(pole - t) over t
};

template <class Fn>
void gk15(Fn&& g, Panel& p) {
  const double c = 0.5 * (p.a + p.b);
  const double h = 0.5 * (p.b - p.a);
  const cplx fc = g(c);
  cplx kron = kWgk[7] * fc;
  cplx gauss = kWg[3] * fc;
  double l1 = kWgk[7] * std::abs(fc);
  for (int j = 0; j < 7; ++j) {
    const cplx f1 = g(c - h * kXgk[j]);
    const cplx f2 = g(c + h * kXgk[j]);
    kron += kWgk[j] * (f1 + f2);
    l1 += kWgk[j] * (std::abs(f1) + std::abs(f2));
    if (j % 2 == 1) gauss += kWg[j / 2] * (f1 + f2);
  }
  p.value = kron * h;
  p.error = std::abs((kron - gauss) * h);
  p.l1 = l1 * std::abs(h);
}

struct Window {
  double lo;
  double hi;
  double below;  // k0 - lo
  double above;  // hi - k0
};

Window make_window(const Packet& packet, const QuadratureConfig& config) {
  const double period = 2.0 * std::numbers::pi / packet.L0;
  const double W = std::ceil(config.window(packet) / period - 1e-9) * period;
  const double below = std::ceil((W + 2.0 * packet.k0) / period - 1e-9) * period;
  return {packet.k0 - below, packet.k0 + W, below, W};
}

struct Kernel {
  double epsilon;
  double operator()(double k) const { return epsilon > 0.0 ? k / (k * k + epsilon * epsilon) : 1.0 / k; }
};

QuadResult integrate_window(const Integrand& f, const Window& w, const Packet& packet,
                            const QuadratureConfig& config) {
  const double zero[] = {0.0};
  const double panel = std::numbers::pi / packet.L0;
  if (config.epsilon > 0.0) {
    std::vector<double> bp{0.0};
    for (double s = config.epsilon; s < 1e3 * config.epsilon; s *= 10.0) {
      bp.push_back(s);
      bp.push_back(-s);
    }
    return pv_integrate(f, w.lo, w.hi, {}, config, panel, bp);
  }
  return pv_integrate(f, w.lo, w.hi, zero, config, panel);
}

OracleResult finish(const QuadResult& q, double tail, const char* what) {
  OracleResult r;
  r.value = q.value.real() + tail;
  r.imag = q.value.imag();
  r.error_estimate = q.error_estimate;
  r.tail = tail;
  r.panels = q.panels;
  if (std::abs(r.imag) > 1e-8 * std::abs(r.value) + r.error_estimate) {
    throw ImaginaryResidue(std::string(what) + " oracle has imaginary part " + detail::fmt_g(r.imag));
  }
  return r;
}

// Part of (1/2pi) int |f(k - k0)|^2 c(|k|)/k outside the window, with |f|^2 replaced by
// its oscillation average 2/(L0 q^2). The window edges sit on multiples of 2 pi / L0
// so the first oscillatory correction vanishes. With u = 1/q both pieces become
// smooth integrals over (0, 1/edge].
double tail_correction(const std::function<double(double)>& c, const Packet& packet, const Window& w,
                       const QuadratureConfig& config) {
  const double k0 = packet.k0;
  auto upper = [&](double u) -> cplx { return c(k0 + 1.0 / u) * u / (k0 * u + 1.0); };
  auto lower = [&](double u) -> cplx { return c(1.0 / u - k0) * u / (k0 * u - 1.0); };
  QuadratureConfig tight = config;
  tight.rel_tol = std::min(config.rel_tol, 1e-10);
  const double up = pv_integrate(upper, 0.0, 1.0 / w.above, {}, tight).value.real();
  const double lo = pv_integrate(lower, 0.0, 1.0 / w.below, {}, tight).value.real();
  return (up + lo) / (std::numbers::pi * packet.L0);
}

}  // namespace

double QuadratureConfig::window(const Packet& packet) const {
  return window_half_width > 0.0 ? window_half_width : 400.0 * std::numbers::pi / packet.L0;
}

void QuadratureConfig::validate(const Packet& packet) const {
  packet.validate();
  if (!(rel_tol > 0.0 && rel_tol <= 1e-2)) throw DomainError("rel_tol must lie in (0, 1e-2]");
  if (window(packet) < 20.0 * 2.0 * std::numbers::pi / packet.L0 * (1.0 - 1e-12)) {
    throw DomainError("quadrature window must be at least 20 (2 pi / L0)");
  }
  if (epsilon < 0.0) throw DomainError("epsilon must be >= 0");
}

QuadResult pv_integrate(const Integrand& f, double lo, double hi, std::span<const double> poles,
                        const QuadratureConfig& config, double max_panel_width, std::span<const double> breakpoints) {
  if (!(hi > lo)) throw DomainError("integration range is empty");

  std::vector<double> ps;
  for (double p : poles)
    if (p > lo && p < hi) ps.push_back(p);
  std::sort(ps.begin(), ps.end());

  // Folded half-widths and the regular pieces between them.
  std::vector<Segment> segments;
  std::vector<std::pair<double, double>> ranges;
  double cursor = lo;
  for (std::size_t i = 0; i < ps.size(); ++i) {
    double d = std::min({max_panel_width, ps[i] - cursor, (i + 1 < ps.size() ? 0.5 * (ps[i + 1] - ps[i]) : hi - ps[i])});
    if (i > 0) d = std::min(d, 0.5 * (ps[i] - ps[i - 1]));
    if (ps[i] - d > cursor) {
      segments.push_back({false, 0.0});
      ranges.emplace_back(cursor, ps[i] - d);
    }
    segments.push_back({true, ps[i]});
    ranges.emplace_back(0.0, d);
    cursor = ps[i] + d;
  }
  if (hi > cursor) {
    segments.push_back({false, 0.0});
    ranges.emplace_back(cursor, hi);
  }

  auto eval = [&](int seg, double x) -> cplx {
    const Segment& s = segments[seg];
    if (!s.folded) return f(x);
    // Round the offset so that p + t and p - t are both exact and symmetric.
    const double p = s.pole;
    double t = (p + x) - p;
    if (p - (p - t) != t) t = p - (p - x);
    if (t == 0.0 || (p + t) - p != t || p - (p - t) != t) return 0.0;
    return f(p + t) + f(p - t);
  };

  std::vector<Panel> panels;
  auto add_panel = [&](int seg, double a, double b) {
    Panel p{seg, a, b, {}, 0.0, 0.0};
    gk15([&](double x) { return eval(seg, x); }, p);
    panels.push_back(p);
  };
  for (int s = 0; s < static_cast<int>(segments.size()); ++s) {
    auto [a, b] = ranges[s];
    std::vector<double> cuts{a, b};
    if (segments[s].folded) {
      double t = b;
      for (int j = 0; j < 50; ++j) {
        t *= 0.5;
        cuts.push_back(t);
      }
    } else {
      for (double x : breakpoints)
        if (x > a && x < b) cuts.push_back(x);
    }
    std::sort(cuts.begin(), cuts.end());
    for (std::size_t j = 0; j + 1 < cuts.size(); ++j) {
      const double ca = cuts[j], cb = cuts[j + 1];
      if (!(cb > ca)) continue;
      const int n = std::max(1, static_cast<int>(std::ceil((cb - ca) / max_panel_width - 1e-9)));
      for (int i = 0; i < n; ++i) add_panel(s, ca + (cb - ca) * i / n, i + 1 == n ? cb : ca + (cb - ca) * (i + 1) / n);
    }
  }

  auto cmp = [&](std::size_t x, std::size_t y) { return panels[x].error < panels[y].error; };
  std::priority_queue<std::size_t, std::vector<std::size_t>, decltype(cmp)> queue(cmp);
  double err = 0.0, l1 = 0.0;
  for (std::size_t i = 0; i < panels.size(); ++i) {
    queue.push(i);
    err += panels[i].error;
    l1 += panels[i].l1;
  }
  // Integrands are built from k and shifts of the size of the range, so structure
  // narrower than a few hundred ulps of that size is rounding noise: such panels
  // keep their error estimate but are no longer refined.
  const double min_width = 256.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(lo), std::abs(hi));
  while (err > config.rel_tol * l1) {
    if (queue.empty()) break;
    if (panels.size() >= config.max_panels) {
      throw NonConvergence("quadrature exhausted " + std::to_string(config.max_panels) + " panels (error " +
                           detail::fmt_g(err) + ", target " + detail::fmt_g(config.rel_tol * l1) + ")");
    }
    const std::size_t i = queue.top();
    queue.pop();
    const Panel old = panels[i];
    const double mid = 0.5 * (old.a + old.b);
    if (old.b - old.a < min_width || !(mid > old.a && mid < old.b)) {
      err -= old.error;
      continue;
    }
    Panel left{old.segment, old.a, mid, {}, 0.0, 0.0};
    Panel right{old.segment, mid, old.b, {}, 0.0, 0.0};
    gk15([&](double x) { return eval(old.segment, x); }, left);
    gk15([&](double x) { return eval(old.segment, x); }, right);
    panels[i] = left;
    panels.push_back(right);
    err += left.error + right.error - old.error;
    l1 += left.l1 + right.l1 - old.l1;
    queue.push(i);
    queue.push(panels.size() - 1);
  }

  std::sort(panels.begin(), panels.end(), [](const Panel& x, const Panel& y) {
    return x.segment != y.segment ? x.segment < y.segment : x.a < y.a;
  });
  QuadResult r;
  for (const Panel& p : panels) {
    r.value += p.value;
    r.error_estimate += p.error;
    r.l1_norm += p.l1;
  }
  r.panels = panels.size();
  return r;
}

OracleResult oracle_inverse_velocity(const Packet& packet, const Barrier& barrier, const QuadratureConfig& config) {
  config.validate(packet);
  barrier.validate();
  const Window w = make_window(packet, config);
  const Kernel inv{config.epsilon};
  const double m = barrier.mass;
  auto f = [&](double k) -> cplx {
    return f_abs_sq(k - packet.k0, packet) * m * inv(k) / (2.0 * std::numbers::pi);
  };
  return finish(integrate_window(f, w, packet, config), tail_correction([m](double) { return m; }, packet, w, config), "inverse velocity");
}

OracleResult oracle_tunneling_time(const Packet& packet, const Barrier& barrier, const QuadratureConfig& config) {
  config.validate(packet);
  barrier.validate();
  const Window w = make_window(packet, config);
  const Kernel inv{config.epsilon};
  auto f = [&](double k) -> cplx {
    return f_abs_sq(k - packet.k0, packet) * k_times_phase_time(std::abs(k), barrier) * inv(k) /
           (2.0 * std::numbers::pi);
  };
  auto k_tau = [&](double k) { return k_times_phase_time(k, barrier); };
  return finish(integrate_window(f, w, packet, config), tail_correction(k_tau, packet, w, config), "tunneling time");
}

OracleResult oracle_delay_B(const Packet& packet, const Barrier& barrier, const QuadratureConfig& config) {
  config.validate(packet);
  barrier.validate();
  // This integrand carries no 1/q^2 tail correction, so it gets a wider window;
  // its decay is fast enough (about 1/k^5) that four times the width is cheap.
  QuadratureConfig wide = config;
  wide.window_half_width = 4.0 * config.window(packet);
  const Window w = make_window(packet, wide);
  const Kernel inv{config.epsilon};
  const double a = barrier.width;
  const double k0 = packet.k0;
  const cplx pre = cplx{0.0, 0.5} * barrier.mass / (2.0 * std::numbers::pi);
  auto f = [&](double k) -> cplx {
    const ScatteringData d = amplitudes(k, barrier);
    const cplx cross = f_star(k - k0, packet, a) * f_star_derivative(k + k0, packet, a) -
                       f_star(k + k0, packet, a) * f_star_derivative(k - k0, packet, a);
    // F+ + F- = 2 R e^{-ika}; R keeps full relative precision for a faint barrier
    return pre * inv(k) * 2.0 * d.R * std::exp(cplx{0.0, -k * a}) * cross;
  };
  // R decays like 1/k^2, so the tail outside the window is negligible.
  return finish(integrate_window(f, w, packet, config), 0.0, "delay B");
}

OracleResult run_oracle(OracleKind kind, const Packet& packet, const Barrier& barrier, const QuadratureConfig& config) {
  switch (kind) {
    case OracleKind::inverse_velocity:
      return oracle_inverse_velocity(packet, barrier, config);
    case OracleKind::tunneling_time:
      return oracle_tunneling_time(packet, barrier, config);
    case OracleKind::delay_B:
      return oracle_delay_B(packet, barrier, config);
  }
  throw DomainError("unknown oracle");
}

}  // namespace tunneltime
