#include "cli.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "CLI11.hpp"
#include "json.hpp"
#include "tunneltime/closedform.hpp"
#include "tunneltime/errors.hpp"
#include "tunneltime/phasetime.hpp"
#include "tunneltime/propagator.hpp"
#include "tunneltime/quadrature.hpp"
#include "tunneltime/resonances.hpp"

namespace tunneltime::cli {
namespace {

using json = nlohmann::ordered_json;

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// Values as read from the config file or from flags; unset means "not given".
struct Layer {
  std::optional<double> a, mass, two_m_v, height;
  std::optional<double> k0_min, k0_max, k0_step;
  std::vector<double> l0, k0;
  std::optional<std::string> out;
  std::optional<double> rel_tol, window, epsilon;
  std::optional<double> re_min, re_max, im_min, im_max;
  std::optional<double> detector_x;
  std::optional<int> refine;
};

struct Settings {
  std::string command;
  std::string which;
  Barrier barrier;
  double k0_min = 0.01, k0_max = 1.5, k0_step = 0.01;
  std::vector<double> l0;
  std::vector<double> k0;
  std::string out;
  QuadratureConfig quad;
  SearchRect rect;
  double detector_x = 0.0;
  int refine = 1;
};

std::vector<double> number_list(const json& v, const char* key) {
  std::vector<double> r;
  if (v.is_number()) {
    r.push_back(v.get<double>());
  } else if (v.is_array()) {
    for (const auto& x : v) {
      if (!x.is_number()) throw ConfigError(std::string("config key '") + key + "' must hold numbers");
      r.push_back(x.get<double>());
    }
  } else {
    throw ConfigError(std::string("config key '") + key + "' must be a number or a list of numbers");
  }
  return r;
}

Layer read_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file " + path);
  json j;
  try {
    j = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ConfigError("config file " + path + " is not valid JSON: " + e.what());
  }
  if (!j.is_object()) throw ConfigError("config file must hold a JSON object");

  Layer c;
  auto num = [&](const std::string& key, const json& v) {
    if (!v.is_number()) throw ConfigError("config key '" + key + "' must be a number");
    return v.get<double>();
  };
  for (const auto& [key, v] : j.items()) {
    if (key == "a") c.a = num(key, v);
    else if (key == "mass") c.mass = num(key, v);
    else if (key == "two_m_v") c.two_m_v = num(key, v);
    else if (key == "height") c.height = num(key, v);
    else if (key == "k0_min") c.k0_min = num(key, v);
    else if (key == "k0_max") c.k0_max = num(key, v);
    else if (key == "k0_step") c.k0_step = num(key, v);
    else if (key == "l0") c.l0 = number_list(v, "l0");
    else if (key == "k0") c.k0 = number_list(v, "k0");
    else if (key == "rel_tol") c.rel_tol = num(key, v);
    else if (key == "window") c.window = num(key, v);
    else if (key == "epsilon") c.epsilon = num(key, v);
    else if (key == "re_min") c.re_min = num(key, v);
    else if (key == "re_max") c.re_max = num(key, v);
    else if (key == "im_min") c.im_min = num(key, v);
    else if (key == "im_max") c.im_max = num(key, v);
    else if (key == "detector_x") c.detector_x = num(key, v);
    else if (key == "refine") c.refine = static_cast<int>(num(key, v));
    else if (key == "out") {
      if (!v.is_string()) throw ConfigError("config key 'out' must be a string");
      c.out = v.get<std::string>();
    } else {
      throw ConfigError("unknown config key '" + key + "'");
    }
  }
  return c;
}

template <class T>
std::optional<T> pick(const std::optional<T>& flag, const std::optional<T>& file) {
  return flag ? flag : file;
}

// Flags override the file. The barrier height may be given as V (height) or as 2mV
// (two_m_v); a flag of either kind beats both file keys, and at the same level
// height beats two_m_v. Default 2mV = 1.
Settings resolve(const std::string& command, const Layer& flags, const Layer& file) {
  Settings s;
  s.command = command;
  const double mass = pick(flags.mass, file.mass).value_or(1.0);
  const double a = pick(flags.a, file.a).value_or(15.0);
  std::optional<double> height;
  if (flags.height) height = flags.height;
  else if (flags.two_m_v) height = *flags.two_m_v / (2.0 * mass);
  else if (file.height) height = file.height;
  else if (file.two_m_v) height = *file.two_m_v / (2.0 * mass);
  s.barrier = Barrier{height.value_or(1.0 / (2.0 * mass)), a, mass};

  s.k0_min = pick(flags.k0_min, file.k0_min).value_or(0.01);
  s.k0_max = pick(flags.k0_max, file.k0_max).value_or(1.5);
  s.k0_step = pick(flags.k0_step, file.k0_step).value_or(0.01);

  s.l0 = !flags.l0.empty() ? flags.l0 : file.l0;
  if (s.l0.empty()) {
    if (command == "oracle-compare" || command == "propagate") s.l0 = {150.0};
    else s.l0 = {150.0, 300.0};
  }
  std::sort(s.l0.begin(), s.l0.end());
  s.l0.erase(std::unique(s.l0.begin(), s.l0.end()), s.l0.end());

  s.k0 = !flags.k0.empty() ? flags.k0 : file.k0;
  if (s.k0.empty()) {
    if (command == "oracle-compare") s.k0 = {0.3, 0.7, 1.1};
    else if (command == "propagate") s.k0 = {0.5, 1.1};
  }
  std::sort(s.k0.begin(), s.k0.end());

  s.out = pick(flags.out, file.out).value_or("");
  if (auto v = pick(flags.rel_tol, file.rel_tol)) s.quad.rel_tol = *v;
  if (auto v = pick(flags.window, file.window)) s.quad.window_half_width = *v;
  if (auto v = pick(flags.epsilon, file.epsilon)) s.quad.epsilon = *v;
  if (auto v = pick(flags.re_min, file.re_min)) s.rect.re_min = *v;
  if (auto v = pick(flags.re_max, file.re_max)) s.rect.re_max = *v;
  if (auto v = pick(flags.im_min, file.im_min)) s.rect.im_min = *v;
  if (auto v = pick(flags.im_max, file.im_max)) s.rect.im_max = *v;
  s.detector_x = pick(flags.detector_x, file.detector_x).value_or(0.0);
  s.refine = pick(flags.refine, file.refine).value_or(1);

  for (double L : s.l0)
    if (!(L > 0.0)) throw ConfigError("every l0 must be > 0");
  if (!(s.quad.rel_tol > 0.0 && s.quad.rel_tol <= 1e-2)) throw ConfigError("rel_tol must lie in (0, 1e-2]");
  if (s.quad.window_half_width < 0.0) throw ConfigError("window must be >= 0");
  if (s.quad.epsilon < 0.0) throw ConfigError("epsilon must be >= 0");
  if (s.refine < 1) throw ConfigError("refine must be >= 1");
  return s;
}

std::vector<double> k0_grid(const Settings& s) {
  if (!(s.k0_step > 0.0) || !(s.k0_max >= s.k0_min) || !(s.k0_min > 0.0)) {
    throw ConfigError("empty k0 range: need 0 < k0_min <= k0_max and k0_step > 0");
  }
  const auto n = static_cast<long>(std::floor((s.k0_max - s.k0_min) / s.k0_step + 1e-9)) + 1;
  std::vector<double> ks;
  for (long i = 0; i < n; ++i) ks.push_back(s.k0_min + static_cast<double>(i) * s.k0_step);
  return ks;
}

std::string join_numbers(const std::vector<double>& v) {
  std::string r;
  for (std::size_t i = 0; i < v.size(); ++i) r += (i ? ";" : "") + format_number(v[i]);
  return r;
}

std::string csv_preamble(const Settings& s, const std::string& extra) {
  std::string line = "# units: natural (hbar = 1); command=" + s.command;
  if (!s.which.empty()) line += " which=" + s.which;
  line += " a=" + format_number(s.barrier.width) + " mass=" + format_number(s.barrier.mass) +
          " two_m_v=" + format_number(s.barrier.two_m_v()) + " height=" + format_number(s.barrier.height) +
          " l0=" + join_numbers(s.l0) + extra;
  return line + "\n";
}

std::string csv_row(std::initializer_list<double> values) {
  std::string line;
  bool first = true;
  for (double v : values) {
    if (!first) line += ',';
    line += format_number(v);
    first = false;
  }
  return line + "\n";
}

json parameters(const Settings& s) {
  return json{{"a", s.barrier.width},     {"mass", s.barrier.mass}, {"two_m_v", s.barrier.two_m_v()},
              {"height", s.barrier.height}, {"l0", s.l0},            {"k0", s.k0}};
}

void emit(const Settings& s, const std::string& text, std::ostream& out) {
  if (s.out.empty()) {
    out << text;
    return;
  }
  std::ofstream f(s.out, std::ios::binary);
  if (!f) throw ConfigError("cannot write " + s.out);
  f << text;
}

int cmd_sweep(const Settings& s, std::ostream& out) {
  const auto ks = k0_grid(s);
  std::string text = csv_preamble(s, " k0_min=" + format_number(s.k0_min) + " k0_max=" + format_number(s.k0_max) +
                                         " k0_step=" + format_number(s.k0_step));
  text += "k0,L0,a,m,two_mV,tau_ph,t_tunnel,t_outside,t_age,t_age0,dtau_A,dtau_B,bp_tunnel_term,bp_outside_term,"
          "valid_ratio\n";
  for (double k0 : ks) {
    for (double L0 : s.l0) {
      const TimeBudget b = age_difference(Packet{k0, L0}, s.barrier);
      text += csv_row({k0, L0, s.barrier.width, s.barrier.mass, s.barrier.two_m_v(), b.tau_ph, b.t_tunnel, b.t_outside,
                       b.t_age, b.t0, b.dtau_A, b.dtau_B, b.bp_tunnel_term, b.bp_outside_term, b.validity.ratio});
    }
  }
  emit(s, text, out);
  return ok;
}

int cmd_figure(const Settings& s, std::ostream& out) {
  const auto ks = k0_grid(s);
  const std::string range = " k0_min=" + format_number(s.k0_min) + " k0_max=" + format_number(s.k0_max) +
                            " k0_step=" + format_number(s.k0_step);
  std::string text;
  if (s.which == "fig3") {
    text = csv_preamble(s, range) + "k0";
    for (double L0 : s.l0) text += ",t_tunnel_L" + format_number(L0);
    text += "\n";
    for (double k0 : ks) {
      text += format_number(k0);
      for (double L0 : s.l0) text += "," + format_number(tunneling_time(Packet{k0, L0}, s.barrier));
      text += "\n";
    }
  } else if (s.which == "fig4") {
    const double L0 = s.l0.front();
    text = csv_preamble(s, range + " fig4_l0=" + format_number(L0)) + "k0,t_age,t_age0\n";
    for (double k0 : ks) {
      const TimeBudget b = age_difference(Packet{k0, L0}, s.barrier);
      text += csv_row({k0, b.t_age, b.t0});
    }
  } else {
    throw ConfigError("figure must be fig3 or fig4, got '" + s.which + "'");
  }
  emit(s, text, out);
  return ok;
}

int cmd_oracle_compare(const Settings& s, std::ostream& out) {
  if (s.k0.empty()) throw ConfigError("no k0 values given");
  json rows = json::array();
  bool all_pass = true;
  // gaps[quantity][k0 index] per L0, for the convergence ratios.
  std::vector<std::vector<std::vector<double>>> gaps(3, std::vector<std::vector<double>>(s.k0.size()));
  const char* names[] = {"v_inv", "t_tunnel", "dtau_B"};
  for (double L0 : s.l0) {
    for (std::size_t i = 0; i < s.k0.size(); ++i) {
      const Packet p{s.k0[i], L0};
      const TimeBudget b = age_difference(p, s.barrier);
      const double m = s.barrier.mass;
      const double closed[] = {b.v_inv, b.t_tunnel, b.dtau_B};
      const double tol[] = {1e-3 * std::abs(b.v_inv), 0.05 * b.tau_ph, 0.05 * m / (p.k0 * p.k0)};
      const OracleKind kinds[] = {OracleKind::inverse_velocity, OracleKind::tunneling_time, OracleKind::delay_B};
      json row{{"k0", p.k0}, {"L0", L0}, {"validity_ratio", b.validity.ratio}, {"valid", b.validity.valid}};
      row["validity_warning"] = b.warning ? json(b.warning->message) : json(nullptr);
      json comps = json::array();
      for (int q = 0; q < 3; ++q) {
        const OracleResult o = run_oracle(kinds[q], p, s.barrier, s.quad);
        const double gap = std::abs(closed[q] - o.value);
        const bool pass = gap <= tol[q];
        all_pass = all_pass && pass;
        gaps[q][i].push_back(gap);
        comps.push_back(json{{"quantity", names[q]},
                             {"closed", closed[q]},
                             {"oracle", o.value},
                             {"oracle_imag", o.imag},
                             {"oracle_error_estimate", o.error_estimate},
                             {"gap", gap},
                             {"tolerance", tol[q]},
                             {"pass", pass}});
      }
      row["comparisons"] = comps;
      rows.push_back(row);
    }
  }
  json ratios = json::array();
  for (std::size_t li = 0; li + 1 < s.l0.size(); ++li) {
    for (std::size_t i = 0; i < s.k0.size(); ++i) {
      for (int q = 0; q < 3; ++q) {
        const double r = gaps[q][i][li + 1] / gaps[q][i][li];
        ratios.push_back(json{{"k0", s.k0[i]},
                              {"quantity", names[q]},
                              {"L0_from", s.l0[li]},
                              {"L0_to", s.l0[li + 1]},
                              {"gap_ratio", r},
                              {"in_range", r >= 0.3 && r <= 0.7}});
      }
    }
  }
  json report{{"units", "natural (hbar = 1)"},
              {"parameters", parameters(s)},
              {"quadrature",
               {{"rel_tol", s.quad.rel_tol}, {"window_half_width", s.quad.window_half_width}, {"epsilon", s.quad.epsilon}}},
              {"rows", rows},
              {"gap_ratios", ratios},
              {"all_pass", all_pass}};
  emit(s, report.dump(2) + "\n", out);
  return all_pass ? ok : verification_failure;
}

int cmd_resonances(const Settings& s, std::ostream& out) {
  std::vector<double> samples;
  const double k_lo = 0.05, k_hi = std::max(s.rect.re_max, 0.1);
  for (int i = 0; i < 100; ++i) samples.push_back(k_lo + (k_hi - k_lo) * i / 99.0);
  const ResonanceDecomposition dec = decompose(s.barrier, s.rect, samples);
  const DecompositionCheck check = validate_decomposition(dec);

  json poles = json::array();
  for (const auto& p : dec.poles) {
    poles.push_back(json{{"parity", to_string(p.parity)},
                         {"k_re", p.k_pole.real()},
                         {"k_im", p.k_pole.imag()},
                         {"E_R", p.E_R},
                         {"Gamma", p.Gamma},
                         {"lifetime", p.lifetime},
                         {"residual", p.residual},
                         {"resonance", p.resonance}});
  }
  json curve = json::array();
  for (double k0 : k0_grid(s)) {
    const double E0 = k0 * k0 / (2.0 * s.barrier.mass);
    curve.push_back(json{{"k0", k0},
                         {"E0", E0},
                         {"lorentzian_delay", lorentzian_delay(E0, dec)},
                         {"logderiv_delay", resonance_delay_logderiv(k0, s.barrier)},
                         {"remainder_delay", remainder_delay(k0, dec)}});
  }
  json report{{"units", "natural (hbar = 1)"},
              {"parameters", parameters(s)},
              {"rect", {{"re_min", s.rect.re_min}, {"re_max", s.rect.re_max}, {"im_min", s.rect.im_min}, {"im_max", s.rect.im_max}}},
              {"winding", {{"plus", winding_count(s.barrier, s.rect, Parity::plus)},
                           {"minus", winding_count(s.barrier, s.rect, Parity::minus)}}},
              {"poles", poles},
              {"remainder", {{"samples", dec.remainder_phase_samples.size()},
                             {"max_modulus_error", check.max_modulus_error},
                             {"max_pole_residual", check.max_pole_residual},
                             {"ok", check.ok}}},
              {"lorentzian", curve}};
  emit(s, report.dump(2) + "\n", out);
  return check.ok ? ok : verification_failure;
}

int cmd_propagate(const Settings& s, std::ostream& out, std::ostream& err) {
  if (s.k0.empty()) throw ConfigError("no k0 values given");
  const double L0 = s.l0.front();
  std::string text = csv_preamble(s, " propagate_l0=" + format_number(L0) + " detector_x=" +
                                         (s.detector_x > 0.0 ? format_number(s.detector_x) : std::string("a/2+L0/10")) +
                                         " refine=" + std::to_string(s.refine));
  text += "k0,empirical_delay,closed_form_delay,transmitted_fraction\n";
  json runs = json::array();
  int starved = 0;
  for (double k0 : s.k0) {
    const Packet p{k0, L0};
    try {
      const DelayMeasurement d = measure_delay(p, s.barrier, s.detector_x, s.refine);
      const TimeBudget b = age_difference(p, s.barrier);
      text += csv_row({k0, d.delay, b.dtau_A + b.dtau_B, d.with_barrier.transmitted_fraction});
      runs.push_back(json{{"k0", k0},
                          {"dx", d.grid.dx},
                          {"dt", d.grid.dt},
                          {"x_min", d.grid.x_min},
                          {"x_max", d.grid.x_max},
                          {"detector_x", d.grid.detector_x},
                          {"t_max", d.grid.t_max},
                          {"n_steps", d.grid.n_steps},
                          {"k_max", d.grid.k_max},
                          {"norm_drift_barrier", d.with_barrier.norm_drift},
                          {"norm_drift_free", d.free.norm_drift},
                          {"mean_arrival_barrier", d.with_barrier.mean_arrival},
                          {"mean_arrival_free", d.free.mean_arrival}});
    } catch (const InsufficientFlux& e) {
      ++starved;
      err << "k0 = " << format_number(k0) << ": " << e.what() << "\n";
    }
  }
  if (starved == static_cast<int>(s.k0.size())) throw InsufficientFlux("no requested k0 transmits enough flux", 0.0);
  emit(s, text, out);
  if (!s.out.empty()) {
    std::ofstream f(s.out + ".grid.json", std::ios::binary);
    if (!f) throw ConfigError("cannot write " + s.out + ".grid.json");
    f << json{{"units", "natural (hbar = 1)"}, {"parameters", parameters(s)}, {"runs", runs}}.dump(2) << "\n";
  }
  return ok;
}

void add_common(CLI::App* sub, Layer& f, std::string& config_path) {
  auto opt = [&](const char* name, std::optional<double>& target, const char* help) {
    sub->add_option_function<double>(name, [&target](const double& v) { target = v; }, help);
  };
  sub->add_option("--config", config_path, "JSON config file; flags override its values");
  opt("--a", f.a, "barrier width a");
  opt("--mass", f.mass, "particle mass m");
  opt("--two-m-v", f.two_m_v, "barrier height given as 2mV");
  opt("--height", f.height, "barrier height V (wins over --two-m-v)");
  opt("--k0-min", f.k0_min, "first k0 of the sweep");
  opt("--k0-max", f.k0_max, "last k0 of the sweep (inclusive)");
  opt("--k0-step", f.k0_step, "k0 step");
  sub->add_option("--l0", f.l0, "packet width L0 (repeatable)");
  sub->add_option_function<std::string>("--out", [&f](const std::string& v) { f.out = v; }, "output file (default stdout)");
  sub->add_flag("--seedless", "accepted for compatibility; every command is deterministic");
}

}  // namespace

std::string format_number(double x) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", x);
  return buf;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Tunnelling times of a square barrier: closed forms, quadrature oracle, poles, propagation"};
  app.require_subcommand(1);
  Layer flags;
  std::string config_path;
  std::string which;

  auto* sweep = app.add_subcommand("sweep", "time budget over a k0 range and a list of L0");
  add_common(sweep, flags, config_path);
  auto* figure = app.add_subcommand("figure", "figure data: fig3 (t_tunnel per L0) or fig4 (t_age and t_age0)");
  add_common(figure, flags, config_path);
  figure->add_option("which", which, "fig3 or fig4")->required();
  auto* oracle = app.add_subcommand("oracle-compare", "closed forms against direct quadrature");
  add_common(oracle, flags, config_path);
  auto* res = app.add_subcommand("resonances", "poles of F+- and the Lorentzian delay");
  add_common(res, flags, config_path);
  auto* prop = app.add_subcommand("propagate", "time-domain delay measurement");
  add_common(prop, flags, config_path);

  for (auto* sub : {oracle, prop}) sub->add_option("--k0", flags.k0, "central wavenumber (repeatable)");
  auto dopt = [&](CLI::App* sub, const char* name, std::optional<double>& target, const char* help) {
    sub->add_option_function<double>(name, [&target](const double& v) { target = v; }, help);
  };
  dopt(oracle, "--rel-tol", flags.rel_tol, "quadrature relative tolerance");
  dopt(oracle, "--window", flags.window, "half-width of the k window (default 400 pi/L0)");
  dopt(oracle, "--epsilon", flags.epsilon, "use k/(k^2+eps^2) instead of the principal value");
  dopt(res, "--re-min", flags.re_min, "search rectangle, smallest Re k");
  dopt(res, "--re-max", flags.re_max, "search rectangle, largest Re k");
  dopt(res, "--im-min", flags.im_min, "search rectangle, smallest Im k");
  dopt(res, "--im-max", flags.im_max, "search rectangle, largest Im k");
  dopt(prop, "--detector-x", flags.detector_x, "detector position (default a/2 + L0/10)");
  prop->add_option_function<int>("--refine", [&flags](const int& v) { flags.refine = v; }, "divide dx by this factor");

  try {
    std::vector<std::string> reversed(args.rbegin(), args.rend());
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return ok;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return ok;
  } catch (const CLI::ParseError& e) {
    err << "error: " << e.what() << "\n";
    return config_error;
  }

  CLI::App* chosen = app.get_subcommands().front();
  try {
    const Layer file = config_path.empty() ? Layer{} : read_config(config_path);
    Settings s = resolve(chosen->get_name(), flags, file);
    s.which = which;
    s.barrier.validate();
    if (chosen == sweep) return cmd_sweep(s, out);
    if (chosen == figure) return cmd_figure(s, out);
    if (chosen == oracle) return cmd_oracle_compare(s, out);
    if (chosen == res) return cmd_resonances(s, out);
    return cmd_propagate(s, out, err);
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << "\n";
    return config_error;
  } catch (const CountMismatch& e) {
    err << "verification failure: " << e.what() << "\n";
    return verification_failure;
  } catch (const Error& e) {
    err << "error: " << e.what() << "\n";
    return domain_error;
  }
}

}  // namespace tunneltime::cli
