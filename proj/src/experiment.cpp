#include "nlmp/experiment.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <set>
#include <sstream>
#include <thread>

#include <json.hpp>

#include "nlmp/bubble.hpp"
#include "nlmp/system.hpp"

namespace nlmp::cli {

namespace {

using Json = nlohmann::ordered_json;
using KV = std::map<std::string, std::string>;

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r\n");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r\n");
  return s.substr(b, e - b + 1);
}

double to_double(const std::string& key, const std::string& v) {
  try {
    std::size_t pos = 0;
    const double x = std::stod(v, &pos);
    if (pos != v.size()) throw std::invalid_argument("");
    return x;
  } catch (...) {
    throw InvalidConfigError("config: key '" + key + "' expects a number, got '" + v + "'");
  }
}

int to_int(const std::string& key, const std::string& v) {
  const double x = to_double(key, v);
  if (x != std::floor(x)) throw InvalidConfigError("config: key '" + key + "' expects an integer");
  return static_cast<int>(x);
}

bool to_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "1" || v == "yes") return true;
  if (v == "false" || v == "0" || v == "no") return false;
  throw InvalidConfigError("config: key '" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<double> to_double_list(const std::string& key, const std::string& v) {
  std::vector<double> out;
  std::stringstream ss(v);
  std::string tok;
  while (std::getline(ss, tok, ',')) out.push_back(to_double(key, trim(tok)));
  if (out.empty()) throw InvalidConfigError("config: key '" + key + "' expects a list");
  return out;
}

std::vector<int> to_int_list(const std::string& key, const std::string& v) {
  std::vector<int> out;
  for (double x : to_double_list(key, v)) {
    if (x != std::floor(x)) throw InvalidConfigError("config: key '" + key + "' expects integers");
    out.push_back(static_cast<int>(x));
  }
  return out;
}

struct Args {
  std::string subcommand;
  KV kv;
  std::string out_path;
};

Args parse_args(const std::vector<std::string>& argv) {
  if (argv.empty()) throw InvalidConfigError("usage: nlmp <subcommand> [--key value ...]");
  Args a;
  a.subcommand = argv[0];
  KV flags;
  std::string config_path;
  for (std::size_t i = 1; i < argv.size(); ++i) {
    const std::string& s = argv[i];
    if (s.rfind("--", 0) != 0) throw InvalidConfigError("expected --key, got '" + s + "'");
    if (i + 1 >= argv.size()) throw InvalidConfigError("flag '" + s + "' is missing a value");
    const std::string key = s.substr(2);
    const std::string val = argv[++i];
    if (key == "config")
      config_path = val;
    else if (key == "out")
      a.out_path = val;
    else
      flags[key] = val;
  }
  if (!config_path.empty()) a.kv = parse_config_file(config_path);
  for (const auto& [k, v] : flags) a.kv[k] = v;  // flags win
  if (a.kv.count("out")) {
    if (a.out_path.empty()) a.out_path = a.kv["out"];
    a.kv.erase("out");
  }
  return a;
}

void reject_unknown_keys(const Args& a, const std::set<std::string>& allowed) {
  for (const auto& [k, _] : a.kv)
    if (!allowed.count(k))
      throw InvalidConfigError("config: unknown key '" + k + "' for subcommand '" +
                               a.subcommand + "'");
}

class Getter {
 public:
  explicit Getter(const KV& kv) : kv_(kv) {}
  double num(const std::string& key, double dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : to_double(key, it->second);
  }
  int integer(const std::string& key, int dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : to_int(key, it->second);
  }
  bool flag(const std::string& key, bool dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : to_bool(key, it->second);
  }
  std::string str(const std::string& key, const std::string& dflt) const {
    const auto it = kv_.find(key);
    return it == kv_.end() ? dflt : it->second;
  }
  std::vector<double> num_list(const std::string& key, const std::string& dflt) const {
    return to_double_list(key, str(key, dflt));
  }
  std::vector<int> int_list(const std::string& key, const std::string& dflt) const {
    return to_int_list(key, str(key, dflt));
  }
  bool has(const std::string& key) const { return kv_.count(key) > 0; }

 private:
  const KV& kv_;
};

int worker_count(const Getter& g) {
  int w = static_cast<int>(std::thread::hardware_concurrency());
  if (w < 1) w = 1;
  if (const char* env = std::getenv("NLMP_WORKERS")) w = std::max(1, std::atoi(env));
  w = g.integer("workers", w);
  if (w < 1) throw InvalidConfigError("config: workers must be >= 1");
  return w;
}

void emit(const std::string& text, const std::string& out_path, std::ostream& out) {
  if (out_path.empty()) {
    out << text;
    return;
  }
  std::ofstream f(out_path, std::ios::binary);
  if (!f) throw InvalidConfigError("cannot open output path '" + out_path + "'");
  f << text;
}

std::string csv(const std::vector<std::string>& header,
                const std::vector<std::vector<std::string>>& rows) {
  std::ostringstream ss;
  for (std::size_t i = 0; i < header.size(); ++i) ss << (i ? "," : "") << header[i];
  ss << "\n";
  for (const auto& row : rows) {
    for (std::size_t i = 0; i < row.size(); ++i) ss << (i ? "," : "") << row[i];
    ss << "\n";
  }
  return ss.str();
}

std::string b2s(bool b) { return b ? "true" : "false"; }

SolveConfig make_solve_config(const Getter& g) {
  SolveConfig cfg;
  const auto lengths = g.num_list("lengths", "1,1");
  const auto modes = g.int_list("modes", "32,32");
  cfg.problem.basis = build_box_basis(lengths, modes);
  cfg.problem.p = g.num("p", 3.0);
  cfg.problem.m = g.integer("m", 1);
  double gamma = g.num("gamma", 0.0);
  const std::string unit = g.str("gamma_unit", "absolute");
  if (unit == "threshold")
    gamma *= cfg.problem.threshold();
  else if (unit != "absolute")
    throw InvalidConfigError("config: gamma_unit must be 'absolute' or 'threshold'");
  cfg.problem.gamma = gamma;
  cfg.grad_tol = g.num("grad_tol", 1e-8);
  cfg.max_iters = g.integer("max_iters", 10000);
  cfg.seed_amplitude = g.num("seed_amplitude", 1.0);
  cfg.allow_critical = g.flag("allow_critical", false);
  cfg.problem.validate();
  if (cfg.grad_tol <= 0.0) throw InvalidConfigError("config: grad_tol must be positive");
  if (cfg.max_iters < 1) throw InvalidConfigError("config: max_iters must be >= 1");
  g.integer("rng_seed", 0);  // accepted for forward compatibility; runs are deterministic
  return cfg;
}

const std::set<std::string> kSolveKeys = {
    "lengths", "modes", "p", "m", "gamma", "gamma_unit", "grad_tol", "max_iters",
    "seed_amplitude", "allow_critical", "rng_seed", "workers"};

std::set<std::string> with(std::set<std::string> base, std::initializer_list<const char*> more) {
  for (const char* k : more) base.insert(k);
  return base;
}

// --- subcommands -----------------------------------------------------------

int cmd_eig(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, {"lengths", "modes", "m", "workers", "rng_seed"});
  const Getter g(a.kv);
  const auto basis = build_box_basis(g.num_list("lengths", "1,1"), g.int_list("modes", "32,32"));
  const int m = g.integer("m", 1);
  if (m < 1) throw InvalidConfigError("config: m must be >= 1");
  const double lam1 = basis->lambda1();
  const double thr = basis->navier_first_eigenvalue(m + 1);
  out << "lambda1=" << fmt17(lam1) << " threshold=" << fmt17(thr) << " m=" << m << "\n";
  if (!a.out_path.empty())
    emit(csv({"lambda1", "m", "threshold"}, {{fmt17(lam1), std::to_string(m), fmt17(thr)}}),
         a.out_path, out);
  return 0;
}

Json outcome_json(const SolveOutcome& o, const SolveConfig& cfg, const std::string& method) {
  Json j;
  j["method"] = method;
  j["gamma"] = cfg.problem.gamma;
  j["p"] = cfg.problem.p;
  j["m"] = cfg.problem.m;
  j["threshold"] = cfg.problem.threshold();
  j["converged"] = o.converged;
  j["energy_level"] = o.energy_level;
  j["residual"] = o.residual;
  j["min_interior_value"] = o.min_interior_value;
  j["iterations"] = o.iterations;
  if (o.converged && o.min_interior_value > 0.0) {
    const auto cert = positivity_certificate(o.state, cfg.problem);
    j["positivity_lhs"] = cert.lhs;
    j["positivity_rhs"] = cert.rhs;
    j["positivity_ok"] = cert.ok;
  }
  j["level_trace"] = o.level_trace;
  j["max_amplitude_trace"] = o.max_amplitude_trace;
  j["ipr_trace"] = o.ipr_trace;
  return j;
}

int cmd_solve(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, with(kSolveKeys, {"method", "dt", "flow_steps"}));
  const Getter g(a.kv);
  SolveConfig cfg = make_solve_config(g);
  const std::string method = g.str("method", "nehari");
  SolveOutcome o;
  if (method == "nehari") {
    o = solve_nehari(cfg);
  } else if (method == "path") {
    o = solve_mountain_pass_path(cfg);
  } else if (method == "flow") {
    FlowOptions fo;
    fo.dt = g.num("dt", fo.dt);
    fo.steps_per_segment = g.integer("flow_steps", fo.steps_per_segment);
    o = solve_flow(cfg, fo);
  } else {
    throw InvalidConfigError("config: method must be nehari, path, or flow");
  }
  emit(outcome_json(o, cfg, method).dump(2) + "\n", a.out_path, out);
  return o.converged ? 0 : 3;
}

int cmd_scan_gamma(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, with(kSolveKeys, {"gammas", "gamma_min", "gamma_max", "gamma_count"}));
  const Getter g(a.kv);
  SolveConfig cfg = make_solve_config(g);
  const double scale =
      g.str("gamma_unit", "absolute") == "threshold" ? cfg.problem.threshold() : 1.0;

  std::vector<double> gammas;
  if (g.has("gammas")) {
    for (double x : g.num_list("gammas", "")) gammas.push_back(x * scale);
  } else if (g.has("gamma_count")) {
    const double lo = g.num("gamma_min", 0.1), hi = g.num("gamma_max", 0.9);
    const int n = g.integer("gamma_count", 9);
    if (n < 1) throw InvalidConfigError("config: gamma_count must be >= 1");
    for (int i = 0; i < n; ++i)
      gammas.push_back((lo + (n == 1 ? 0.0 : (hi - lo) * i / (n - 1))) * scale);
  }
  std::sort(gammas.begin(), gammas.end());

  const auto rows = threshold_scan(cfg, gammas, worker_count(g));
  std::vector<std::vector<std::string>> cells;
  for (const auto& r : rows) {
    cells.push_back({fmt17(r.gamma),
                     r.threshold_violation ? "threshold-violation" : b2s(r.converged),
                     fmt17(r.level), fmt17(r.residual), b2s(r.positivity_ok),
                     std::to_string(r.iterations)});
  }
  emit(csv({"gamma", "converged", "level", "residual", "positivity_ok", "iterations"}, cells),
       a.out_path, out);
  return 0;
}

int cmd_bubble_scan(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, {"N", "R", "eps_min", "eps_max", "eps_count", "quantity", "workers",
                          "points_per_decade", "rng_seed"});
  const Getter g(a.kv);
  const auto dims = g.int_list("N", "3,5,7");
  const double R = g.num("R", 0.25);
  const double emin = g.num("eps_min", 1e-4), emax = g.num("eps_max", 1e-2);
  const int ecount = g.integer("eps_count", 9);
  if (!(emin > 0.0) || !(emax > emin) || ecount < 4)
    throw InvalidConfigError("config: need 0 < eps_min < eps_max and eps_count >= 4");
  std::vector<double> eps(ecount);
  for (int i = 0; i < ecount; ++i)
    eps[i] = emin * std::pow(emax / emin, static_cast<double>(i) / (ecount - 1));
  const std::string quantity = g.str("quantity", "all");
  BubbleQuadratureOptions opts;
  opts.points_per_decade = g.integer("points_per_decade", opts.points_per_decade);

  std::vector<std::vector<std::string>> cells;
  for (int N : dims) {
    const auto add = [&](const std::string& name, const PowerFit& f) {
      cells.push_back({std::to_string(N), name, fmt17(f.exponent), fmt17(f.rms_residual),
                       b2s(f.log_preferred)});
    };
    if (quantity == "l2" || quantity == "all") add("l2", bubble_l2_asymptotics(N, R, eps, opts));
    if (quantity == "grad" || quantity == "all")
      add("grad_defect", bubble_grad_defect(N, R, eps, opts));
    if (quantity == "pairing" || quantity == "all")
      add("pairing", nonlocal_pairing_fit(N, R, eps, opts));
    if (quantity != "l2" && quantity != "grad" && quantity != "pairing" && quantity != "all")
      throw InvalidConfigError("config: quantity must be l2, grad, pairing, or all");
  }
  emit(csv({"N", "quantity", "exponent", "fit_residual", "log_preferred"}, cells), a.out_path,
       out);
  return 0;
}

int cmd_level_check(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, {"N", "R", "gamma", "eps_min", "eps_max", "eps_count", "epsilons",
                          "workers", "points_per_decade", "rng_seed"});
  const Getter g(a.kv);
  const auto dims = g.int_list("N", "7");
  const double R = g.num("R", 0.25);
  const double gamma = g.num("gamma", 1.0);
  std::vector<double> eps;
  if (g.has("epsilons")) {
    eps = g.num_list("epsilons", "");
  } else {
    const double emin = g.num("eps_min", 1e-4), emax = g.num("eps_max", 1e-2);
    const int ecount = g.integer("eps_count", 5);
    if (!(emin > 0.0) || !(emax > emin) || ecount < 2)
      throw InvalidConfigError("config: need 0 < eps_min < eps_max and eps_count >= 2");
    for (int i = 0; i < ecount; ++i)
      eps.push_back(emin * std::pow(emax / emin, static_cast<double>(i) / (ecount - 1)));
  }
  std::sort(eps.begin(), eps.end());
  BubbleQuadratureOptions opts;
  opts.points_per_decade = g.integer("points_per_decade", opts.points_per_decade);

  std::vector<std::vector<std::string>> cells;
  for (int N : dims)
    for (double e : eps) {
      const LevelReport rep = level_gap(N, gamma, {N, e, R}, opts);
      cells.push_back({std::to_string(N), fmt17(e), fmt17(rep.SN_eps), fmt17(rep.F_eps),
                       fmt17(rep.t_eps), fmt17(rep.g_at_t), fmt17(rep.c_star),
                       b2s(rep.gap_ok)});
    }
  emit(csv({"N", "epsilon", "SN_eps", "F_eps", "t_eps", "g_at_t", "c_star", "gap_ok"}, cells),
       a.out_path, out);
  return 0;
}

int cmd_window(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, {"N", "N_min", "N_max", "mode", "rng_seed", "workers"});
  const Getter g(a.kv);
  std::vector<int> dims;
  if (g.has("N")) {
    dims = g.int_list("N", "");
  } else {
    const int lo = g.integer("N_min", 3), hi = g.integer("N_max", 10);
    for (int n = lo; n <= hi; ++n) dims.push_back(n);
  }
  const std::string mode = g.str("mode", "both");
  if (mode != "scalar" && mode != "system" && mode != "both")
    throw InvalidConfigError("config: mode must be scalar, system, or both");

  std::vector<std::vector<std::string>> cells;
  for (int N : dims) {
    const auto add = [&](const std::string& name, WindowMode wm) {
      const WindowReport rep = dimension_window(N, wm);
      cells.push_back({std::to_string(N), name, b2s(rep.feasible), fmt17(rep.lo), fmt17(rep.hi)});
      out << "N=" << N << " mode=" << name << " feasible=" << b2s(rep.feasible);
      if (rep.feasible) out << " interval=(" << fmt17(rep.lo) << "," << fmt17(rep.hi) << ")";
      out << "\n";
    };
    if (mode == "scalar" || mode == "both") add("scalar", WindowMode::Scalar);
    if (mode == "system" || mode == "both") add("system", WindowMode::System);
  }
  if (!a.out_path.empty())
    emit(csv({"N", "mode", "feasible", "lo", "hi"}, cells), a.out_path, out);
  return 0;
}

int cmd_system_check(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, kSolveKeys);
  const Getter g(a.kv);
  SolveConfig cfg = make_solve_config(g);
  if (!(cfg.problem.gamma > 0.0))
    throw InvalidConfigError("system-check: gamma must be positive");

  const SolveOutcome scalar = solve_nehari(cfg);
  if (!scalar.converged) return 3;
  const double tol = std::max(1e-6, 10.0 * cfg.grad_tol);
  ProblemConfig pc = cfg.problem;
  pc.nonlinearity = Nonlinearity::PositivePart;
  const EquivalenceReport eq = equivalence_check(scalar.state, pc, tol);
  const SystemSolveOutcome sys = solve_system_mpa(cfg);
  const double rel = std::abs(sys.level - scalar.energy_level) / std::abs(scalar.energy_level);

  emit(csv({"m", "gamma", "scalar_level", "system_level", "level_rel_diff",
            "max_lift_residual", "pass"},
           {{std::to_string(cfg.problem.m), fmt17(cfg.problem.gamma),
             fmt17(scalar.energy_level), fmt17(sys.level), fmt17(rel),
             fmt17(eq.max_residual), b2s(eq.pass)}}),
       a.out_path, out);
  return eq.pass ? 0 : 3;
}

int cmd_flow(const Args& a, std::ostream& out) {
  reject_unknown_keys(a, with(kSolveKeys, {"mode", "dt", "steps"}));
  const Getter g(a.kv);
  SolveConfig cfg = make_solve_config(g);
  const std::string mode = g.str("mode", "seek");
  Json j;
  j["mode"] = mode;
  j["gamma"] = cfg.problem.gamma;
  int rc = 0;
  if (mode == "seek") {
    FlowOptions fo;
    fo.dt = g.num("dt", fo.dt);
    fo.steps_per_segment = g.integer("steps", fo.steps_per_segment);
    const SolveOutcome o = solve_flow(cfg, fo);
    j["converged"] = o.converged;
    j["energy_level"] = o.energy_level;
    j["residual"] = o.residual;
    j["min_interior_value"] = o.min_interior_value;
    j["bisections"] = o.iterations;
    rc = o.converged ? 0 : 3;
  } else if (mode == "evolve") {
    ProblemConfig pc = cfg.problem;
    pc.nonlinearity = Nonlinearity::PositivePart;
    SpectralField u0 = zero_field(pc.basis);
    u0.coeffs[0] = cfg.seed_amplitude;
    const double dt = g.num("dt", 2e-4);
    const int steps = g.integer("steps", 5000);
    const FlowTrajectory traj = evolve_cahn_hilliard(u0, pc, dt, steps);
    j["settled"] = traj.converged;
    j["steps_taken"] = traj.steps_taken;
    j["residual_fourth_order"] = traj.residual_fourth_order;
    j["residual_second_order"] = traj.residual_second_order;
    std::vector<double> energies;
    for (const auto& s : traj.snapshots)
      energies.push_back(0.5 * quadratic_part(s, pc) -
                         nonlinear_part(s, pc) / (pc.p + 1.0));
    j["snapshot_times"] = traj.snapshot_times;
    j["snapshot_energies"] = energies;
  } else {
    throw InvalidConfigError("config: flow mode must be seek or evolve");
  }
  emit(j.dump(2) + "\n", a.out_path, out);
  return rc;
}

}  // namespace

std::string fmt17(double x) {
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", x);
  return buf;
}

std::map<std::string, std::string> parse_config_file(const std::string& path) {
  std::ifstream f(path);
  if (!f) throw InvalidConfigError("cannot open config file '" + path + "'");
  std::map<std::string, std::string> kv;
  std::string line;
  int lineno = 0;
  while (std::getline(f, line)) {
    ++lineno;
    const auto hash = line.find('#');
    if (hash != std::string::npos) line = line.substr(0, hash);
    line = trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw InvalidConfigError("config file " + path + ":" + std::to_string(lineno) +
                               ": expected 'key = value'");
    const std::string key = trim(line.substr(0, eq));
    const std::string val = trim(line.substr(eq + 1));
    if (key.empty() || val.empty())
      throw InvalidConfigError("config file " + path + ":" + std::to_string(lineno) +
                               ": empty key or value");
    kv[key] = val;
  }
  return kv;
}

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  try {
    const Args a = parse_args(args);
    if (a.subcommand == "eig") return cmd_eig(a, out);
    if (a.subcommand == "solve") return cmd_solve(a, out);
    if (a.subcommand == "scan-gamma") return cmd_scan_gamma(a, out);
    if (a.subcommand == "bubble-scan") return cmd_bubble_scan(a, out);
    if (a.subcommand == "level-check") return cmd_level_check(a, out);
    if (a.subcommand == "window") return cmd_window(a, out);
    if (a.subcommand == "system-check") return cmd_system_check(a, out);
    if (a.subcommand == "flow") return cmd_flow(a, out);
    throw InvalidConfigError("unknown subcommand '" + a.subcommand + "'");
  } catch (const InvalidConfigError& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const ThresholdViolation& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  } catch (const QuadratureFailure& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const AsymptoticsNotResolved& e) {
    err << "error: " << e.what() << "\n";
    return 4;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return 2;
  }
}

}  // namespace nlmp::cli
