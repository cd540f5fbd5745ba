#include "nlmp/solve.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>

#include "descent.hpp"

namespace nlmp {

namespace {

ProblemConfig solver_problem(const ProblemConfig& in) {
  ProblemConfig pc = in;
  pc.nonlinearity = Nonlinearity::PositivePart;
  return pc;
}

void check_solvable(const SolveConfig& cfg, const ProblemConfig& pc) {
  pc.validate();
  if (pc.gamma >= pc.threshold())
    throw ThresholdViolation("gamma at or above lambda_1^{m+1}: no positive solution exists");
  if (!pc.subcritical_safe() && !cfg.allow_critical)
    throw InvalidConfigError(
        "exponent p is not subcritical-safe for this dimension; set allow_critical to override");
}

SpectralField make_seed(const SolveConfig& cfg, const ProblemConfig& pc) {
  if (cfg.seed_field) {
    SpectralField s = *cfg.seed_field;
    if (s.basis != pc.basis) throw std::invalid_argument("seed field lives on a different basis");
    return s;
  }
  SpectralField s = zero_field(pc.basis);
  s.coeffs[0] = cfg.seed_amplitude;  // amplitude * phi_1: positive centered bump
  return s;
}

double stop_threshold(const SolveConfig& cfg, double seed_h1) {
  return cfg.grad_tol * std::clamp(seed_h1, 1.0, 10.0);
}

struct GridStats {
  double min_value;
  double max_amplitude;
  double ipr;
};

GridStats grid_stats(const SpectralField& u) {
  const auto vals = u.basis->synthesize_refined(u.coeffs);
  const double w = u.basis->refined_cell_volume();
  double mn = std::numeric_limits<double>::infinity();
  double mx = 0.0, s2 = 0.0, s4 = 0.0;
  for (double v : vals) {
    mn = std::min(mn, v);
    mx = std::max(mx, std::abs(v));
    s2 += v * v;
    s4 += v * v * v * v;
  }
  s2 *= w;
  s4 *= w;
  return {mn, mx, s2 > 0.0 ? s4 / (s2 * s2) : 0.0};
}

double plain_energy(const SpectralField& u, const ProblemConfig& pc) {
  return 0.5 * quadratic_part(u, pc) - nonlinear_part(u, pc) / (pc.p + 1.0);
}

SolveOutcome finish_outcome(SpectralField state, double level, double residual,
                            int iterations, bool converged) {
  SolveOutcome out;
  const GridStats gs = grid_stats(state);
  out.state = std::move(state);
  out.energy_level = level;
  out.residual = residual;
  out.min_interior_value = gs.min_value;
  out.iterations = iterations;
  out.converged = converged;
  return out;
}

}  // namespace

SolveOutcome solve_nehari(const SolveConfig& cfg) {
  const ProblemConfig pc = solver_problem(cfg.problem);
  check_solvable(cfg, pc);
  SpectralField seed = make_seed(cfg, pc);

  detail::RayProblem rp;
  rp.p = pc.p;
  rp.qform = [&pc](const detail::FieldVec& u) { return quadratic_part(u[0], pc); };
  rp.pform = [&pc](const detail::FieldVec& u) { return nonlinear_part(u[0], pc); };
  rp.grad = [&pc](const detail::FieldVec& u) {
    return detail::FieldVec{riesz_gradient(u[0], pc)};
  };

  const double t0 = nehari_scale_and_level(seed, pc).t_star;
  detail::DescentOptions opts;
  opts.max_iters = cfg.max_iters;
  opts.grad_tol_abs = stop_threshold(cfg, t0 * h1_norm(seed));
  opts.step = cfg.step_rule;

  std::vector<double> amps, iprs;
  opts.on_iterate = [&](const detail::FieldVec& u, double, int iter) {
    if (iter % cfg.trace_stride == 0) {
      const GridStats gs = grid_stats(u[0]);
      amps.push_back(gs.max_amplitude);
      iprs.push_back(gs.ipr);
    }
  };

  auto dr = detail::nehari_descent(rp, {seed}, opts);
  SolveOutcome out = finish_outcome(std::move(dr.state[0]), dr.level, dr.residual,
                                    dr.iterations, dr.converged);
  out.level_trace = std::move(dr.level_trace);
  out.max_amplitude_trace = std::move(amps);
  out.ipr_trace = std::move(iprs);
  return out;
}

SolveOutcome solve_mountain_pass_path(const SolveConfig& cfg) {
  const ProblemConfig pc = solver_problem(cfg.problem);
  check_solvable(cfg, pc);
  const SpectralField seed = make_seed(cfg, pc);

  const auto fval = [&pc](const SpectralField& u) { return plain_energy(u, pc); };

  // scale the seed past the zero-energy crossing so the endpoint has F < 0
  const double q0 = quadratic_part(seed, pc);
  const double p0 = nonlinear_part(seed, pc);
  if (!(q0 > 0.0)) throw ThresholdViolation("path endpoint: supercritical-gamma direction");
  if (!(p0 > 0.0)) throw std::invalid_argument("path endpoint: seed has vanishing nonlinear part");
  const double s_zero = std::pow((pc.p + 1.0) * q0 / (2.0 * p0), 1.0 / (pc.p - 1.0));
  const SpectralField u_hat = scaled(seed, 1.25 * s_zero);

  const int np = std::max(cfg.path_points, 5);
  std::vector<SpectralField> path;
  std::vector<double> fcache;
  path.reserve(np);
  for (int i = 0; i < np; ++i) {
    path.push_back(scaled(u_hat, static_cast<double>(i) / (np - 1)));
    fcache.push_back(fval(path.back()));
  }

  // re-space the path points uniformly in H_0^1 arc length; without this the
  // deformed points drift apart and the discrete maximum tunnels through the
  // ridge between samples
  const auto redistribute = [&]() {
    std::vector<double> len(np, 0.0);
    for (int i = 1; i < np; ++i) {
      SpectralField d = path[i];
      axpy(d, -1.0, path[i - 1]);
      len[i] = len[i - 1] + h1_norm(d);
    }
    std::vector<SpectralField> fresh;
    fresh.reserve(np);
    fresh.push_back(path.front());
    int seg = 0;
    for (int j = 1; j < np - 1; ++j) {
      const double target = len.back() * j / (np - 1);
      while (seg + 2 < np && len[seg + 1] < target) ++seg;
      const double span = len[seg + 1] - len[seg];
      const double theta = span > 0.0 ? (target - len[seg]) / span : 0.0;
      SpectralField p = scaled(path[seg], 1.0 - theta);
      axpy(p, theta, path[seg + 1]);
      fresh.push_back(std::move(p));
    }
    fresh.push_back(path.back());
    path = std::move(fresh);
    for (int i = 1; i < np - 1; ++i) fcache[i] = fval(path[i]);
  };

  const double tau = stop_threshold(cfg, nehari_scale_and_level(seed, pc).t_star * h1_norm(seed));

  std::vector<double> amps, iprs, levels;
  double res = 0.0;
  bool converged = false;
  int it = 0;
  int imax = 0;
  const double seg_scale = h1_norm(u_hat) / (np - 1);
  double step_factor = std::min(0.25, cfg.step_rule.initial);
  double prev_max = fcache[static_cast<std::size_t>(
      std::max_element(fcache.begin(), fcache.end()) - fcache.begin())];
  const int sweep_cap = std::min(cfg.max_iters, 150);

  // phase 1: deform the whole string downhill until its maximum settles near
  // the pass; vertex sampling alone cannot certify the saddle, so this only
  // has to rough in the crossing
  for (it = 1; it <= sweep_cap; ++it) {
    for (int i = 1; i < np - 1; ++i) {
      const SpectralField g = riesz_gradient(path[i], pc);
      const double gn = h1_norm(g);
      if (gn == 0.0) continue;
      const double alpha = std::min(step_factor, 0.4 * seg_scale / gn);
      axpy(path[i], -alpha, g);
    }
    redistribute();

    imax = static_cast<int>(std::max_element(fcache.begin(), fcache.end()) - fcache.begin());
    if (imax == 0 || imax == np - 1)
      throw InvalidConfigError("mountain-pass path degenerated: maximum at an endpoint");
    const double fmax = fcache[imax];
    if (fmax > prev_max + 1e-10 * std::abs(prev_max))
      step_factor = std::max(1e-3, 0.5 * step_factor);
    else
      step_factor = std::min(std::min(0.25, cfg.step_rule.initial), 1.05 * step_factor);
    levels.push_back(fmax);
    if (it % cfg.trace_stride == 0) {
      const GridStats gs = grid_stats(path[imax]);
      amps.push_back(gs.max_amplitude);
      iprs.push_back(gs.ipr);
    }
    if (it > 40 && std::abs(fmax - prev_max) < 1e-7 * std::abs(fmax)) {
      prev_max = fmax;
      break;
    }
    prev_max = fmax;
  }

  // phase 2: polish the path maximum onto the critical point by minimizing
  // phi(u) = 1/2 ||g(u)||^2 in the H_0^1 metric, with the Hessian action
  // approximated by a directional difference of the gradient
  SpectralField u = path[imax];
  SpectralField g = riesz_gradient(u, pc);
  double phi = 0.5 * h1_inner(g, g);
  double alpha = 1.0;
  for (; it <= cfg.max_iters; ++it) {
    res = std::sqrt(2.0 * phi);
    if (res < tau) {
      converged = true;
      break;
    }
    const double delta = 1e-7 * (1.0 + h1_norm(u)) / res;
    SpectralField up = u;
    axpy(up, delta, g);
    SpectralField grad_phi = riesz_gradient(up, pc);
    axpy(grad_phi, -1.0, g);
    for (double& c : grad_phi.coeffs) c /= delta;  // ~ H g
    const double gp2 = h1_inner(grad_phi, grad_phi);
    if (gp2 == 0.0) break;

    alpha = std::min(4.0 * alpha, 1e4);
    bool accepted = false;
    const double slack = 8.0 * std::numeric_limits<double>::epsilon() * phi;
    for (int bt = 0; bt <= cfg.step_rule.max_backtracks; ++bt) {
      SpectralField cand = u;
      axpy(cand, -alpha, grad_phi);
      const SpectralField gc = riesz_gradient(cand, pc);
      const double phic = 0.5 * h1_inner(gc, gc);
      if (phic <= phi - cfg.step_rule.sufficient_decrease * alpha * gp2 + slack) {
        u = std::move(cand);
        g = gc;
        phi = phic;
        accepted = true;
        break;
      }
      alpha *= cfg.step_rule.shrink;
    }
    if (!accepted) break;
    levels.push_back(fval(u));
  }

  SolveOutcome out =
      finish_outcome(u, fval(u), res, std::min(it, cfg.max_iters), converged);
  out.level_trace = std::move(levels);
  out.max_amplitude_trace = std::move(amps);
  out.ipr_trace = std::move(iprs);
  return out;
}

double residual_dual_norm(const SpectralField& u, const ProblemConfig& cfg) {
  return h1_norm(riesz_gradient(u, cfg));
}

PositivityCertificate positivity_certificate(const SpectralField& u, const ProblemConfig& cfg) {
  cfg.validate();
  const GridStats gs = grid_stats(u);
  if (gs.min_value < -1e-12 * std::max(1.0, gs.max_amplitude))
    throw std::invalid_argument("positivity_certificate: field has a negative interior minimum");
  const double overlap = u.coeffs[0];  // int u phi_1
  PositivityCertificate cert;
  const double lam1 = cfg.basis->lambda1();
  cert.lhs = lam1 * overlap;
  cert.rhs = cfg.gamma / pow_int(lam1, cfg.m) * overlap;
  cert.ok = cert.lhs > cert.rhs;
  return cert;
}

FlowTrajectory evolve_cahn_hilliard(const SpectralField& u0, const ProblemConfig& cfg,
                                    double dt, int steps, double settle_tol,
                                    int snapshot_stride) {
  cfg.validate();
  if (cfg.m != 1) throw InvalidConfigError("cahn-hilliard flow is defined for m = 1 only");
  if (!(dt > 0.0)) throw InvalidConfigError("cahn-hilliard flow: dt must be positive");
  const auto& lam = cfg.basis->eigenvalues();

  if (snapshot_stride <= 0) snapshot_stride = std::max(1, steps / 100);

  FlowTrajectory traj;
  SpectralField u = u0;
  traj.snapshots.push_back(u);
  traj.snapshot_times.push_back(0.0);

  std::vector<double> denom(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i)
    denom[i] = 1.0 + dt * (lam[i] * lam[i] - cfg.gamma);

  int step = 0;
  for (step = 1; step <= steps; ++step) {
    auto vals = u.basis->synthesize_refined(u.coeffs);
    for (double& v : vals) v = nl_deriv(v, cfg.p, cfg.nonlinearity);
    const auto b = u.basis->analyze_refined(vals);
    double diff2 = 0.0, norm2 = 0.0;
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
      const double next = (u.coeffs[i] + dt * lam[i] * b[i]) / denom[i];
      const double d = next - u.coeffs[i];
      diff2 += d * d;
      u.coeffs[i] = next;
      norm2 += next * next;
    }
    traj.successive_diffs.push_back(std::sqrt(diff2));
    if (!std::isfinite(norm2) || norm2 > 1e16)
      throw UnstableStepError("cahn-hilliard flow: norm blow-up, try a smaller dt");
    if (step % snapshot_stride == 0 || step == steps) {
      traj.snapshots.push_back(u);
      traj.snapshot_times.push_back(step * dt);
    }
    if (std::sqrt(diff2) < settle_tol) {
      traj.converged = true;
      break;
    }
  }
  traj.steps_taken = std::min(step, steps);
  if (traj.snapshot_times.back() != traj.steps_taken * dt) {
    traj.snapshots.push_back(u);
    traj.snapshot_times.push_back(traj.steps_taken * dt);
  }

  // residual under the fourth-order identity and, via (-Delta)^{-1}, the
  // second-order problem
  auto vals = u.basis->synthesize_refined(u.coeffs);
  for (double& v : vals) v = nl_deriv(v, cfg.p, cfg.nonlinearity);
  const auto b = u.basis->analyze_refined(vals);
  double r4 = 0.0;
  for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
    const double r = lam[i] * (lam[i] * u.coeffs[i] - b[i]) - cfg.gamma * u.coeffs[i];
    r4 += r * r;
  }
  traj.residual_fourth_order = std::sqrt(r4);
  traj.residual_second_order = residual_dual_norm(u, cfg);
  return traj;
}

namespace {

enum class FlowFate { Decayed, Grew, Undecided };

struct FlowProbe {
  FlowFate fate = FlowFate::Undecided;
  double end_norm = 0.0;
};

// One flow segment; updates the global best-residual state as it goes.
FlowProbe run_flow_segment(const SpectralField& start, const ProblemConfig& pc,
                           const FlowOptions& opts, double ridge_norm, double tol_abs,
                           SpectralField& best_state, double& best_res) {
  const auto& lam = pc.basis->eigenvalues();
  std::vector<double> denom(lam.size());
  for (std::size_t i = 0; i < lam.size(); ++i)
    denom[i] = 1.0 + opts.dt * (lam[i] * lam[i] - pc.gamma);

  SpectralField u = start;
  FlowProbe probe;
  for (int step = 1; step <= opts.steps_per_segment; ++step) {
    auto vals = u.basis->synthesize_refined(u.coeffs);
    for (double& v : vals) v = nl_deriv(v, pc.p, pc.nonlinearity);
    const auto b = u.basis->analyze_refined(vals);
    double norm2 = 0.0;
    for (std::size_t i = 0; i < u.coeffs.size(); ++i) {
      u.coeffs[i] = (u.coeffs[i] + opts.dt * lam[i] * b[i]) / denom[i];
      norm2 += u.coeffs[i] * u.coeffs[i];
    }
    if (!std::isfinite(norm2) || norm2 > 1e16) {
      probe.fate = FlowFate::Grew;
      return probe;
    }
    if (step % opts.check_stride == 0) {
      const double hn = h1_norm(u);
      const double res = residual_dual_norm(u, pc);
      if (res < best_res) {
        best_res = res;
        best_state = u;
      }
      if (best_res < tol_abs) return probe;  // good enough, fate irrelevant
      if (hn > 3.0 * ridge_norm) {
        probe.fate = FlowFate::Grew;
        return probe;
      }
      if (hn < 0.2 * ridge_norm) {
        probe.fate = FlowFate::Decayed;
        return probe;
      }
    }
  }
  probe.end_norm = h1_norm(u);
  return probe;
}

}  // namespace

SolveOutcome solve_flow(const SolveConfig& cfg, const FlowOptions& opts) {
  const ProblemConfig pc = solver_problem(cfg.problem);
  check_solvable(cfg, pc);
  if (pc.m != 1) throw InvalidConfigError("cahn-hilliard flow is defined for m = 1 only");
  const SpectralField seed = make_seed(cfg, pc);

  const double t_star = nehari_scale_and_level(seed, pc).t_star;
  const double ridge_norm = t_star * h1_norm(seed);
  const double tau = stop_threshold(cfg, ridge_norm);

  SpectralField best_state = scaled(seed, t_star);
  double best_res = residual_dual_norm(best_state, pc);

  // bracket the basin boundary on the seed ray
  double s_lo = 0.5 * t_star, s_hi = 2.0 * t_star;
  auto classify = [&](double s) {
    const FlowProbe p = run_flow_segment(scaled(seed, s), pc, opts, ridge_norm, tau,
                                         best_state, best_res);
    if (p.fate != FlowFate::Undecided) return p.fate;
    return p.end_norm > ridge_norm ? FlowFate::Grew : FlowFate::Decayed;
  };
  for (int k = 0; k < 20 && classify(s_lo) != FlowFate::Decayed; ++k) s_lo *= 0.5;
  for (int k = 0; k < 20 && classify(s_hi) != FlowFate::Grew; ++k) s_hi *= 2.0;

  int bisections = 0;
  for (; bisections < opts.max_bisections && best_res >= tau; ++bisections) {
    const double s_mid = 0.5 * (s_lo + s_hi);
    if (s_mid == s_lo || s_mid == s_hi) break;  // bracket exhausted in double precision
    if (classify(s_mid) == FlowFate::Grew)
      s_hi = s_mid;
    else
      s_lo = s_mid;
  }

  SolveOutcome out = finish_outcome(best_state, plain_energy(best_state, pc), best_res,
                                    bisections, best_res < tau);
  const GridStats gs = grid_stats(out.state);
  out.max_amplitude_trace.push_back(gs.max_amplitude);
  out.ipr_trace.push_back(gs.ipr);
  out.level_trace.push_back(out.energy_level);
  return out;
}

std::vector<ScanRow> threshold_scan(const SolveConfig& cfg,
                                    const std::vector<double>& gamma_grid, int workers) {
  std::vector<ScanRow> rows(gamma_grid.size());
  const double thr = cfg.problem.threshold();

  auto run_one = [&](std::size_t i) {
    ScanRow row;
    row.gamma = gamma_grid[i];
    if (row.gamma >= thr) {
      row.threshold_violation = true;
      row.error = "threshold-violation";
      rows[i] = row;
      return;
    }
    SolveConfig sc = cfg;
    sc.problem.gamma = row.gamma;
    try {
      const SolveOutcome o = solve_nehari(sc);
      row.converged = o.converged;
      row.level = o.energy_level;
      row.residual = o.residual;
      row.iterations = o.iterations;
      if (o.converged && o.min_interior_value > 0.0)
        row.positivity_ok = positivity_certificate(o.state, sc.problem).ok;
      if (!o.converged) row.error = "non-convergence";
    } catch (const ThresholdViolation&) {
      row.threshold_violation = true;
      row.error = "threshold-violation";
    } catch (const std::exception& e) {
      row.error = e.what();
    }
    rows[i] = row;
  };

  workers = std::max(1, workers);
  if (workers == 1 || gamma_grid.size() <= 1) {
    for (std::size_t i = 0; i < gamma_grid.size(); ++i) run_one(i);
  } else {
    std::vector<std::future<void>> futs;
    const std::size_t nw = std::min<std::size_t>(workers, gamma_grid.size());
    for (std::size_t w = 0; w < nw; ++w) {
      futs.push_back(std::async(std::launch::async, [&, w]() {
        for (std::size_t i = w; i < gamma_grid.size(); i += nw) run_one(i);
      }));
    }
    for (auto& f : futs) f.get();
  }

  std::stable_sort(rows.begin(), rows.end(),
                   [](const ScanRow& a, const ScanRow& b) { return a.gamma < b.gamma; });
  return rows;
}

}  // namespace nlmp
