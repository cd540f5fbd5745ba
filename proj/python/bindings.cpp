#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include "nlmp/bubble.hpp"
#include "nlmp/experiment.hpp"
#include "nlmp/system.hpp"

namespace py = pybind11;
using namespace nlmp;

namespace {

py::array_t<double> to_array(const std::vector<double>& v) {
  py::array_t<double> a(static_cast<py::ssize_t>(v.size()));
  std::copy(v.begin(), v.end(), a.mutable_data());
  return a;
}

std::vector<double> from_array(const py::array_t<double, py::array::c_style | py::array::forcecast>& a) {
  return {a.data(), a.data() + a.size()};
}

SolveConfig make_solve_config(std::shared_ptr<const BoxBasis> basis, double gamma, double p,
                              int m, double grad_tol, int max_iters, double seed_amplitude,
                              bool allow_critical) {
  SolveConfig cfg;
  cfg.problem.basis = std::move(basis);
  cfg.problem.gamma = gamma;
  cfg.problem.p = p;
  cfg.problem.m = m;
  cfg.grad_tol = grad_tol;
  cfg.max_iters = max_iters;
  cfg.seed_amplitude = seed_amplitude;
  cfg.allow_critical = allow_critical;
  return cfg;
}

}  // namespace

PYBIND11_MODULE(_core, mod) {
  mod.doc() = "Spectral mountain-pass solver for the nonlocal eigenvalue-perturbed "
              "critical problem, with Talenti-bubble asymptotics";

  py::register_exception<InvalidConfigError>(mod, "InvalidConfigError", PyExc_ValueError);
  py::register_exception<ThresholdViolation>(mod, "ThresholdViolation", PyExc_RuntimeError);
  py::register_exception<UnstableStepError>(mod, "UnstableStepError", PyExc_RuntimeError);
  py::register_exception<QuadratureFailure>(mod, "QuadratureFailure", PyExc_RuntimeError);
  py::register_exception<AsymptoticsNotResolved>(mod, "AsymptoticsNotResolved",
                                                 PyExc_RuntimeError);

  py::class_<BoxBasis, std::shared_ptr<BoxBasis>>(mod, "BoxBasis")
      .def(py::init<std::vector<double>, std::vector<int>>(), py::arg("lengths"),
           py::arg("modes"))
      .def_property_readonly("dim", &BoxBasis::dim)
      .def_property_readonly("lengths", &BoxBasis::lengths)
      .def_property_readonly("modes", &BoxBasis::modes)
      .def_property_readonly("size", &BoxBasis::size)
      .def_property_readonly("lambda1", &BoxBasis::lambda1)
      .def_property_readonly("eigenvalues",
                             [](const BoxBasis& b) { return to_array(b.eigenvalues()); })
      .def("navier_first_eigenvalue", &BoxBasis::navier_first_eigenvalue, py::arg("q"));

  py::class_<SpectralField>(mod, "SpectralField")
      .def_property_readonly("coeffs", [](const SpectralField& f) { return to_array(f.coeffs); })
      .def_property_readonly("basis", [](const SpectralField& f) { return f.basis; })
      .def("l2_norm", [](const SpectralField& f) { return l2_norm(f); })
      .def("h1_norm", [](const SpectralField& f) { return h1_norm(f); });

  py::class_<GridField>(mod, "GridField")
      .def_property_readonly("values", [](const GridField& g) { return to_array(g.values); });

  mod.def(
      "build_box_basis",
      [](std::vector<double> lengths, std::vector<int> modes) {
        return std::const_pointer_cast<BoxBasis>(build_box_basis(lengths, modes));
      },
      py::arg("lengths"), py::arg("modes"));
  mod.def(
      "make_field",
      [](std::shared_ptr<BoxBasis> basis, const py::array_t<double>& coeffs) {
        SpectralField f = zero_field(basis);
        const auto v = from_array(coeffs);
        if (v.size() != f.coeffs.size())
          throw std::invalid_argument("coefficient vector length mismatch");
        f.coeffs = v;
        return f;
      },
      py::arg("basis"), py::arg("coeffs"));
  mod.def("first_eigenpair",
          [](std::shared_ptr<BoxBasis> basis) { return first_eigenpair(basis); });
  mod.def("from_spectral", &from_spectral);
  mod.def(
      "to_spectral",
      [](std::shared_ptr<BoxBasis> basis, const py::array_t<double>& values) {
        GridField g{basis, from_array(values)};
        return to_spectral(g);
      },
      py::arg("basis"), py::arg("values"));
  mod.def("apply_power", &apply_power, py::arg("field"), py::arg("s"));

  py::class_<ProblemConfig>(mod, "ProblemConfig")
      .def(py::init([](std::shared_ptr<BoxBasis> basis, double gamma, double p, int m,
                       bool positive_part) {
             ProblemConfig cfg;
             cfg.basis = std::move(basis);
             cfg.gamma = gamma;
             cfg.p = p;
             cfg.m = m;
             cfg.nonlinearity =
                 positive_part ? Nonlinearity::PositivePart : Nonlinearity::SignedPower;
             cfg.validate();
             return cfg;
           }),
           py::arg("basis"), py::arg("gamma") = 0.0, py::arg("p") = 3.0, py::arg("m") = 1,
           py::arg("positive_part") = false)
      .def_readonly("gamma", &ProblemConfig::gamma)
      .def_readonly("p", &ProblemConfig::p)
      .def_readonly("m", &ProblemConfig::m)
      .def_property_readonly("threshold", &ProblemConfig::threshold)
      .def_property_readonly("subcritical_safe", &ProblemConfig::subcritical_safe);

  py::class_<EnergyReport>(mod, "EnergyReport")
      .def_readonly("quadratic", &EnergyReport::quadratic)
      .def_readonly("nonlinear", &EnergyReport::nonlinear)
      .def_readonly("energy", &EnergyReport::energy)
      .def_readonly("gradient_norm", &EnergyReport::gradient_norm);

  mod.def("quadratic_part", &quadratic_part);
  mod.def("nonlinear_part", &nonlinear_part);
  mod.def("energy_scalar", &energy_scalar);
  mod.def("riesz_gradient", &riesz_gradient);
  mod.def("rayleigh_quotient_nonlocal", &rayleigh_quotient_nonlocal);
  mod.def("nehari_scale_and_level", [](const SpectralField& u, const ProblemConfig& cfg) {
    const NehariPoint n = nehari_scale_and_level(u, cfg);
    return py::make_tuple(n.t_star, n.level);
  });
  mod.def("system_energy", [](const std::vector<SpectralField>& fields,
                              const ProblemConfig& cfg) {
    return system_energy(std::span<const SpectralField>(fields.data(), fields.size()), cfg);
  });

  py::class_<SolveOutcome>(mod, "SolveOutcome")
      .def_readonly("state", &SolveOutcome::state)
      .def_readonly("energy_level", &SolveOutcome::energy_level)
      .def_readonly("residual", &SolveOutcome::residual)
      .def_readonly("min_interior_value", &SolveOutcome::min_interior_value)
      .def_readonly("iterations", &SolveOutcome::iterations)
      .def_readonly("converged", &SolveOutcome::converged)
      .def_property_readonly("level_trace",
                             [](const SolveOutcome& o) { return to_array(o.level_trace); })
      .def_property_readonly(
          "max_amplitude_trace",
          [](const SolveOutcome& o) { return to_array(o.max_amplitude_trace); })
      .def_property_readonly("ipr_trace",
                             [](const SolveOutcome& o) { return to_array(o.ipr_trace); });

  mod.def("solve_nehari",
          [](std::shared_ptr<BoxBasis> basis, double gamma, double p, int m, double grad_tol,
             int max_iters, double seed_amplitude, bool allow_critical) {
            return solve_nehari(make_solve_config(basis, gamma, p, m, grad_tol, max_iters,
                                                  seed_amplitude, allow_critical));
          },
          py::arg("basis"), py::arg("gamma") = 0.0, py::arg("p") = 3.0, py::arg("m") = 1,
          py::arg("grad_tol") = 1e-8, py::arg("max_iters") = 10000,
          py::arg("seed_amplitude") = 1.0, py::arg("allow_critical") = false);
  mod.def("solve_mountain_pass_path",
          [](std::shared_ptr<BoxBasis> basis, double gamma, double p, int m, double grad_tol,
             int max_iters, double seed_amplitude, bool allow_critical) {
            return solve_mountain_pass_path(make_solve_config(
                basis, gamma, p, m, grad_tol, max_iters, seed_amplitude, allow_critical));
          },
          py::arg("basis"), py::arg("gamma") = 0.0, py::arg("p") = 3.0, py::arg("m") = 1,
          py::arg("grad_tol") = 1e-8, py::arg("max_iters") = 10000,
          py::arg("seed_amplitude") = 1.0, py::arg("allow_critical") = false);
  mod.def("solve_flow",
          [](std::shared_ptr<BoxBasis> basis, double gamma, double p, double grad_tol,
             double dt, int steps_per_segment) {
            FlowOptions fo;
            fo.dt = dt;
            fo.steps_per_segment = steps_per_segment;
            return solve_flow(make_solve_config(basis, gamma, p, 1, grad_tol, 10000, 1.0, false),
                              fo);
          },
          py::arg("basis"), py::arg("gamma"), py::arg("p") = 3.0, py::arg("grad_tol") = 1e-8,
          py::arg("dt") = 2e-4, py::arg("steps_per_segment") = 5000);
  mod.def("residual_dual_norm", &residual_dual_norm);

  py::class_<PositivityCertificate>(mod, "PositivityCertificate")
      .def_readonly("lhs", &PositivityCertificate::lhs)
      .def_readonly("rhs", &PositivityCertificate::rhs)
      .def_readonly("ok", &PositivityCertificate::ok);
  mod.def("positivity_certificate", &positivity_certificate);

  py::class_<FlowTrajectory>(mod, "FlowTrajectory")
      .def_readonly("snapshots", &FlowTrajectory::snapshots)
      .def_property_readonly(
          "snapshot_times", [](const FlowTrajectory& t) { return to_array(t.snapshot_times); })
      .def_readonly("converged", &FlowTrajectory::converged)
      .def_readonly("steps_taken", &FlowTrajectory::steps_taken)
      .def_readonly("residual_fourth_order", &FlowTrajectory::residual_fourth_order)
      .def_readonly("residual_second_order", &FlowTrajectory::residual_second_order);
  mod.def("evolve_cahn_hilliard", &evolve_cahn_hilliard, py::arg("u0"), py::arg("cfg"),
          py::arg("dt"), py::arg("steps"), py::arg("settle_tol") = 1e-13,
          py::arg("snapshot_stride") = 0);

  py::class_<ScanRow>(mod, "ScanRow")
      .def_readonly("gamma", &ScanRow::gamma)
      .def_readonly("converged", &ScanRow::converged)
      .def_readonly("threshold_violation", &ScanRow::threshold_violation)
      .def_readonly("level", &ScanRow::level)
      .def_readonly("residual", &ScanRow::residual)
      .def_readonly("positivity_ok", &ScanRow::positivity_ok)
      .def_readonly("iterations", &ScanRow::iterations)
      .def_readonly("error", &ScanRow::error);
  mod.def("threshold_scan",
          [](std::shared_ptr<BoxBasis> basis, const std::vector<double>& gammas, double p,
             int m, double grad_tol, int workers) {
            return threshold_scan(make_solve_config(basis, 0.0, p, m, grad_tol, 10000, 1.0,
                                                    false),
                                  gammas, workers);
          },
          py::arg("basis"), py::arg("gammas"), py::arg("p") = 3.0, py::arg("m") = 1,
          py::arg("grad_tol") = 1e-8, py::arg("workers") = 1);

  py::class_<SystemState>(mod, "SystemState")
      .def_readonly("u", &SystemState::u)
      .def_readonly("v", &SystemState::v);
  py::class_<SystemSolveOutcome>(mod, "SystemSolveOutcome")
      .def_readonly("state", &SystemSolveOutcome::state)
      .def_readonly("level", &SystemSolveOutcome::level)
      .def_readonly("residual", &SystemSolveOutcome::residual)
      .def_readonly("iterations", &SystemSolveOutcome::iterations)
      .def_readonly("converged", &SystemSolveOutcome::converged)
      .def_readonly("min_interior_value", &SystemSolveOutcome::min_interior_value);
  py::class_<EquivalenceReport>(mod, "EquivalenceReport")
      .def_readonly("residuals", &EquivalenceReport::residuals)
      .def_readonly("max_residual", &EquivalenceReport::max_residual)
      .def_readonly("pass_", &EquivalenceReport::pass);

  mod.def("lift_to_system", &lift_to_system);
  mod.def("system_residual", &system_residual);
  mod.def("solve_system_mpa",
          [](std::shared_ptr<BoxBasis> basis, double gamma, double p, int m, double grad_tol,
             int max_iters) {
            return solve_system_mpa(
                make_solve_config(basis, gamma, p, m, grad_tol, max_iters, 1.0, false));
          },
          py::arg("basis"), py::arg("gamma"), py::arg("p") = 3.0, py::arg("m") = 1,
          py::arg("grad_tol") = 1e-8, py::arg("max_iters") = 10000);
  mod.def("equivalence_check", &equivalence_check, py::arg("u"), py::arg("cfg"),
          py::arg("tol") = 1e-6);

  py::class_<RadialProfile>(mod, "RadialProfile")
      .def(py::init([](int dimension, const py::array_t<double>& radii,
                       const py::array_t<double>& values) {
             RadialProfile p{dimension, from_array(radii), from_array(values)};
             p.validate();
             return p;
           }),
           py::arg("dimension"), py::arg("radii"), py::arg("values"))
      .def_readonly("dimension", &RadialProfile::dimension)
      .def_property_readonly("radii", [](const RadialProfile& p) { return to_array(p.radii); })
      .def_property_readonly("values",
                             [](const RadialProfile& p) { return to_array(p.values); });
  mod.def("unit_sphere_area", &unit_sphere_area);
  mod.def(
      "radial_integral",
      [](const RadialProfile& f, double power, std::optional<double> tail_value_decay,
         std::vector<double> kink_radii) {
        RadialIntegralOptions opts;
        opts.power = power;
        opts.tail_value_decay = tail_value_decay;
        opts.kink_radii = std::move(kink_radii);
        return radial_integral(f, opts);
      },
      py::arg("profile"), py::arg("power") = 1.0, py::arg("tail_value_decay") = py::none(),
      py::arg("kink_radii") = std::vector<double>{});

  py::class_<BubbleSpec>(mod, "BubbleSpec")
      .def(py::init([](int N, double epsilon, double R) {
             BubbleSpec s{N, epsilon, R};
             s.validate();
             return s;
           }),
           py::arg("N"), py::arg("epsilon"), py::arg("R") = 0.25)
      .def_readonly("N", &BubbleSpec::N)
      .def_readonly("epsilon", &BubbleSpec::epsilon)
      .def_readonly("R", &BubbleSpec::R)
      .def("epsilon_comfortably_small", &BubbleSpec::epsilon_comfortably_small);

  py::class_<PowerFit>(mod, "PowerFit")
      .def_readonly("exponent", &PowerFit::exponent)
      .def_readonly("rms_residual", &PowerFit::rms_residual)
      .def_readonly("log_model_rms", &PowerFit::log_model_rms)
      .def_readonly("log_preferred", &PowerFit::log_preferred)
      .def_property_readonly("epsilons", [](const PowerFit& f) { return to_array(f.epsilons); })
      .def_property_readonly("values", [](const PowerFit& f) { return to_array(f.values); });

  py::class_<LevelReport>(mod, "LevelReport")
      .def_readonly("SN_eps", &LevelReport::SN_eps)
      .def_readonly("F_eps", &LevelReport::F_eps)
      .def_readonly("t_eps", &LevelReport::t_eps)
      .def_readonly("g_at_t", &LevelReport::g_at_t)
      .def_readonly("c_star", &LevelReport::c_star)
      .def_readonly("gap_ok", &LevelReport::gap_ok);

  py::enum_<WindowMode>(mod, "WindowMode")
      .value("Scalar", WindowMode::Scalar)
      .value("System", WindowMode::System);
  py::class_<WindowReport>(mod, "WindowReport")
      .def_readonly("feasible", &WindowReport::feasible)
      .def_readonly("lo", &WindowReport::lo)
      .def_readonly("hi", &WindowReport::hi);

  mod.def("talenti_bubble", &talenti_bubble, py::arg("spec"),
          py::arg("radii") = std::vector<double>{});
  mod.def("cutoff_bubble", &cutoff_bubble, py::arg("spec"),
          py::arg("radii") = std::vector<double>{});
  mod.def("sobolev_constant",
          [](int N, double epsilon) { return sobolev_constant(N, {}, epsilon); },
          py::arg("N"), py::arg("epsilon") = 1.0);
  mod.def("bubble_l2_asymptotics",
          [](int N, double R, const std::vector<double>& eps) {
            return bubble_l2_asymptotics(N, R, eps);
          },
          py::arg("N"), py::arg("R"), py::arg("epsilon_grid"));
  mod.def("bubble_grad_defect",
          [](int N, double R, const std::vector<double>& eps) {
            return bubble_grad_defect(N, R, eps);
          },
          py::arg("N"), py::arg("R"), py::arg("epsilon_grid"));
  mod.def("gradient_defect",
          [](const BubbleSpec& spec) { return gradient_defect(spec); }, py::arg("spec"));
  mod.def("nonlocal_pairing",
          [](const BubbleSpec& spec) { return nonlocal_pairing(spec); }, py::arg("spec"));
  mod.def("nonlocal_pairing_fit",
          [](int N, double R, const std::vector<double>& eps) {
            return nonlocal_pairing_fit(N, R, eps);
          },
          py::arg("N"), py::arg("R"), py::arg("epsilon_grid"));
  mod.def("level_gap",
          [](int N, double gamma, const BubbleSpec& spec) { return level_gap(N, gamma, spec); },
          py::arg("N"), py::arg("gamma"), py::arg("spec"));
  mod.def("dimension_window", &dimension_window, py::arg("N"), py::arg("mode"));
  mod.def("default_epsilon_grid", &default_epsilon_grid);

  mod.def("run_cli", [](const std::vector<std::string>& args) {
    std::ostringstream out, err;
    const int code = cli::run(args, out, err);
    return py::make_tuple(code, out.str(), err.str());
  });

  mod.attr("__version__") = "0.1.0";
}
