// Python bindings for the stationary mean-field-game solver and simulator.

#include <pybind11/functional.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>

#include <random>

#include "mfg/equilibrium.hpp"
#include "mfg/gbm_case.hpp"
#include "mfg/simulator.hpp"

namespace py = pybind11;
using namespace mfg;

PYBIND11_MODULE(_mfgsc, m) {
    m.doc() = "Stationary mean field games with reflection controls on "
              "one-dimensional diffusions";

    py::register_exception<NumericalError>(m, "NumericalError");
    py::register_exception<AssumptionError>(m, "AssumptionError");

    py::enum_<Mode>(m, "Mode")
        .value("discounted", Mode::discounted)
        .value("ergodic", Mode::ergodic);

    py::enum_<SolveMethod>(m, "SolveMethod")
        .value("automatic", SolveMethod::automatic)
        .value("closed_form_gbm", SolveMethod::closed_form_gbm)
        .value("ode_shooting", SolveMethod::ode_shooting);

    py::class_<DiffusionModel>(m, "DiffusionModel")
        .def_static("gbm", &DiffusionModel::gbm, py::arg("delta"),
                    py::arg("sigma"), py::arg("x_anchor") = 1.0)
        .def_static("affine", &DiffusionModel::affine, py::arg("kappa"),
                    py::arg("lambda_"), py::arg("sigma"),
                    py::arg("x_anchor") = 1.0)
        .def_static("custom", &DiffusionModel::custom, py::arg("x"),
                    py::arg("b"), py::arg("b_prime"), py::arg("sigma"),
                    py::arg("sigma_prime"), py::arg("x_anchor") = 1.0)
        .def("drift", &DiffusionModel::drift)
        .def("drift_prime", &DiffusionModel::drift_prime)
        .def("vol", &DiffusionModel::vol)
        .def("vol_prime", &DiffusionModel::vol_prime)
        .def("scale_density", &DiffusionModel::scale_density)
        .def("speed_density", &DiffusionModel::speed_density)
        .def("scale_density_hat", &DiffusionModel::scale_density_hat)
        .def("speed_density_hat", &DiffusionModel::speed_density_hat)
        .def("validate",
             [](const DiffusionModel& d, double r, std::vector<double> grid,
                bool ergodic) { return d.validate(r, grid, ergodic); },
             py::arg("r"), py::arg("grid"), py::arg("ergodic") = false);

    py::class_<ValidationReport>(m, "ValidationReport")
        .def_readonly("discount_gap", &ValidationReport::discount_gap)
        .def_readonly("discount_gap_ok", &ValidationReport::discount_gap_ok)
        .def_readonly("speed_tail_mass", &ValidationReport::speed_tail_mass)
        .def_readonly("positively_recurrent",
                      &ValidationReport::positively_recurrent)
        .def_readonly("failures", &ValidationReport::failures)
        .def("ok", &ValidationReport::ok);

    py::class_<ProfitModel>(m, "ProfitModel")
        .def_static("isoelastic", &ProfitModel::isoelastic, py::arg("beta"))
        .def("pi", &ProfitModel::pi)
        .def("pi_x", &ProfitModel::pi_x)
        .def("f", &ProfitModel::f)
        .def("F", &ProfitModel::F)
        .def("F_inv", &ProfitModel::F_inv);

    py::class_<CaseStudyParams>(m, "CaseStudyParams")
        .def(py::init([](double delta, double sigma, double beta, double r) {
                 return CaseStudyParams{delta, sigma, beta, r};
             }),
             py::arg("delta") = 2.0, py::arg("sigma") = 1.0,
             py::arg("beta") = 0.6, py::arg("r") = 0.0)
        .def_readwrite("delta", &CaseStudyParams::delta)
        .def_readwrite("sigma", &CaseStudyParams::sigma)
        .def_readwrite("beta", &CaseStudyParams::beta)
        .def_readwrite("r", &CaseStudyParams::r);

    py::class_<GbmEquilibrium>(m, "GbmEquilibrium")
        .def_readonly("rho_star", &GbmEquilibrium::rho_star)
        .def_readonly("theta_star", &GbmEquilibrium::theta_star)
        .def_readonly("x_star", &GbmEquilibrium::x_star)
        .def_readonly("lambda_star", &GbmEquilibrium::lambda_star);

    m.def("gbm_exponents", &gbm::exponents);
    m.def("gbm_discounted_equilibrium", &gbm::discounted_equilibrium);
    m.def("gbm_ergodic_equilibrium", &gbm::ergodic_equilibrium);

    py::class_<SolverConfig>(m, "SolverConfig")
        .def(py::init<>())
        .def_readwrite("bisect_tol", &SolverConfig::bisect_tol)
        .def_readwrite("quad_rel_tol", &SolverConfig::quad_rel_tol)
        .def_readwrite("x_lo", &SolverConfig::x_lo)
        .def_readwrite("x_hi", &SolverConfig::x_hi)
        .def_readwrite("theta_cap", &SolverConfig::theta_cap)
        .def_readwrite("fundamental_method", &SolverConfig::fundamental_method);

    py::class_<EquilibriumSolution>(m, "EquilibriumSolution")
        .def_readonly("mode", &EquilibriumSolution::mode)
        .def_readonly("r", &EquilibriumSolution::r)
        .def_readonly("x_star", &EquilibriumSolution::x_star)
        .def_readonly("theta_star", &EquilibriumSolution::theta_star)
        .def_readonly("ergodic_value", &EquilibriumSolution::ergodic_value)
        .def_readonly("K_residual", &EquilibriumSolution::K_residual)
        .def_readonly("Q_residual", &EquilibriumSolution::Q_residual)
        .def_readonly("iterations", &EquilibriumSolution::iterations);

    py::class_<ValueFunction>(m, "ValueFunction")
        .def("__call__", &ValueFunction::operator())
        .def("deriv", &ValueFunction::deriv)
        .def("second_deriv", &ValueFunction::second_deriv)
        .def("coeff_A", &ValueFunction::coeff_A)
        .def("barrier", &ValueFunction::barrier);

    py::class_<TruncatedSpeedLaw>(m, "TruncatedSpeedLaw")
        .def(py::init<const DiffusionModel&, double>(), py::arg("diffusion"),
             py::arg("barrier"))
        .def("barrier", &TruncatedSpeedLaw::barrier)
        .def("density", &TruncatedSpeedLaw::density)
        .def("cdf", &TruncatedSpeedLaw::cdf)
        .def("quantile", &TruncatedSpeedLaw::quantile)
        .def("mean", &TruncatedSpeedLaw::mean)
        .def("mean_power", &TruncatedSpeedLaw::mean_power)
        .def("pareto_alpha", &TruncatedSpeedLaw::pareto_alpha)
        .def("sample",
             [](const TruncatedSpeedLaw& law, std::size_t n,
                std::uint64_t seed) {
                 std::mt19937_64 eng(seed);
                 std::vector<double> out(n);
                 for (auto& v : out) v = law.sample(eng);
                 return out;
             },
             py::arg("n"), py::arg("seed") = 0);

    py::class_<EquilibriumProblem>(m, "EquilibriumProblem")
        .def(py::init<DiffusionModel, ProfitModel, SolverConfig>(),
             py::arg("diffusion"), py::arg("profit"),
             py::arg("config") = SolverConfig{})
        .def("K_integral", &EquilibriumProblem::K_integral)
        .def("barrier_for", &EquilibriumProblem::barrier_for)
        .def("Q_gap", &EquilibriumProblem::Q_gap)
        .def("solve", &EquilibriumProblem::solve, py::arg("mode"),
             py::arg("r") = 0.0,
             py::call_guard<py::gil_scoped_release>())
        .def("stationary_law", &EquilibriumProblem::stationary_law)
        .def("value_function", &EquilibriumProblem::value_function);

    py::class_<SimConfig>(m, "SimConfig")
        .def(py::init<>())
        .def_readwrite("dt", &SimConfig::dt)
        .def_readwrite("horizon", &SimConfig::horizon)
        .def_readwrite("burn_in", &SimConfig::burn_in)
        .def_readwrite("n_paths", &SimConfig::n_paths)
        .def_readwrite("seed", &SimConfig::seed)
        .def_readwrite("r", &SimConfig::r)
        .def_readwrite("workers", &SimConfig::workers)
        .def_readwrite("x0", &SimConfig::x0)
        .def_readwrite("init_barrier", &SimConfig::init_barrier);

    py::class_<Histogram>(m, "Histogram")
        .def_readonly("edges", &Histogram::edges)
        .def_readonly("mass", &Histogram::mass);

    m.def("ks_distance", &ks_distance);

    py::class_<ReflectedPathStats>(m, "ReflectedPathStats")
        .def_readonly("terminal", &ReflectedPathStats::terminal)
        .def_readonly("nu_total", &ReflectedPathStats::nu_total)
        .def_readonly("discounted_nu", &ReflectedPathStats::discounted_nu)
        .def_readonly("occupancy", &ReflectedPathStats::occupancy);

    m.def("simulate_reflected", &simulate_reflected, py::arg("diffusion"),
          py::arg("barrier"), py::arg("x0"), py::arg("cfg"),
          py::arg("stream") = 0, py::call_guard<py::gil_scoped_release>());

    py::class_<SimulationReport>(m, "SimulationReport")
        .def_readonly("theta_n", &SimulationReport::theta_n)
        .def_readonly("theta_n_half_width",
                      &SimulationReport::theta_n_half_width)
        .def_readonly("payoff", &SimulationReport::payoff)
        .def_readonly("payoff_half_width", &SimulationReport::payoff_half_width)
        .def_readonly("nu_rate", &SimulationReport::nu_rate)
        .def_readonly("divergent", &SimulationReport::divergent)
        .def_readonly("replications", &SimulationReport::replications);

    m.def("nplayer_run", &nplayer_run, py::arg("diffusion"), py::arg("profit"),
          py::arg("barriers"), py::arg("cfg"),
          py::call_guard<py::gil_scoped_release>());

    py::class_<DeviationResult>(m, "DeviationResult")
        .def_readonly("epsilon", &DeviationResult::epsilon)
        .def_readonly("half_width", &DeviationResult::half_width)
        .def_readonly("best_barrier", &DeviationResult::best_barrier)
        .def_readonly("noise_floor", &DeviationResult::noise_floor)
        .def_readonly("grid", &DeviationResult::grid)
        .def_readonly("gains", &DeviationResult::gains);

    m.def("deviation_epsilon", &deviation_epsilon, py::arg("diffusion"),
          py::arg("profit"), py::arg("n"), py::arg("equilibrium_barrier"),
          py::arg("deviation_grid"), py::arg("cfg"),
          py::call_guard<py::gil_scoped_release>());
}
