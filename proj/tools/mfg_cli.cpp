#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"

#include "mfg/config.hpp"
#include "mfg/gbm_case.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace mfg;

namespace {

int g_log_level = 1;  // 0 error, 1 info, 2 debug

void init_log_level() {
    const char* env = std::getenv("MFG_LOG");
    if (!env) return;
    const std::string v(env);
    if (v == "error")
        g_log_level = 0;
    else if (v == "info")
        g_log_level = 1;
    else if (v == "debug")
        g_log_level = 2;
    else
        std::cerr << "[warn] MFG_LOG must be error|info|debug, got '" << v
                  << "'\n";
}

void log_info(const std::string& msg) {
    if (g_log_level >= 1) std::cerr << "[info] " << msg << "\n";
}
void log_debug(const std::string& msg) {
    if (g_log_level >= 2) std::cerr << "[debug] " << msg << "\n";
}

std::ofstream open_out(const fs::path& dir, const std::string& name) {
    fs::create_directories(dir);
    std::ofstream out(dir / name);
    if (!out) throw ConfigError("cannot write " + (dir / name).string());
    out.precision(17);
    return out;
}

double rho_of_theta(const ProfitModel& profit, double theta) {
    auto beta = profit.beta();
    return beta ? std::pow(theta, -(1.0 + *beta))
                : std::numeric_limits<double>::quiet_NaN();
}

json equilibrium_json(const ExperimentConfig& cfg,
                      const EquilibriumSolution& eq) {
    json j;
    j["mode"] = eq.mode == Mode::ergodic ? "ergodic" : "discounted";
    j["r"] = eq.r;
    j["x_star"] = eq.x_star;
    j["theta_star"] = eq.theta_star;
    const double rho = rho_of_theta(cfg.profit, eq.theta_star);
    if (std::isfinite(rho)) j["rho_star"] = rho;
    if (eq.mode == Mode::ergodic) j["ergodic_value"] = eq.ergodic_value;
    j["residuals"] = {{"K", eq.K_residual}, {"Q", eq.Q_residual}};
    j["iterations"] = eq.iterations;
    return j;
}

void write_density_csv(std::ofstream out, const TruncatedSpeedLaw& law) {
    out << "x,density,cdf\n";
    const double x_hi = law.quantile(1.0 - 1e-6);
    const double l0 = std::log(law.barrier()), l1 = std::log(x_hi);
    for (int i = 0; i <= 400; ++i) {
        const double x = std::exp(l0 + (l1 - l0) * i / 400.0);
        out << x << ',' << law.density(x) << ',' << law.cdf(x) << '\n';
    }
}

int cmd_solve(const ExperimentConfig& cfg, const fs::path& out_dir) {
    EquilibriumProblem prob(cfg.diffusion, cfg.profit, cfg.solver);
    log_info("solving equilibrium");
    const auto eq = prob.solve(cfg.mode, cfg.r);
    log_info("x_star=" + std::to_string(eq.x_star) +
             " theta_star=" + std::to_string(eq.theta_star));
    const auto law = prob.stationary_law(eq);

    open_out(out_dir, "equilibrium.json") << equilibrium_json(cfg, eq).dump(2)
                                          << "\n";
    write_density_csv(open_out(out_dir, "density.csv"), law);
    if (cfg.mode == Mode::discounted) {
        const auto v = prob.value_function(eq);
        auto out = open_out(out_dir, "value.csv");
        out << "x,v\n";
        const double l0 = std::log(eq.x_star), l1 = std::log(10.0 * eq.x_star);
        for (int i = 0; i <= 200; ++i) {
            const double x = std::exp(l0 + (l1 - l0) * i / 200.0);
            out << x << ',' << v(x) << '\n';
        }
    }
    return 0;
}

int cmd_abelian_sweep(const ExperimentConfig& cfg, const fs::path& out_dir) {
    std::vector<double> r_list = {0.5, 0.25, 0.1, 0.05, 0.01};
    if (cfg.raw.contains("sweep") && cfg.raw["sweep"].contains("r_list"))
        r_list = cfg.raw["sweep"]["r_list"].get<std::vector<double>>();
    if (r_list.empty())
        throw ConfigError("sweep.r_list must be a non-empty list");
    for (std::size_t i = 0; i + 1 < r_list.size(); ++i)
        if (!(r_list[i] > r_list[i + 1]) || !(r_list.back() > 0.0))
            throw ConfigError("sweep.r_list must be positive and descending");

    EquilibriumProblem prob(cfg.diffusion, cfg.profit, cfg.solver);
    const auto erg = prob.solve(Mode::ergodic);
    auto out = open_out(out_dir, "sweep.csv");
    out << "r,x_star,theta_star,rho_star,r_v_at_x_star,lambda_star_e\n";
    for (double r : r_list) {
        log_info("sweep r=" + std::to_string(r));
        const auto eq = prob.solve(Mode::discounted, r);
        const auto v = prob.value_function(eq);
        out << r << ',' << eq.x_star << ',' << eq.theta_star << ','
            << rho_of_theta(cfg.profit, eq.theta_star) << ','
            << r * v(eq.x_star) << ',' << erg.ergodic_value << '\n';
    }
    return 0;
}

int cmd_sensitivity(const ExperimentConfig& cfg, const fs::path& out_dir,
                    const std::string& param, double lo, double hi, int n) {
    if (param != "delta" && param != "sigma" && param != "beta")
        throw ConfigError("sensitivity: param must be delta|sigma|beta");
    if (!cfg.diffusion.gbm_params() || !cfg.profit.beta())
        throw ConfigError(
            "sensitivity: requires gbm model with isoelastic profit");
    if (!(lo < hi) || n < 2) throw ConfigError("sensitivity: bad range");
    if (param == "beta" && !(lo > 0.0 && hi < 1.0))
        throw ConfigError("sensitivity: beta range must lie in (0, 1)");
    if (param != "beta" && !(lo > 0.0))
        throw ConfigError("sensitivity: range must be positive");

    const double r = cfg.mode == Mode::discounted ? cfg.r : 0.5;
    auto gp = *cfg.diffusion.gbm_params();
    const double beta0 = *cfg.profit.beta();

    // sign patterns only need ~1e-4 accuracy; relax quadrature accordingly
    SolverConfig sc = cfg.solver;
    sc.quad_rel_tol = std::max(sc.quad_rel_tol, 1e-8);
    sc.bisect_tol = std::max(sc.bisect_tol, 1e-10);

    auto out = open_out(out_dir, "sensitivity.csv");
    out << "param,x_star_e,rho_star_e,x_star_r,rho_star_r,"
           "x_star_e_closed,rho_star_e_closed,x_star_r_closed,"
           "rho_star_r_closed\n";
    for (int i = 0; i < n; ++i) {
        const double val = lo + (hi - lo) * i / (n - 1.0);
        CaseStudyParams p{gp.first, gp.second, beta0, r};
        if (param == "delta")
            p.delta = val;
        else if (param == "sigma")
            p.sigma = val;
        else
            p.beta = val;
        log_info("sensitivity " + param + "=" + std::to_string(val));
        auto model = DiffusionModel::gbm(p.delta, p.sigma);
        auto profit = ProfitModel::isoelastic(p.beta);
        EquilibriumProblem prob(model, profit, sc);
        const auto ee = prob.solve(Mode::ergodic);
        const auto er = prob.solve(Mode::discounted, r);
        const auto ce = gbm::ergodic_equilibrium(p);
        const auto cr = gbm::discounted_equilibrium(p);
        out << val << ',' << ee.x_star << ','
            << rho_of_theta(profit, ee.theta_star) << ',' << er.x_star << ','
            << rho_of_theta(profit, er.theta_star) << ',' << ce.x_star << ','
            << ce.rho_star << ',' << cr.x_star << ',' << cr.rho_star << '\n';
    }
    return 0;
}

std::vector<double> default_deviation_grid(double x_star, double cap) {
    std::vector<double> g;
    const double lo = x_star / 3.0, hi = std::min(3.0 * x_star, cap);
    for (int i = 0; i < 21; ++i)
        g.push_back(lo * std::pow(hi / lo, i / 20.0));
    return g;
}

int cmd_simulate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    EquilibriumProblem prob(cfg.diffusion, cfg.profit, cfg.solver);
    log_info("solving ergodic equilibrium for the simulation baseline");
    const auto erg = prob.solve(Mode::ergodic);

    SimConfig sim = cfg.sim;
    if (cfg.init_stationary) sim.init_barrier = erg.x_star;

    // barrier cap: twice the largest marginal break-even point seen across
    // the run's own modes (a computable stand-in for the theoretical cap)
    double cap = 2.0 * x_hat(cfg.profit, cfg.diffusion,
                             cfg.profit.F(cfg.profit.f(erg.x_star)), 0.0);
    std::optional<EquilibriumSolution> disc;
    if (cfg.mode == Mode::discounted) {
        disc = prob.solve(Mode::discounted, cfg.r);
        cap = std::max(cap, 2.0 * x_hat(cfg.profit, cfg.diffusion,
                                        cfg.profit.F(cfg.profit.f(disc->x_star)),
                                        cfg.r));
    }
    std::vector<double> grid = cfg.deviation_grid.empty()
                                   ? default_deviation_grid(erg.x_star, cap)
                                   : cfg.deviation_grid;
    for (double& z : grid) z = std::min(z, cap);

    log_info("running " + std::to_string(cfg.n_players) + "-player game");
    std::vector<double> barriers(cfg.n_players, erg.x_star);
    const auto rep = nplayer_run(cfg.diffusion, cfg.profit, barriers, sim);
    const auto law = prob.stationary_law(erg);
    const double ks =
        ks_distance(rep.occupancy, [&](double x) { return law.cdf(x); });

    json report;
    report["N"] = cfg.n_players;
    report["theta_n"] = {{"estimate", rep.theta_n},
                         {"half_width", rep.theta_n_half_width}};
    report["payoff"] = {{"estimate", rep.payoff},
                        {"half_width", rep.payoff_half_width}};
    report["nu_rate"] = rep.nu_rate;
    report["time_avg_second_moment"] = rep.time_avg_second_moment;
    report["occupancy_ks"] = ks;
    report["divergent"] = rep.divergent;
    report["replications"] = rep.replications;
    report["theta_star_e"] = erg.theta_star;
    report["lambda_star_e"] = erg.ergodic_value;
    report["barrier_cap"] = cap;

    auto eps_out = open_out(out_dir, "epsilon_table.csv");
    eps_out << "N,epsilon,half_width,noise_floor\n";
    double prev = std::numeric_limits<double>::infinity(), prev_hw = 0.0;
    bool nonincreasing = true;
    for (std::size_t n : cfg.n_list) {
        log_info("deviation search at N=" + std::to_string(n));
        const auto dev = deviation_epsilon(cfg.diffusion, cfg.profit, n,
                                           erg.x_star, grid, sim);
        eps_out << n << ',' << dev.epsilon << ',' << dev.half_width << ','
                << (dev.noise_floor ? 1 : 0) << '\n';
        if (dev.epsilon > prev + prev_hw + dev.half_width)
            nonincreasing = false;
        prev = dev.epsilon;
        prev_hw = dev.half_width;
    }
    report["epsilon_nonincreasing_within_noise"] = nonincreasing;

    if (disc) {
        SimConfig sim_r = sim;
        sim_r.r = cfg.r;
        log_info("discounted deviation search at N=" +
                 std::to_string(cfg.n_players));
        const auto dev_r = deviation_epsilon(cfg.diffusion, cfg.profit,
                                             cfg.n_players, erg.x_star, grid,
                                             sim_r);
        report["epsilon_discounted"] = {{"r", cfg.r},
                                        {"epsilon", dev_r.epsilon},
                                        {"half_width", dev_r.half_width},
                                        {"noise_floor", dev_r.noise_floor}};
    }

    auto occ = open_out(out_dir, "occupancy.csv");
    occ << "x_lo,x_hi,mass\n";
    for (std::size_t i = 0; i < rep.occupancy.mass.size(); ++i)
        occ << rep.occupancy.edges[i] << ',' << rep.occupancy.edges[i + 1]
            << ',' << rep.occupancy.mass[i] << '\n';
    open_out(out_dir, "report.json") << report.dump(2) << "\n";
    return 0;
}

int cmd_validate(const ExperimentConfig& cfg, const fs::path& out_dir) {
    if (!cfg.diffusion.gbm_params())
        throw ConfigError("validate: requires a gbm model");
    const double r = cfg.mode == Mode::discounted ? cfg.r : 0.5;
    double solver_tol = 1e-6;
    std::size_t mc_paths = 100000;
    if (cfg.raw.contains("validate")) {
        solver_tol = cfg.raw["validate"].value("tol", solver_tol);
        mc_paths = cfg.raw["validate"].value("mc_paths", mc_paths);
    }

    json checks = json::array();
    auto add = [&](const std::string& name, double err, double tol) {
        checks.push_back({{"name", name},
                          {"error", err},
                          {"tolerance", tol},
                          {"pass", err <= tol}});
        log_info(name + ": error=" + std::to_string(err) +
                 (err <= tol ? " pass" : " FAIL"));
    };

    const auto gp = *cfg.diffusion.gbm_params();
    const double beta = cfg.profit.beta().value_or(0.6);
    CaseStudyParams p{gp.first, gp.second, beta, r};

    SolverConfig sc = cfg.solver;
    sc.fundamental_method = SolveMethod::ode_shooting;
    EquilibriumProblem prob(cfg.diffusion, cfg.profit, sc);

    const auto ee = prob.solve(Mode::ergodic);
    const auto ce = gbm::ergodic_equilibrium(p);
    add("solver_vs_closed_form_ergodic_x_star",
        std::abs(ee.x_star / ce.x_star - 1.0), solver_tol);
    add("solver_vs_closed_form_ergodic_theta_star",
        std::abs(ee.theta_star / ce.theta_star - 1.0), solver_tol);

    const auto er = prob.solve(Mode::discounted, r);
    const auto cr = gbm::discounted_equilibrium(p);
    add("solver_vs_closed_form_discounted_x_star",
        std::abs(er.x_star / cr.x_star - 1.0), solver_tol);
    add("solver_vs_closed_form_discounted_theta_star",
        std::abs(er.theta_star / cr.theta_star - 1.0), solver_tol);

    // decreasing fundamental solution: shooting vs closed form on [0.1, 10]
    const std::pair<double, double> dom{1e-5, 1e5};
    auto phi_cf = solve_fundamental(cfg.diffusion, r, Branch::phi_decreasing,
                                    false, dom);
    auto phi_ode = solve_fundamental(cfg.diffusion, r, Branch::phi_decreasing,
                                     false, dom, 0.0, SolveMethod::ode_shooting);
    double worst = 0.0;
    for (double x = 0.1; x <= 10.0; x *= 1.05)
        worst = std::max(worst,
                         std::abs(phi_ode.value(x) / phi_cf.value(x) - 1.0));
    add("phi_ode_vs_closed_form_max_rel", worst, 1e-7);

    // probabilistic representation of the hatted solution
    auto phh = solve_fundamental(cfg.diffusion, r, Branch::phi_decreasing, true,
                                 dom, 0.0, SolveMethod::ode_shooting);
    const double ratio = phh.value(1.0) / phh.value(0.5);
    const auto mc = phi_hat_mc(cfg.diffusion, r, 1.0, 0.5, mc_paths,
                               cfg.sim.seed + 1);
    add("phi_hat_ode_vs_mc", std::abs(ratio - mc.estimate),
        3.0 * mc.std_error);

    double id_err = 0.0;
    for (int i = 0; i < 400; ++i) {
        const double x = std::pow(10.0, -3.0 + 6.0 * i / 399.0);
        id_err = std::max(id_err,
                          std::abs(cfg.diffusion.speed_density_hat(x) *
                                       cfg.diffusion.scale_density(x) -
                                   2.0));
    }
    add("identity_speed_hat_times_scale", id_err, 1e-12);

    // integral identity for the hatted decreasing solution on [a, b]
    const double a = 0.5, b = 2.0;
    const double lhs = phh.deriv(b) / cfg.diffusion.scale_density_hat(b) -
                       phh.deriv(a) / cfg.diffusion.scale_density_hat(a);
    const double rhs = num::integrate(
        [&](double y) {
            return phh.value(y) * (r - cfg.diffusion.drift_prime(y)) *
                   cfg.diffusion.speed_density_hat(y);
        },
        a, b, 1e-12);
    add("phi_hat_integral_identity", std::abs(lhs / rhs - 1.0), 1e-6);

    bool all = true;
    for (const auto& c : checks) all = all && c["pass"].get<bool>();
    json out = {{"checks", checks}, {"all_pass", all}};
    open_out(out_dir, "validation.json") << out.dump(2) << "\n";
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    init_log_level();

    CLI::App app{"Stationary mean field games with reflection barriers: "
                 "solver, sweeps, and Monte Carlo experiments"};
    app.require_subcommand(1);

    std::string config_path, out_dir_flag;
    std::vector<std::string> overrides;
    int workers = 0;
    std::uint64_t seed = 0;
    bool seed_set = false;
    app.add_option("--config", config_path, "JSON experiment config");
    app.add_option("--out", out_dir_flag, "output directory");
    app.add_option("--set", overrides, "override config values (key=value)");
    app.add_option("--workers", workers, "simulation worker threads");
    auto* seed_opt = app.add_option("--seed", seed, "RNG seed");

    auto* solve = app.add_subcommand("solve", "solve one equilibrium");
    auto* sweep = app.add_subcommand(
        "abelian-sweep", "equilibria along a descending discount-rate list");
    std::string param = "sigma";
    double lo = 0.5, hi = 2.0;
    int n_points = 20;
    auto* sens = app.add_subcommand("sensitivity",
                                    "equilibrium sweep over one parameter");
    sens->add_option("--param", param, "delta|sigma|beta");
    sens->add_option("--lo", lo, "range start");
    sens->add_option("--hi", hi, "range end");
    sens->add_option("--n", n_points, "number of sweep points");
    auto* simulate =
        app.add_subcommand("simulate", "N-player games and deviation tests");
    auto* validate =
        app.add_subcommand("validate", "cross-oracle consistency checks");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : 2;
    }
    seed_set = seed_opt->count() > 0;

    try {
        ExperimentConfig cfg = config_path.empty()
                                   ? parse_config(json::object(), overrides)
                                   : load_config(config_path, overrides);
        if (workers > 0) cfg.sim.workers = workers;
        if (seed_set) cfg.sim.seed = seed;
        log_debug("config: " + cfg.raw.dump());
        const fs::path out_dir =
            out_dir_flag.empty() ? fs::path(cfg.output_dir)
                                 : fs::path(out_dir_flag);

        if (solve->parsed()) return cmd_solve(cfg, out_dir);
        if (sweep->parsed()) return cmd_abelian_sweep(cfg, out_dir);
        if (sens->parsed())
            return cmd_sensitivity(cfg, out_dir, param, lo, hi, n_points);
        if (simulate->parsed()) return cmd_simulate(cfg, out_dir);
        if (validate->parsed()) return cmd_validate(cfg, out_dir);
        return 2;
    } catch (const ConfigError& e) {
        std::cout << json{{"error", e.what()}, {"kind", "config"}}.dump()
                  << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cout << json{{"error", e.what()}, {"kind", "numerical"}}.dump()
                  << "\n";
        return 1;
    }
}
