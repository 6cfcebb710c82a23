#include "mfg/config.hpp"

#include <fstream>
#include <sstream>

namespace mfg {

namespace {

using nlohmann::json;

double need_number(const json& j, const char* block, const char* key) {
    if (!j.contains(key) || !j[key].is_number())
        throw ConfigError(std::string(block) + ": missing numeric field '" +
                          key + "'");
    return j[key].get<double>();
}

DiffusionModel parse_model(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("model: block must be an object with a 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    // invalid parameters are config errors, not downstream numerical ones
    if (kind == "gbm" || kind == "affine") {
        try {
            if (kind == "gbm")
                return DiffusionModel::gbm(need_number(j, "model", "delta"),
                                           need_number(j, "model", "sigma"));
            return DiffusionModel::affine(need_number(j, "model", "kappa"),
                                          need_number(j, "model", "lambda"),
                                          need_number(j, "model", "sigma"));
        } catch (const AssumptionError& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }
    if (kind == "custom") {
        if (!j.contains("grid_file"))
            throw ConfigError("model: custom kind needs 'grid_file'");
        const std::string path = j["grid_file"].get<std::string>();
        std::ifstream in(path);
        if (!in) throw ConfigError("model: cannot open grid_file " + path);
        std::string header;
        std::getline(in, header);
        if (header != "x,b,b_prime,sigma,sigma_prime")
            throw ConfigError(
                "model: grid_file header must be x,b,b_prime,sigma,sigma_prime");
        std::vector<double> x, b, bp, s, sp;
        std::string line;
        while (std::getline(in, line)) {
            if (line.empty()) continue;
            std::istringstream ls(line);
            double v[5];
            char comma;
            for (int k = 0; k < 5; ++k) {
                if (!(ls >> v[k]))
                    throw ConfigError("model: bad row in grid_file: " + line);
                if (k < 4 && !(ls >> comma))
                    throw ConfigError("model: bad row in grid_file: " + line);
            }
            x.push_back(v[0]);
            b.push_back(v[1]);
            bp.push_back(v[2]);
            s.push_back(v[3]);
            sp.push_back(v[4]);
        }
        if (x.size() < 4)
            throw ConfigError("model: grid_file needs at least 4 rows");
        try {
            return DiffusionModel::custom(x, b, bp, s, sp);
        } catch (const std::exception& e) {
            throw ConfigError(std::string("model: ") + e.what());
        }
    }
    throw ConfigError("model: unknown kind '" + kind + "'");
}

ProfitModel parse_profit(const json& j) {
    if (!j.is_object() || !j.contains("kind"))
        throw ConfigError("profit: block must be an object with a 'kind'");
    const std::string kind = j["kind"].get<std::string>();
    if (kind != "isoelastic")
        throw ConfigError("profit: only 'isoelastic' is configurable; custom "
                          "profits go through the library API");
    const double beta = need_number(j, "profit", "beta");
    if (!(beta > 0.0 && beta < 1.0))
        throw ConfigError("profit: beta must be in (0, 1)");
    return ProfitModel::isoelastic(beta);
}

void apply_override(json& j, const std::string& kv) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0)
        throw ConfigError("--set expects key=value, got '" + kv + "'");
    const std::string key = kv.substr(0, eq);
    const std::string val = kv.substr(eq + 1);
    json parsed;
    try {
        parsed = json::parse(val);
    } catch (const json::exception&) {
        parsed = val;  // bare strings are allowed unquoted
    }
    json* node = &j;
    std::size_t pos = 0;
    while (true) {
        const auto dot = key.find('.', pos);
        const std::string part = key.substr(pos, dot - pos);
        if (part.empty())
            throw ConfigError("--set: empty path segment in '" + key + "'");
        if (dot == std::string::npos) {
            (*node)[part] = parsed;
            return;
        }
        node = &(*node)[part];
        pos = dot + 1;
    }
}

}  // namespace

ExperimentConfig parse_config(nlohmann::json j,
                              const std::vector<std::string>& overrides) {
    if (!j.is_object()) throw ConfigError("config: top level must be an object");
    for (const auto& kv : overrides) apply_override(j, kv);

    ExperimentConfig cfg;
    cfg.raw = j;
    if (j.contains("model")) cfg.diffusion = parse_model(j["model"]);
    if (j.contains("profit")) cfg.profit = parse_profit(j["profit"]);

    if (j.contains("solver")) {
        const auto& s = j["solver"];
        const std::string mode = s.value("mode", "ergodic");
        if (mode == "ergodic") {
            cfg.mode = Mode::ergodic;
            cfg.r = 0.0;
        } else if (mode == "discounted") {
            cfg.mode = Mode::discounted;
            cfg.r = need_number(s, "solver", "r");
            if (!(cfg.r > 0.0))
                throw ConfigError("solver: discounted mode needs r > 0");
        } else {
            throw ConfigError("solver: mode must be ergodic or discounted");
        }
        if (s.contains("tol")) cfg.solver.bisect_tol = s["tol"].get<double>();
        if (s.contains("quad_tol"))
            cfg.solver.quad_rel_tol = s["quad_tol"].get<double>();
        if (s.contains("method")) {
            const std::string m = s["method"].get<std::string>();
            if (m == "closed_form")
                cfg.solver.fundamental_method = SolveMethod::closed_form_gbm;
            else if (m == "ode")
                cfg.solver.fundamental_method = SolveMethod::ode_shooting;
            else if (m != "auto")
                throw ConfigError("solver: method must be auto|closed_form|ode");
        }
    }

    if (j.contains("sim")) {
        const auto& s = j["sim"];
        cfg.sim.dt = s.value("dt", cfg.sim.dt);
        cfg.sim.horizon = s.value("T", cfg.sim.horizon);
        cfg.sim.burn_in = s.value("burn_in", 0.05 * cfg.sim.horizon);
        cfg.sim.n_paths = s.value("n_paths", cfg.sim.n_paths);
        cfg.sim.seed = s.value("seed", cfg.sim.seed);
        cfg.sim.workers = s.value("workers", cfg.sim.workers);
        cfg.n_players = s.value("N", cfg.n_players);
        if (s.contains("N_list"))
            cfg.n_list = s["N_list"].get<std::vector<std::size_t>>();
        if (s.contains("deviation_grid"))
            cfg.deviation_grid = s["deviation_grid"].get<std::vector<double>>();
        const std::string init = s.value("init", "stationary");
        if (init == "stationary")
            cfg.init_stationary = true;
        else if (init == "anchor")
            cfg.init_stationary = false;
        else
            throw ConfigError("sim: init must be stationary or anchor");
        try {
            cfg.sim.validate();
        } catch (const std::exception& e) {
            throw ConfigError(std::string("sim: ") + e.what());
        }
    }

    if (j.contains("output_dir"))
        cfg.output_dir = j["output_dir"].get<std::string>();
    return cfg;
}

ExperimentConfig load_config(const std::string& path,
                             const std::vector<std::string>& overrides) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file " + path);
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(in);
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError(std::string("config: malformed JSON: ") + e.what());
    }
    return parse_config(std::move(j), overrides);
}

}  // namespace mfg
