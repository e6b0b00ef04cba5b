#pragma once

#include <cstdint>
#include <fstream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "remest/delay.hpp"
#include "remest/experiments.hpp"
#include "remest/lambda_search.hpp"

namespace remest {

class ConfigError : public std::runtime_error {
public:
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

enum class SimPolicy { optimal, periodic, zero_wait };

// Fully validated run configuration with documented defaults filled in.
// Unknown keys are rejected so a manifest always describes the run
// exactly.
struct ExperimentConfig {
    double c_s = 0.0;
    double c_tau = 0.0;
    std::optional<double> lambda;  // required by solve/convergence/curves
    DelayModel delay;
    LambdaSearchOptions search;  // solver + grid + lambda-search knobs

    // simulation
    std::size_t n_epochs = 10000;
    double dt = 1e-3;
    int k_max = 10000;
    SimPolicy sim_policy = SimPolicy::optimal;
    double period = 0.0;

    // experiment sweeps
    std::vector<double> sigma2_list = {0.0, 0.1, 1.0, 2.5};
    std::vector<double> c_tau_list = {0.1, 1.0, 10.0};
    std::vector<double> t_grid = default_period_grid();
    double mu_y = 1.0;
    DelayKind family = DelayKind::lognormal;
    std::size_t sweep_n_epochs = 5000;
    bool curves_lambda_star = true;

    std::uint64_t seed = 1;

    double require_lambda() const {
        if (!lambda)
            throw ConfigError("lambda: required by this subcommand but missing from config");
        return *lambda;
    }

    CostParams cost_params(double lam) const { return {c_s, c_tau, lam}; }
    Costs costs() const { return {c_s, c_tau}; }

    SweepOptions sweep_options() const {
        SweepOptions o;
        o.family = family;
        o.mu_y = mu_y;
        o.t_grid = t_grid;
        o.n_epochs = sweep_n_epochs;
        o.dt = dt;
        o.k_max = k_max;
        o.search = search;
        return o;
    }
};

namespace detail {

using json = nlohmann::json;

inline void reject_unknown_keys(const json& j, const std::string& path,
                                std::initializer_list<const char*> allowed) {
    for (const auto& [key, value] : j.items()) {
        bool ok = false;
        for (const char* a : allowed)
            if (key == a) ok = true;
        if (!ok)
            throw ConfigError("unknown key: " + (path.empty() ? key : path + "." + key));
    }
}

inline double get_number(const json& j, const std::string& path) {
    if (!j.is_number()) throw ConfigError(path + ": expected a number");
    return j.get<double>();
}

inline double number_or(const json& parent, const char* key, const std::string& path,
                        double fallback) {
    if (!parent.contains(key) || parent.at(key).is_null()) return fallback;
    return get_number(parent.at(key), path + "." + key);
}

inline std::int64_t integer_or(const json& parent, const char* key,
                               const std::string& path, std::int64_t fallback) {
    if (!parent.contains(key) || parent.at(key).is_null()) return fallback;
    const json& j = parent.at(key);
    if (!j.is_number_integer())
        throw ConfigError(path + "." + key + ": expected an integer");
    return j.get<std::int64_t>();
}

inline std::string string_or(const json& parent, const char* key,
                             const std::string& path, const std::string& fallback) {
    if (!parent.contains(key) || parent.at(key).is_null()) return fallback;
    const json& j = parent.at(key);
    if (!j.is_string()) throw ConfigError(path + "." + key + ": expected a string");
    return j.get<std::string>();
}

inline std::vector<double> number_list(const json& j, const std::string& path) {
    if (!j.is_array() || j.empty())
        throw ConfigError(path + ": expected a nonempty array of numbers");
    std::vector<double> out;
    out.reserve(j.size());
    for (const auto& v : j) {
        if (!v.is_number()) throw ConfigError(path + ": expected a nonempty array of numbers");
        out.push_back(v.get<double>());
    }
    return out;
}

inline DelayModel parse_delay(const json& j) {
    if (!j.is_object()) throw ConfigError("delay: expected an object");
    const std::string kind = string_or(j, "kind", "delay", "");
    try {
        if (kind == "deterministic") {
            reject_unknown_keys(j, "delay", {"kind", "d"});
            if (!j.contains("d")) throw ConfigError("delay.d: required");
            return DelayModel::deterministic(get_number(j.at("d"), "delay.d"));
        }
        if (kind == "exponential") {
            reject_unknown_keys(j, "delay", {"kind", "rate"});
            if (!j.contains("rate")) throw ConfigError("delay.rate: required");
            return DelayModel::exponential(get_number(j.at("rate"), "delay.rate"));
        }
        if (kind == "lognormal") {
            reject_unknown_keys(j, "delay", {"kind", "location", "scale"});
            if (!j.contains("location") || !j.contains("scale"))
                throw ConfigError("delay.location/delay.scale: required");
            return DelayModel::lognormal(get_number(j.at("location"), "delay.location"),
                                         get_number(j.at("scale"), "delay.scale"));
        }
        if (kind == "discrete") {
            reject_unknown_keys(j, "delay", {"kind", "values", "probs"});
            if (!j.contains("values") || !j.contains("probs"))
                throw ConfigError("delay.values/delay.probs: required");
            return DelayModel::discrete(number_list(j.at("values"), "delay.values"),
                                        number_list(j.at("probs"), "delay.probs"));
        }
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    throw ConfigError(
        "delay.kind: must be one of deterministic, exponential, lognormal, discrete");
}

inline DelayKind parse_family(const std::string& s, const std::string& path) {
    if (s == "lognormal") return DelayKind::lognormal;
    if (s == "discrete") return DelayKind::discrete;
    throw ConfigError(path + ": must be \"lognormal\" or \"discrete\"");
}

}  // namespace detail

inline ExperimentConfig parse_config(const nlohmann::json& j) {
    using detail::reject_unknown_keys;
    if (!j.is_object()) throw ConfigError("config: expected a JSON object");
    reject_unknown_keys(j, "",
                        {"c_s", "c_tau", "lambda", "delay", "grid", "solver", "sim",
                         "experiment", "seed"});

    ExperimentConfig cfg;
    if (!j.contains("c_s")) throw ConfigError("c_s: required");
    if (!j.contains("c_tau")) throw ConfigError("c_tau: required");
    if (!j.contains("delay")) throw ConfigError("delay: required");
    cfg.c_s = detail::get_number(j.at("c_s"), "c_s");
    cfg.c_tau = detail::get_number(j.at("c_tau"), "c_tau");
    if (!(cfg.c_s > 0.0)) throw ConfigError("c_s: must be > 0");
    if (!(cfg.c_tau > 0.0)) throw ConfigError("c_tau: must be > 0");
    if (j.contains("lambda") && !j.at("lambda").is_null()) {
        cfg.lambda = detail::get_number(j.at("lambda"), "lambda");
        if (!(*cfg.lambda >= 0.0)) throw ConfigError("lambda: must be >= 0");
    }
    cfg.delay = detail::parse_delay(j.at("delay"));

    if (j.contains("grid")) {
        const auto& g = j.at("grid");
        if (!g.is_object()) throw ConfigError("grid: expected an object");
        reject_unknown_keys(g, "grid", {"n_points", "e_max"});
        const auto n = detail::integer_or(g, "n_points", "grid", 2001);
        if (n < 3) throw ConfigError("grid.n_points: must be >= 3");
        cfg.search.solver.n_points = static_cast<std::size_t>(n);
        cfg.search.solver.e_max = detail::number_or(g, "e_max", "grid", 0.0);
        if (g.contains("e_max") && !g.at("e_max").is_null() &&
            !(cfg.search.solver.e_max > 0.0))
            throw ConfigError("grid.e_max: must be > 0 when given");
    }

    if (j.contains("solver")) {
        const auto& s = j.at("solver");
        if (!s.is_object()) throw ConfigError("solver: expected an object");
        reject_unknown_keys(s, "solver",
                            {"tol", "max_iter", "n_quad", "z_max", "z_coarse",
                             "z_refine_tol", "tol_lambda", "bracket", "delay_expectation",
                             "n_quad_delay", "n_mc_delay", "threads", "first_step_grid"});
        auto& so = cfg.search.solver;
        so.tol = detail::number_or(s, "tol", "solver", so.tol);
        so.max_iter = static_cast<int>(detail::integer_or(s, "max_iter", "solver", so.max_iter));
        so.n_quad = static_cast<int>(detail::integer_or(s, "n_quad", "solver", so.n_quad));
        so.z_search.z_max = detail::number_or(s, "z_max", "solver", so.z_search.z_max);
        so.z_search.n_coarse =
            static_cast<int>(detail::integer_or(s, "z_coarse", "solver", so.z_search.n_coarse));
        so.z_search.refine_tol =
            detail::number_or(s, "z_refine_tol", "solver", so.z_search.refine_tol);
        so.threads = static_cast<int>(detail::integer_or(s, "threads", "solver", so.threads));
        cfg.search.tol_lambda =
            detail::number_or(s, "tol_lambda", "solver", cfg.search.tol_lambda);
        if (s.contains("bracket") && !s.at("bracket").is_null()) {
            const auto br = detail::number_list(s.at("bracket"), "solver.bracket");
            if (br.size() != 2) throw ConfigError("solver.bracket: expected [lo, hi]");
            cfg.search.bracket_lo = br[0];
            cfg.search.bracket_hi = br[1];
            if (!(br[0] >= 0.0) || !(br[1] > br[0]))
                throw ConfigError("solver.bracket: need 0 <= lo < hi");
        }
        const std::string expectation =
            detail::string_or(s, "delay_expectation", "solver", "quadrature");
        if (expectation == "quadrature")
            cfg.search.delay_expectation = DelayExpectation::quadrature;
        else if (expectation == "monte-carlo")
            cfg.search.delay_expectation = DelayExpectation::monte_carlo;
        else
            throw ConfigError(
                "solver.delay_expectation: must be \"quadrature\" or \"monte-carlo\"");
        cfg.search.n_quad_delay = static_cast<int>(
            detail::integer_or(s, "n_quad_delay", "solver", cfg.search.n_quad_delay));
        cfg.search.n_mc_delay = static_cast<std::size_t>(
            detail::integer_or(s, "n_mc_delay", "solver", cfg.search.n_mc_delay));
        cfg.search.first_step_grid = static_cast<std::size_t>(detail::integer_or(
            s, "first_step_grid", "solver", cfg.search.first_step_grid));
    }

    if (j.contains("sim")) {
        const auto& s = j.at("sim");
        if (!s.is_object()) throw ConfigError("sim: expected an object");
        reject_unknown_keys(s, "sim", {"n_epochs", "dt", "k_max", "policy", "period"});
        const auto ne = detail::integer_or(s, "n_epochs", "sim", 10000);
        if (ne < 100) throw ConfigError("sim.n_epochs: must be >= 100");
        cfg.n_epochs = static_cast<std::size_t>(ne);
        cfg.dt = detail::number_or(s, "dt", "sim", cfg.dt);
        if (!(cfg.dt > 0.0)) throw ConfigError("sim.dt: must be > 0");
        cfg.k_max = static_cast<int>(detail::integer_or(s, "k_max", "sim", cfg.k_max));
        if (cfg.k_max < 1) throw ConfigError("sim.k_max: must be >= 1");
        const std::string pol = detail::string_or(s, "policy", "sim", "optimal");
        if (pol == "optimal")
            cfg.sim_policy = SimPolicy::optimal;
        else if (pol == "periodic")
            cfg.sim_policy = SimPolicy::periodic;
        else if (pol == "zero-wait")
            cfg.sim_policy = SimPolicy::zero_wait;
        else
            throw ConfigError(
                "sim.policy: must be \"optimal\", \"periodic\" or \"zero-wait\"");
        cfg.period = detail::number_or(s, "period", "sim", 0.0);
        if (cfg.sim_policy == SimPolicy::periodic && !(cfg.period > 0.0))
            throw ConfigError("sim.period: must be > 0 for the periodic policy");
    }

    if (j.contains("experiment")) {
        const auto& e = j.at("experiment");
        if (!e.is_object()) throw ConfigError("experiment: expected an object");
        reject_unknown_keys(e, "experiment",
                            {"sigma2_list", "c_tau_list", "t_grid", "mu_y", "family",
                             "n_epochs", "curves_lambda_star"});
        if (e.contains("sigma2_list") && !e.at("sigma2_list").is_null()) {
            cfg.sigma2_list = detail::number_list(e.at("sigma2_list"), "experiment.sigma2_list");
            for (double v : cfg.sigma2_list)
                if (!(v >= 0.0)) throw ConfigError("experiment.sigma2_list: must all be >= 0");
        }
        if (e.contains("c_tau_list") && !e.at("c_tau_list").is_null()) {
            cfg.c_tau_list = detail::number_list(e.at("c_tau_list"), "experiment.c_tau_list");
            for (double v : cfg.c_tau_list)
                if (!(v > 0.0)) throw ConfigError("experiment.c_tau_list: must all be > 0");
        }
        if (e.contains("t_grid") && !e.at("t_grid").is_null()) {
            cfg.t_grid = detail::number_list(e.at("t_grid"), "experiment.t_grid");
            for (double v : cfg.t_grid)
                if (!(v > 0.0)) throw ConfigError("experiment.t_grid: must all be > 0");
        }
        cfg.mu_y = detail::number_or(e, "mu_y", "experiment", cfg.mu_y);
        if (!(cfg.mu_y > 0.0)) throw ConfigError("experiment.mu_y: must be > 0");
        cfg.family = detail::parse_family(
            detail::string_or(e, "family", "experiment", "lognormal"), "experiment.family");
        const auto ne = detail::integer_or(e, "n_epochs", "experiment",
                                           static_cast<std::int64_t>(cfg.sweep_n_epochs));
        if (ne < 100) throw ConfigError("experiment.n_epochs: must be >= 100");
        cfg.sweep_n_epochs = static_cast<std::size_t>(ne);
        if (e.contains("curves_lambda_star")) {
            if (!e.at("curves_lambda_star").is_boolean())
                throw ConfigError("experiment.curves_lambda_star: expected a boolean");
            cfg.curves_lambda_star = e.at("curves_lambda_star").get<bool>();
        }
    }

    if (j.contains("seed")) {
        if (!j.at("seed").is_number_integer())
            throw ConfigError("seed: expected an integer");
        cfg.seed = j.at("seed").get<std::uint64_t>();
    }
    cfg.search.seed = cfg.seed;

    try {
        cfg.search.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(e.what());
    }
    return cfg;
}

inline ExperimentConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    nlohmann::json j;
    try {
        in >> j;
    } catch (const nlohmann::json::parse_error& e) {
        throw ConfigError(std::string("config parse error: ") + e.what());
    }
    return parse_config(j);
}

}  // namespace remest
