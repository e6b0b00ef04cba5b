// Command-line front end: loads a JSON run configuration, dispatches one
// subcommand, and emits CSV/JSON artifacts plus a run manifest into the
// output directory. Outputs are deterministic given (config, seed).

#include <chrono>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "remest/config.hpp"
#include "remest/csv.hpp"
#include "remest/experiments.hpp"
#include "remest/lambda_search.hpp"
#include "remest/simulate.hpp"
#include "remest/version.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace remest;

namespace {

std::uint64_t fnv1a64(const std::string& bytes) {
    std::uint64_t h = 1469598103934665603ull;
    for (const unsigned char c : bytes) {
        h ^= c;
        h *= 1099511628211ull;
    }
    return h;
}

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// tracks artifacts so a failed run leaves no partial outputs behind
class OutputTracker {
public:
    explicit OutputTracker(fs::path dir) : dir_(std::move(dir)) {
        fs::create_directories(dir_);
    }
    std::string path(const std::string& name) {
        files_.push_back(dir_ / name);
        return (dir_ / name).string();
    }
    void discard_all() {
        std::error_code ec;
        for (const auto& f : files_) fs::remove(f, ec);
    }
    const std::vector<fs::path>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<fs::path> files_;
};

void write_value_and_policy(OutputTracker& out, const ValueFunction& vf,
                            const Policy& pol) {
    CsvWriter csv(out.path("g_and_policy.csv"), {"E", "g", "z_star", "stop"});
    for (std::size_t i = 0; i < vf.grid.size(); ++i)
        csv.row({format_number(vf.grid.points[i]), format_number(vf.values[i]),
                 format_number(pol.z_star[i]), pol.stop[i] ? "1" : "0"});
}

void write_report(OutputTracker& out, const SolveReport& rep, const char* name) {
    CsvWriter csv(out.path(name), {"iteration", "sup_diff"});
    for (std::size_t i = 0; i < rep.sup_diffs.size(); ++i)
        csv.row({format_number(static_cast<int>(i + 1)), format_number(rep.sup_diffs[i])});
}

void write_first_step(OutputTracker& out, const FirstStepTable& table) {
    CsvWriter csv(out.path("first_step.csv"), {"y", "z1"});
    for (std::size_t i = 0; i < table.y.size(); ++i)
        csv.row({format_number(table.y[i]), format_number(table.z1[i])});
}

void write_simulation(OutputTracker& out, const char* policy, const SimResult& r,
                      std::uint64_t seed) {
    CsvWriter csv(out.path("simulation.csv"),
                  {"policy", "n_epochs", "objective", "mse", "sample_rate", "tx_rate",
                   "ci_halfwidth", "seed"});
    csv.row({policy, format_number(std::uint64_t{r.n_epochs}), format_number(r.objective),
             format_number(r.mse), format_number(r.sample_rate), format_number(r.tx_rate),
             format_number(r.ci_halfwidth), format_number(seed)});
}

void write_curves(OutputTracker& out, const char* name,
                  const std::vector<CurvePoint>& pts) {
    CsvWriter csv(out.path(name), {"sigma2", "c_tau", "e", "z_star"});
    for (const auto& p : pts)
        csv.row({format_number(p.sigma2), format_number(p.c_tau), format_number(p.e),
                 format_number(p.z_star)});
}

int run(const std::string& subcommand, const std::string& config_path,
        const std::string& out_dir, std::optional<std::uint64_t> seed_override) {
    const auto t_start = std::chrono::steady_clock::now();
    const std::string config_bytes = read_file(config_path);
    ExperimentConfig cfg = load_config(config_path);
    if (seed_override) {
        cfg.seed = *seed_override;
        cfg.search.seed = *seed_override;
    }

    OutputTracker out{fs::path(out_dir)};
    try {
        if (subcommand == "solve") {
            const CostParams params = cfg.cost_params(cfg.require_lambda());
            const double mu_y = cfg.delay.moments().mean;
            const ErrorGrid grid = make_solver_grid(params, mu_y, cfg.search.solver);
            const auto [vf, rep] = solve_g_infinity(params, mu_y, grid, cfg.search.solver);
            const Policy pol =
                extract_policy(vf, params, mu_y, cfg.search.solver,
                               make_delay_grid(cfg.delay, cfg.search.first_step_grid));
            write_value_and_policy(out, vf, pol);
            write_report(out, rep, "report.csv");
            if (!rep.converged)
                std::cerr << "warning: value iteration hit max_iter before tol\n";
        } else if (subcommand == "find-lambda") {
            const auto sol = find_lambda_star(cfg.delay, cfg.c_s, cfg.c_tau, cfg.search);
            json j;
            j["lambda_star"] = sol.lambda_star;
            j["j_at_star"] = sol.j_at_star;
            j["bracket"] = {sol.bracket_lo, sol.bracket_hi};
            j["iterations_at_star"] = sol.report.iterations;
            j["converged"] = sol.report.converged;
            j["stop_threshold"] = sol.policy.stop_threshold;
            json evals = json::array();
            for (const auto& [lambda, jv] : sol.evaluations)
                evals.push_back({{"lambda", lambda}, {"J", jv}});
            j["evaluations"] = evals;
            std::ofstream(out.path("lambda_star.json")) << j.dump(2) << '\n';
            write_value_and_policy(out, sol.vf, sol.policy);
            write_first_step(out, sol.policy.first_step);
            write_report(out, sol.report, "report.csv");
        } else if (subcommand == "simulate") {
            PolicySpec spec = PolicySpec::zero_wait();
            if (cfg.sim_policy == SimPolicy::periodic)
                spec = PolicySpec::periodic(cfg.period);
            else if (cfg.sim_policy == SimPolicy::optimal) {
                auto sol = find_lambda_star(cfg.delay, cfg.c_s, cfg.c_tau, cfg.search);
                spec = PolicySpec::optimal(std::move(sol.policy));
            }
            const SimResult r = run_simulation(spec, cfg.costs(), cfg.delay, cfg.n_epochs,
                                               cfg.dt, cfg.k_max, cfg.seed, 0);
            write_simulation(out, spec.name(), r, cfg.seed);
        } else if (subcommand == "sweep-sigma") {
            const auto rows =
                sweep_sigma(cfg.c_s, cfg.c_tau, cfg.sigma2_list, cfg.sweep_options(),
                            cfg.seed);
            CsvWriter csv(out.path("sweep.csv"),
                          {"sigma2", "lambda_star", "mse_opt", "mse_opt_ci",
                           "mse_periodic", "mse_periodic_ci", "t_best", "seed"});
            for (const auto& r : rows)
                csv.row({format_number(r.sigma2), format_number(r.lambda_star),
                         format_number(r.mse_opt), format_number(r.mse_opt_ci),
                         format_number(r.mse_periodic), format_number(r.mse_periodic_ci),
                         format_number(r.t_best), format_number(r.seed)});
        } else if (subcommand == "convergence") {
            const SolveReport rep = convergence_trace(cfg.c_s, cfg.c_tau,
                                                      cfg.require_lambda(), cfg.delay,
                                                      cfg.search.solver);
            CsvWriter csv(out.path("convergence.csv"), {"iter", "sup_diff"});
            for (std::size_t i = 0; i < rep.sup_diffs.size(); ++i)
                csv.row({format_number(static_cast<int>(i + 1)),
                         format_number(rep.sup_diffs[i])});
            if (!rep.converged)
                std::cerr << "warning: value iteration hit max_iter before tol\n";
        } else if (subcommand == "curves") {
            const auto curves =
                policy_curves(cfg.c_s, cfg.require_lambda(), cfg.mu_y, cfg.c_tau_list,
                              cfg.sigma2_list, cfg.family, cfg.search,
                              cfg.curves_lambda_star);
            write_curves(out, "curves_fixed_lambda.csv", curves.fixed_lambda);
            if (cfg.curves_lambda_star)
                write_curves(out, "curves_lambda_star.csv", curves.at_lambda_star);
        } else {
            std::cerr << "unknown subcommand: " << subcommand << '\n';
            return 2;
        }

        const double wall =
            std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start)
                .count();
        json manifest;
        manifest["tool"] = "remest";
        manifest["version"] = REMEST_VERSION;
        manifest["subcommand"] = subcommand;
        manifest["config_path"] = config_path;
        char hash[20];
        std::snprintf(hash, sizeof(hash), "%016llx",
                      static_cast<unsigned long long>(fnv1a64(config_bytes)));
        manifest["config_fnv1a64"] = hash;
        manifest["seed"] = cfg.seed;
        manifest["wall_time_s"] = wall;
        json outputs = json::array();
        for (const auto& f : out.files()) outputs.push_back(f.filename().string());
        manifest["outputs"] = outputs;
        std::ofstream(out.path("manifest.json")) << manifest.dump(2) << '\n';
    } catch (...) {
        out.discard_all();
        throw;
    }
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Optimal sampling/transmission policies for remote tracking of a "
                 "Wiener process over a random-delay channel"};
    app.require_subcommand(1);

    std::string config_path, out_dir = ".";
    std::optional<std::uint64_t> seed_override;

    const auto add = [&](const std::string& name, const std::string& desc) {
        CLI::App* sub = app.add_subcommand(name, desc);
        sub->add_option("--config", config_path, "JSON run configuration")
            ->required()
            ->check(CLI::ExistingFile);
        sub->add_option("--out", out_dir, "output directory (created if missing)");
        sub->add_option("--seed", seed_override, "override the config seed");
        return sub;
    };

    add("solve", "value iteration at a fixed lambda; writes g and the policy");
    add("find-lambda", "locate lambda* by bisection on the sign of J");
    add("simulate", "Monte Carlo epochs under the configured policy");
    add("sweep-sigma", "delay-variance sweep: optimal vs best periodic");
    add("convergence", "per-iteration sup-norm trace of the solve");
    add("curves", "waiting-time curves per (sigma2, c_tau) combination");

    CLI11_PARSE(app, argc, argv);

    const std::string sub = app.get_subcommands().front()->get_name();
    try {
        return run(sub, config_path, out_dir, seed_override);
    } catch (const ConfigError& e) {
        std::cerr << "config error: " << e.what() << '\n';
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 2;
    }
}
