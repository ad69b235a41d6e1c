// socctl: solve / rollout / bench / cc runner around the soc library.
// Exit codes: 0 success, 1 config or usage error, 2 partial cell failures.

#include <filesystem>
#include <fstream>
#include <iostream>

#include "CLI11.hpp"
#include "json.hpp"
#include "soc/bench.hpp"

namespace {

using nlohmann::json;
using namespace soc;

struct GlobalFlags {
    std::string config_path;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> out_dir;
    std::optional<std::string> format;
    std::string controller_path; // rollout only
};

RunConfig load_with_overrides(const GlobalFlags& flags) {
    RunConfig cfg = flags.config_path.empty() ? parse_run_config("{}")
                                              : load_run_config(flags.config_path);
    if (flags.seed) {
        cfg.seed = *flags.seed;
        cfg.rollouts.seed = *flags.seed;
    }
    if (flags.out_dir) cfg.out_dir = *flags.out_dir;
    if (flags.format) {
        cfg.emit_csv = *flags.format == "csv";
        cfg.emit_json = *flags.format == "json";
    }
    return cfg;
}

std::string variant_name(const RunConfig& cfg) {
    if (cfg.solver != "i2c") return cfg.solver;
    std::string mode = cfg.i2c.mode == InferenceMode::Stochastic ? "s" : "ce";
    std::string ctrl = cfg.i2c.controller_mode == ControllerMode::Feedforward ? "ff"
                       : cfg.i2c.controller_mode == ControllerMode::Feedback  ? "fb"
                                                                              : "e";
    return "i2c-" + mode + "-" + ctrl;
}

void write_moments_csv(const std::vector<Gaussian>& moments, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    const int dx = moments.empty() ? 0 : moments.front().dim();
    os << "t";
    for (int i = 0; i < dx; ++i) os << ",mu_" << i;
    for (int i = 0; i < dx; ++i) {
        for (int k = i; k < dx; ++k) os << ",cov_" << i << '_' << k;
    }
    os << '\n';
    os.precision(17);
    for (std::size_t t = 0; t < moments.size(); ++t) {
        os << t;
        for (int i = 0; i < dx; ++i) os << ',' << moments[t].mean()(i);
        for (int i = 0; i < dx; ++i) {
            for (int k = i; k < dx; ++k) os << ',' << moments[t].cov()(i, k);
        }
        os << '\n';
    }
}

int run_solve(const GlobalFlags& flags) {
    RunConfig cfg = load_with_overrides(flags);
    const EnvSpec env = configured_env(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    json diag;
    diag["config"] = json::parse(cfg.config_text);
    diag["config_sha1"] = sha1_hex(cfg.config_text);

    if (cfg.solver == "i2c") {
        const DynamicsModel dyn = dynamics_model(env, true);
        const CostModel cost = default_cost(env);
        const SolveResult res = solve(dyn, cost, cfg.i2c);
        save_controller(res.controller, cfg.out_dir + "/controller.txt");
        RolloutReport empty;
        emit_trajectories(empty, res.posterior, cfg.out_dir);
        diag["solver"] = variant_name(cfg);
        diag["alpha_trace"] = res.diagnostics.alpha_trace;
        diag["loglik_trace"] = res.diagnostics.loglik_trace;
        diag["planned_cost_trace"] = res.diagnostics.planned_cost_trace;
        diag["converged"] = res.diagnostics.converged;
        diag["iterations"] = res.diagnostics.iterations;
    } else {
        const VariantResult res = solve_variant(env, variant_name(cfg), cfg);
        save_controller(res.controller, cfg.out_dir + "/controller.txt");
        diag["solver"] = cfg.solver;
        diag["converged"] = res.converged;
        diag["iterations"] = res.solver_iterations;
        diag["planned_cost"] = res.planned_cost;
    }
    if (cfg.emit_json) {
        std::ofstream os(cfg.out_dir + "/solve.json");
        os << diag.dump(2) << '\n';
    }
    std::cout << "controller written to " << cfg.out_dir << "/controller.txt\n";
    return 0;
}

int run_rollout(const GlobalFlags& flags) {
    RunConfig cfg = load_with_overrides(flags);
    const EnvSpec env = configured_env(cfg);
    const CostModel cost = default_cost(env);
    LinearGaussianController ctrl;
    if (!flags.controller_path.empty()) {
        ctrl = load_controller(flags.controller_path);
    } else {
        ctrl = solve_variant(env, variant_name(cfg), cfg).controller;
    }
    const RolloutReport report = rollout_eval(env, cost, ctrl, cfg.rollouts);
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.emit_json) write_rollout_json(report, cfg, cfg.out_dir + "/rollout.json");
    if (cfg.emit_csv && cfg.rollouts.keep_trajectories) {
        std::ofstream os(cfg.out_dir + "/costs.csv");
        os << "rollout,cost,failed\n";
        os.precision(17);
        for (std::size_t r = 0; r < report.rollouts.size(); ++r) {
            os << r << ',' << report.rollouts[r].cost << ',' << report.rollouts[r].failed
               << '\n';
        }
    }
    std::cout << "rollouts: n=" << report.rollouts.size() << " mean=" << report.mean
              << " p10=" << report.p10 << " p90=" << report.p90
              << " failures=" << report.failures << '\n';
    return 0;
}

int run_bench(const GlobalFlags& flags) {
    RunConfig cfg = load_with_overrides(flags);
    const BenchTable table = run_benchmark(cfg);
    std::filesystem::create_directories(cfg.out_dir);
    if (cfg.emit_csv) write_bench_csv(table, cfg, cfg.out_dir + "/bench.csv");
    if (cfg.emit_json) write_bench_json(table, cfg, cfg.out_dir + "/bench.json");
    bool any_fail = false;
    for (const auto& cell : table.cells) {
        std::cout << cell.env << ' ' << cell.variant;
        if (cell.ok) {
            std::cout << "  p10=" << cell.p10 << " p90=" << cell.p90;
        } else {
            std::cout << "  FAILED: " << cell.error;
            any_fail = true;
        }
        std::cout << '\n';
    }
    return any_fail ? 2 : 0;
}

int run_cc(const GlobalFlags& flags) {
    RunConfig cfg = load_with_overrides(flags);
    const EnvSpec env = configured_env(cfg);
    if (cfg.cc_target_mean.size() != env.dx || cfg.cc_target_cov.rows() != env.dx) {
        throw Error("cc config must provide target_mean/target_cov matching the state dim");
    }
    const DynamicsModel dyn = dynamics_model(env, true);
    const CostModel cost = min_energy_cost(env.dx, env.du, env.T, env.R);
    I2cConfig icfg = cfg.i2c;
    const TerminalTarget target(Gaussian(cfg.cc_target_mean, cfg.cc_target_cov));
    const CcResult res = cc_solve(dyn, cost, icfg, target, cfg.cc_schedule, cfg.cc_opts);

    std::filesystem::create_directories(cfg.out_dir);
    save_controller(res.controller, cfg.out_dir + "/controller.txt");
    if (cfg.emit_csv) write_moments_csv(res.closed_loop, cfg.out_dir + "/closed_loop.csv");
    if (cfg.emit_json) {
        json doc;
        doc["config"] = json::parse(cfg.config_text);
        doc["config_sha1"] = sha1_hex(cfg.config_text);
        doc["kl_direction"] = "KL(achieved || target)";
        doc["kl_trace"] = res.kl_trace;
        doc["converged"] = res.converged;
        doc["iterations"] = res.iterations;
        RolloutOptions mc = cfg.rollouts;
        mc.sample_x0 = true;
        mc.sample_controller = true;
        const RolloutReport report = rollout_eval(env, cost, res.controller, mc);
        Vec mean = Vec::Zero(env.dx);
        int ok = 0;
        for (const auto& rec : report.rollouts) {
            if (!rec.failed) {
                mean += rec.terminal_state;
                ++ok;
            }
        }
        if (ok > 0) {
            mean /= ok;
            Mat cov = Mat::Zero(env.dx, env.dx);
            for (const auto& rec : report.rollouts) {
                if (!rec.failed) {
                    cov += (rec.terminal_state - mean) * (rec.terminal_state - mean).transpose();
                }
            }
            cov /= std::max(ok - 1, 1);
            doc["mc_terminal_mean"] = std::vector<double>(mean.data(), mean.data() + env.dx);
            doc["mc_terminal_cov_fro_rel_err"] =
                (cov - target.target.cov()).norm() / target.target.cov().norm();
        }
        std::ofstream os(cfg.out_dir + "/cc.json");
        os << doc.dump(2) << '\n';
    }
    std::cout << "cc: converged=" << res.converged << " iterations=" << res.iterations
              << " terminal KL=" << (res.kl_trace.empty() ? -1.0 : res.kl_trace.back()) << '\n';
    return res.converged ? 0 : 2;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"stochastic optimal control toolkit"};
    app.require_subcommand(1);
    GlobalFlags flags;

    auto add_common = [&flags](CLI::App* sub) {
        sub->add_option("--config", flags.config_path, "JSON run config");
        sub->add_option("--seed", flags.seed, "override base seed");
        sub->add_option("--out", flags.out_dir, "override output directory");
        sub->add_option("--format", flags.format, "csv|json (default: both)");
    };

    CLI::App* solve_cmd = app.add_subcommand("solve", "solve a control problem");
    add_common(solve_cmd);
    CLI::App* rollout_cmd = app.add_subcommand("rollout", "Monte Carlo evaluation");
    add_common(rollout_cmd);
    rollout_cmd->add_option("--controller", flags.controller_path,
                            "saved controller to replay (default: solve first)");
    CLI::App* bench_cmd = app.add_subcommand("bench", "variant grid benchmark");
    add_common(bench_cmd);
    CLI::App* cc_cmd = app.add_subcommand("cc", "covariance control");
    add_common(cc_cmd);

    CLI11_PARSE(app, argc, argv);
    try {
        if (solve_cmd->parsed()) return run_solve(flags);
        if (rollout_cmd->parsed()) return run_rollout(flags);
        if (bench_cmd->parsed()) return run_bench(flags);
        if (cc_cmd->parsed()) return run_cc(flags);
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 1;
    }
    return 1;
}
