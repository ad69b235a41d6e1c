#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "soc/baselines.hpp"
#include "soc/covcontrol.hpp"
#include "soc/envs.hpp"

namespace soc {

struct RolloutOptions {
    int n = 100;
    std::uint64_t seed = 0;
    bool sample_x0 = false;         // default: start rollouts at the x0 mean
    bool sample_controller = false; // default: execute mean actions
    bool keep_trajectories = false;
};

struct RolloutRecord {
    double cost = 0.0;
    bool failed = false;
    Vec terminal_state;
};

/// Realized-cost summary over seeded Monte Carlo rollouts. Percentiles use the
/// nearest-rank method (ceil(p*N)-th order statistic) over successful
/// rollouts.
struct RolloutReport {
    std::vector<RolloutRecord> rollouts;
    std::vector<std::vector<Vec>> state_trajectories; // when requested
    std::vector<std::vector<Vec>> input_trajectories; // commanded inputs
    double p10 = 0.0, p90 = 0.0, mean = 0.0, stddev = 0.0;
    int failures = 0;
};

double nearest_rank_percentile(std::vector<double> values, double p);

/// N seeded rollouts of the controller on the environment. Process noise per
/// (seed, rollout, stage) comes from a counter-based stream, so results do not
/// depend on evaluation order. Costs follow the commanded-input convention:
/// dynamics see the clamped input, the cost sees the command.
RolloutReport rollout_eval(const EnvSpec& env, const CostModel& cost,
                           const LinearGaussianController& ctrl, const RolloutOptions& opts);

/// Everything a run needs, parsed from one JSON config file. CLI flags
/// override file values.
struct RunConfig {
    std::string env_name = "pendulum";
    std::optional<int> env_T;
    std::optional<double> env_dt;
    std::optional<double> env_u_limit;
    double noise_scale = 1.0;

    std::string solver = "i2c";
    I2cConfig i2c;
    double leqg_sigma = 0.0;
    IlqrOptions ilqr;

    Vec cc_target_mean;
    Mat cc_target_cov;
    AnnealSchedule cc_schedule;
    CcOptions cc_opts;

    RolloutOptions rollouts;
    std::vector<std::string> bench_variants;

    std::uint64_t seed = 0;
    std::string out_dir = "out";
    bool emit_csv = true;
    bool emit_json = true;
    bool scale_1e3 = false; // display costs in units of 10^3

    std::string config_text; // canonical echo used for the content hash
};

RunConfig parse_run_config(const std::string& json_text);
RunConfig load_run_config(const std::string& path);

EnvSpec configured_env(const RunConfig& cfg);

/// Solve one benchmark variant ("i2c-ce-e", "i2c-s-fb", "ilqr", "lqr",
/// "leqg") on the environment, returning an executable controller.
struct VariantResult {
    LinearGaussianController controller;
    int solver_iterations = 0;
    bool converged = false;
    double planned_cost = 0.0;
};

VariantResult solve_variant(const EnvSpec& env, const std::string& variant,
                            const RunConfig& cfg);

struct CellResult {
    std::string env;
    std::string variant;
    bool ok = false;
    std::string error;
    double p10 = 0.0, p90 = 0.0, mean = 0.0, stddev = 0.0;
    int failures = 0;
    int solver_iterations = 0;
    double wall_ms = 0.0; // excluded from the byte-determinism contract
};

struct BenchTable {
    std::vector<CellResult> cells;
};

/// Runs the variant grid; individual cell failures are recorded, never fatal.
BenchTable run_benchmark(const RunConfig& cfg);

/// CSV/JSON artifacts. All numerics print with 17 significant digits.
void write_bench_csv(const BenchTable& table, const RunConfig& cfg, const std::string& path);
void write_bench_json(const BenchTable& table, const RunConfig& cfg, const std::string& path);

/// plan.csv: per-stage smoothed mean and covariance (upper triangle);
/// rollouts.csv: per-rollout realized states and commanded inputs.
void emit_trajectories(const RolloutReport& report, const Posterior& posterior,
                       const std::string& dir);

void write_rollout_json(const RolloutReport& report, const RunConfig& cfg,
                        const std::string& path);

/// Git-style SHA-1 content hash ("blob <len>\0" + content), hex digest.
std::string sha1_hex(const std::string& content);

} // namespace soc
