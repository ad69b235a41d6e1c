#include "soc/bench.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "json.hpp"
#include "soc/rng.hpp"

namespace soc {

namespace {

using nlohmann::json;

std::string fmt17(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

Mat noise_sqrt(const Mat& cov) {
    if (cov.size() == 0 || cov.trace() <= 0.0) return Mat::Zero(cov.rows(), cov.cols());
    return psd_sqrt(cov);
}

} // namespace

double nearest_rank_percentile(std::vector<double> values, double p) {
    if (values.empty()) throw LengthMismatch("percentile of empty set");
    if (!(p > 0.0 && p <= 1.0)) throw InvalidProbability(std::to_string(p));
    std::sort(values.begin(), values.end());
    const auto n = static_cast<double>(values.size());
    const auto rank = static_cast<std::size_t>(std::ceil(p * n));
    return values[std::max<std::size_t>(rank, 1) - 1];
}

RolloutReport rollout_eval(const EnvSpec& env, const CostModel& cost,
                           const LinearGaussianController& ctrl, const RolloutOptions& opts) {
    if (ctrl.horizon() != env.T) throw LengthMismatch("controller horizon vs env T");
    if (opts.n < 1) throw LengthMismatch("rollout count must be >= 1");
    RolloutReport report;
    const Mat noise_root = noise_sqrt(env.sigma_eta);
    const bool noisy = noise_root.cwiseAbs().maxCoeff() > 0.0;
    const Mat x0_root = noise_sqrt(env.x0.cov());

    for (int r = 0; r < opts.n; ++r) {
        Vec x = env.x0.mean();
        if (opts.sample_x0) {
            RandomStream s0{opts.seed, static_cast<std::uint64_t>(r), 0x783030ULL};
            x += x0_root * s0.normal_vector(env.dx);
        }
        std::vector<Vec> xs{x};
        std::vector<Vec> us;
        RolloutRecord rec;
        for (int t = 0; t < env.T && !rec.failed; ++t) {
            Vec u = ctrl.mean_action(t, x);
            if (opts.sample_controller) {
                const Gaussian dist = ctrl.action_distribution(t, x);
                RandomStream su{opts.seed, static_cast<std::uint64_t>(r),
                                static_cast<std::uint64_t>(t), 1ULL};
                u = dist.mean() + noise_sqrt(dist.cov()) * su.normal_vector(env.du);
            }
            us.push_back(u);
            try {
                if (noisy) {
                    RandomStream se{opts.seed, static_cast<std::uint64_t>(r),
                                    static_cast<std::uint64_t>(t), 0ULL};
                    const Vec eta = noise_root * se.normal_vector(env.dx);
                    x = env_step(env, x, u, &eta);
                } else {
                    x = env_step(env, x, u);
                }
            } catch (const NonFiniteState&) {
                rec.failed = true;
            }
            if (!rec.failed) xs.push_back(x);
        }
        rec.terminal_state = xs.back();
        if (!rec.failed) rec.cost = evaluate_cost(cost, xs, us);
        report.rollouts.push_back(rec);
        if (rec.failed) ++report.failures;
        if (opts.keep_trajectories) {
            report.state_trajectories.push_back(std::move(xs));
            report.input_trajectories.push_back(std::move(us));
        }
    }

    std::vector<double> costs;
    for (const auto& rec : report.rollouts) {
        if (!rec.failed) costs.push_back(rec.cost);
    }
    if (!costs.empty()) {
        report.p10 = nearest_rank_percentile(costs, 0.10);
        report.p90 = nearest_rank_percentile(costs, 0.90);
        double sum = 0.0;
        for (double c : costs) sum += c;
        report.mean = sum / static_cast<double>(costs.size());
        double ss = 0.0;
        for (double c : costs) ss += (c - report.mean) * (c - report.mean);
        report.stddev =
            costs.size() > 1 ? std::sqrt(ss / static_cast<double>(costs.size() - 1)) : 0.0;
    }
    return report;
}

namespace {

TransformKind transform_from_name(const std::string& s) {
    if (s == "cubature") return TransformKind::Cubature;
    if (s == "taylor1") return TransformKind::Taylor1;
    if (s == "exact-linear") return TransformKind::ExactLinear;
    throw Error("config: unknown transform '" + s + "'");
}

InferenceMode mode_from_name(const std::string& s) {
    if (s == "s" || s == "stochastic") return InferenceMode::Stochastic;
    if (s == "ce" || s == "certainty-equivalent") return InferenceMode::CertaintyEquivalent;
    throw Error("config: unknown inference mode '" + s + "'");
}

ControllerMode controller_from_name(const std::string& s) {
    if (s == "ff" || s == "feedforward") return ControllerMode::Feedforward;
    if (s == "fb" || s == "feedback") return ControllerMode::Feedback;
    if (s == "e" || s == "expert") return ControllerMode::Expert;
    throw Error("config: unknown controller mode '" + s + "'");
}

} // namespace

RunConfig parse_run_config(const std::string& json_text) {
    json j;
    try {
        j = json::parse(json_text);
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    RunConfig cfg;
    try {
        if (j.contains("env")) {
            const auto& e = j["env"];
            cfg.env_name = e.value("name", cfg.env_name);
            if (e.contains("T")) cfg.env_T = e["T"].get<int>();
            if (e.contains("dt")) cfg.env_dt = e["dt"].get<double>();
            if (e.contains("u_limit")) cfg.env_u_limit = e["u_limit"].get<double>();
            cfg.noise_scale = e.value("noise_scale", 1.0);
        }
        cfg.solver = j.value("solver", cfg.solver);
        if (j.contains("i2c")) {
            const auto& c = j["i2c"];
            if (c.contains("mode")) cfg.i2c.mode = mode_from_name(c["mode"].get<std::string>());
            if (c.contains("controller")) {
                cfg.i2c.controller_mode = controller_from_name(c["controller"].get<std::string>());
            }
            cfg.i2c.alpha0 = c.value("alpha0", cfg.i2c.alpha0);
            if (c.contains("alpha_update")) {
                const std::string u = c["alpha_update"].get<std::string>();
                if (u == "em") {
                    cfg.i2c.alpha_update = AlphaUpdate::Em;
                } else if (u == "fixed") {
                    cfg.i2c.alpha_update = AlphaUpdate::Fixed;
                } else {
                    throw Error("config: unknown alpha_update '" + u + "'");
                }
            }
            cfg.i2c.sigma_u = c.value("sigma_u", cfg.i2c.sigma_u);
            cfg.i2c.max_em_iters = c.value("max_em_iters", cfg.i2c.max_em_iters);
            cfg.i2c.e_step_sweeps = c.value("e_step_sweeps", cfg.i2c.e_step_sweeps);
            cfg.i2c.tol_loglik = c.value("tol_loglik", cfg.i2c.tol_loglik);
            cfg.i2c.tol_alpha = c.value("tol_alpha", cfg.i2c.tol_alpha);
            cfg.i2c.expert_p = c.value("expert_p", cfg.i2c.expert_p);
            if (c.contains("transform")) {
                cfg.i2c.transform.kind = transform_from_name(c["transform"].get<std::string>());
            }
        }
        if (j.contains("leqg")) cfg.leqg_sigma = j["leqg"].value("sigma", 0.0);
        if (j.contains("ilqr")) {
            const auto& c = j["ilqr"];
            cfg.ilqr.max_iters = c.value("max_iters", cfg.ilqr.max_iters);
            cfg.ilqr.tol = c.value("tol", cfg.ilqr.tol);
        }
        if (j.contains("cc")) {
            const auto& c = j["cc"];
            if (c.contains("target_mean")) {
                const auto v = c["target_mean"].get<std::vector<double>>();
                cfg.cc_target_mean = Eigen::Map<const Vec>(v.data(), v.size());
            }
            if (c.contains("target_cov")) {
                const auto rows = c["target_cov"].get<std::vector<std::vector<double>>>();
                cfg.cc_target_cov.resize(rows.size(), rows.empty() ? 0 : rows[0].size());
                for (std::size_t i = 0; i < rows.size(); ++i) {
                    for (std::size_t k = 0; k < rows[i].size(); ++k) {
                        cfg.cc_target_cov(static_cast<int>(i), static_cast<int>(k)) = rows[i][k];
                    }
                }
            }
            cfg.cc_schedule.beta0 = c.value("beta0", cfg.cc_schedule.beta0);
            cfg.cc_schedule.gamma = c.value("gamma", cfg.cc_schedule.gamma);
            cfg.cc_schedule.beta_floor = c.value("beta_floor", cfg.cc_schedule.beta_floor);
            cfg.cc_opts.max_outer = c.value("max_outer", cfg.cc_opts.max_outer);
            cfg.cc_opts.tol_kl = c.value("tol_kl", cfg.cc_opts.tol_kl);
        }
        if (j.contains("rollouts")) {
            const auto& c = j["rollouts"];
            cfg.rollouts.n = c.value("n", cfg.rollouts.n);
            cfg.rollouts.sample_x0 = c.value("sample_x0", cfg.rollouts.sample_x0);
            cfg.rollouts.sample_controller =
                c.value("sample_controller", cfg.rollouts.sample_controller);
            cfg.rollouts.keep_trajectories =
                c.value("keep_trajectories", cfg.rollouts.keep_trajectories);
        }
        if (j.contains("bench") && j["bench"].contains("variants")) {
            cfg.bench_variants = j["bench"]["variants"].get<std::vector<std::string>>();
        }
        cfg.seed = j.value("seed", std::uint64_t{0});
        cfg.out_dir = j.value("out", cfg.out_dir);
        if (j.contains("format")) {
            cfg.emit_csv = cfg.emit_json = false;
            for (const auto& f : j["format"]) {
                if (f.get<std::string>() == "csv") cfg.emit_csv = true;
                if (f.get<std::string>() == "json") cfg.emit_json = true;
            }
        }
        cfg.scale_1e3 = j.value("scale_1e3", false);
    } catch (const json::exception& e) {
        throw Error(std::string("config: ") + e.what());
    }
    cfg.rollouts.seed = cfg.seed;
    cfg.config_text = j.dump();
    return cfg;
}

RunConfig load_run_config(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open config " + path);
    std::stringstream ss;
    ss << is.rdbuf();
    return parse_run_config(ss.str());
}

EnvSpec configured_env(const RunConfig& cfg) {
    EnvSpec env = make_env(cfg.env_name);
    if (cfg.env_T) env.T = *cfg.env_T;
    if (cfg.env_dt) env.dt = *cfg.env_dt;
    if (cfg.env_u_limit) env.u_limit = Vec::Constant(env.du, *cfg.env_u_limit);
    env.sigma_eta *= cfg.noise_scale;
    return env;
}

VariantResult solve_variant(const EnvSpec& env, const std::string& variant,
                            const RunConfig& cfg) {
    VariantResult out;
    if (variant.rfind("i2c", 0) == 0) {
        I2cConfig icfg = cfg.i2c;
        std::stringstream ss(variant);
        std::string tok;
        std::vector<std::string> parts;
        while (std::getline(ss, tok, '-')) parts.push_back(tok);
        if (parts.size() == 3) {
            icfg.mode = mode_from_name(parts[1]);
            icfg.controller_mode = controller_from_name(parts[2]);
        } else if (parts.size() != 1) {
            throw Error("unknown i2c variant '" + variant + "'");
        }
        const DynamicsModel dyn = dynamics_model(env, true);
        const CostModel cost = default_cost(env);
        SolveResult sol = solve(dyn, cost, icfg);
        out.controller = std::move(sol.controller);
        out.solver_iterations = sol.diagnostics.iterations;
        out.converged = sol.diagnostics.converged;
        out.planned_cost = sol.diagnostics.planned_cost_trace.back();
        return out;
    }
    if (variant == "ilqr") {
        // Planning dynamics are unclamped; the optimizer owns the input box.
        EnvSpec unclamped = env;
        unclamped.u_limit = Vec::Constant(env.du, 1e12);
        const DynamicsModel dyn = dynamics_model(unclamped, false);
        const CostModel cost = default_cost(env);
        IlqrOptions opts = cfg.ilqr;
        opts.u_min = -env.u_limit;
        opts.u_max = env.u_limit;
        IlqrResult res = ilqr_solve(dyn, cost, env.x0.mean(),
                                    std::vector<Vec>(env.T, Vec::Zero(env.du)), opts);
        LinearGaussianController ctrl;
        ctrl.mode = ControllerMode::Feedback;
        ctrl.dx = env.dx;
        ctrl.du = env.du;
        for (int t = 0; t < env.T; ++t) {
            ControllerStage st;
            st.K = res.K[t];
            st.k = res.us[t] - res.K[t] * res.xs[t];
            st.cov_cond = Mat::Zero(env.du, env.du);
            st.u_mean = res.us[t];
            st.u_cov = Mat::Zero(env.du, env.du);
            st.x_mean = res.xs[t];
            st.x_cov = Mat::Identity(env.dx, env.dx);
            ctrl.stages.push_back(std::move(st));
        }
        out.controller = std::move(ctrl);
        out.solver_iterations = res.iterations;
        out.converged = res.converged;
        out.planned_cost = res.cost;
        return out;
    }
    if (variant == "lqr" || variant == "leqg") {
        if (!env.discrete_linear) {
            throw Error(variant + " variant requires a linear environment");
        }
        LqProblem lq = LqProblem::time_invariant(env.A, env.B, env.Q, env.R, env.QT, env.T,
                                                 env.x0, env.sigma_eta);
        lq.x_ref.assign(env.T, env.goal);
        lq.x_refT = env.goal;
        const auto [value, policy] =
            variant == "lqr" ? lqr_solve(lq) : leqg_solve(lq, cfg.leqg_sigma);
        const auto [xs, us] = policy_rollout(lq, policy, env.x0.mean());
        LinearGaussianController ctrl;
        ctrl.mode = ControllerMode::Feedback;
        ctrl.dx = env.dx;
        ctrl.du = env.du;
        for (int t = 0; t < env.T; ++t) {
            ControllerStage st;
            st.K = -policy.K[t];
            st.k = policy.k[t];
            st.cov_cond = Mat::Zero(env.du, env.du);
            st.u_mean = us[t];
            st.u_cov = Mat::Zero(env.du, env.du);
            st.x_mean = xs[t];
            st.x_cov = Mat::Identity(env.dx, env.dx);
            ctrl.stages.push_back(std::move(st));
        }
        out.controller = std::move(ctrl);
        out.solver_iterations = 1;
        out.converged = true;
        const double planned = evaluate_cost(default_cost(env), xs, us);
        out.planned_cost = planned;
        return out;
    }
    throw Error("unknown variant '" + variant + "'");
}

BenchTable run_benchmark(const RunConfig& cfg) {
    BenchTable table;
    const EnvSpec env = configured_env(cfg);
    const CostModel cost = default_cost(env);
    std::vector<std::string> variants = cfg.bench_variants;
    if (variants.empty()) variants = {"i2c-ce-e", "i2c-ce-fb", "i2c-ce-ff", "ilqr"};
    for (const auto& variant : variants) {
        CellResult cell;
        cell.env = env.name;
        cell.variant = variant;
        const auto start = std::chrono::steady_clock::now();
        try {
            const VariantResult vr = solve_variant(env, variant, cfg);
            const RolloutReport report = rollout_eval(env, cost, vr.controller, cfg.rollouts);
            cell.ok = true;
            cell.p10 = report.p10;
            cell.p90 = report.p90;
            cell.mean = report.mean;
            cell.stddev = report.stddev;
            cell.failures = report.failures;
            cell.solver_iterations = vr.solver_iterations;
        } catch (const std::exception& e) {
            cell.ok = false;
            cell.error = e.what();
        }
        cell.wall_ms = std::chrono::duration<double, std::milli>(
                           std::chrono::steady_clock::now() - start)
                           .count();
        table.cells.push_back(std::move(cell));
    }
    return table;
}

namespace {

double display_scale(const RunConfig& cfg) { return cfg.scale_1e3 ? 1e-3 : 1.0; }

void ensure_parent(const std::string& path) {
    const auto parent = std::filesystem::path(path).parent_path();
    if (!parent.empty()) std::filesystem::create_directories(parent);
}

} // namespace

void write_bench_csv(const BenchTable& table, const RunConfig& cfg, const std::string& path) {
    ensure_parent(path);
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    const double s = display_scale(cfg);
    os << "env,variant,ok,p10,p90,mean,stddev,failures,solver_iterations,error\n";
    for (const auto& c : table.cells) {
        os << c.env << ',' << c.variant << ',' << (c.ok ? 1 : 0) << ','
           << fmt17(c.p10 * s) << ',' << fmt17(c.p90 * s) << ',' << fmt17(c.mean * s) << ','
           << fmt17(c.stddev * s) << ',' << c.failures << ',' << c.solver_iterations << ','
           << c.error << '\n';
    }
    if (!os) throw IoError("write failed: " + path);
}

void write_bench_json(const BenchTable& table, const RunConfig& cfg, const std::string& path) {
    ensure_parent(path);
    json doc;
    doc["config"] = json::parse(cfg.config_text.empty() ? "{}" : cfg.config_text);
    doc["config_sha1"] = sha1_hex(cfg.config_text);
    doc["metadata"] = {{"rng", RandomStream::kAlgorithm},
                       {"percentile", "nearest-rank"},
                       {"cost_scale", display_scale(cfg)}};
    doc["results"] = json::array();
    const double s = display_scale(cfg);
    for (const auto& c : table.cells) {
        json cell = {{"env", c.env},
                     {"variant", c.variant},
                     {"ok", c.ok},
                     {"p10", c.p10 * s},
                     {"p90", c.p90 * s},
                     {"mean", c.mean * s},
                     {"stddev", c.stddev * s},
                     {"failures", c.failures},
                     {"solver_iterations", c.solver_iterations},
                     {"wall_ms", c.wall_ms}};
        if (!c.ok) cell["error"] = c.error;
        doc["results"].push_back(cell);
    }
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << doc.dump(2) << '\n';
    if (!os) throw IoError("write failed: " + path);
}

void emit_trajectories(const RolloutReport& report, const Posterior& posterior,
                       const std::string& dir) {
    std::filesystem::create_directories(dir);
    const int dx = posterior.smoothed.empty() ? posterior.terminal.dim()
                                              : posterior.smoothed.front().block_dim(0);
    {
        std::ofstream os(dir + "/plan.csv");
        if (!os) throw IoError("cannot open " + dir + "/plan.csv");
        os << "t";
        for (int i = 0; i < dx; ++i) os << ",mu_" << i;
        for (int i = 0; i < dx; ++i) {
            for (int k = i; k < dx; ++k) os << ",cov_" << i << '_' << k;
        }
        os << '\n';
        auto write_row = [&](int t, const Vec& mu, const Mat& cov) {
            os << t;
            for (int i = 0; i < dx; ++i) os << ',' << fmt17(mu(i));
            for (int i = 0; i < dx; ++i) {
                for (int k = i; k < dx; ++k) os << ',' << fmt17(cov(i, k));
            }
            os << '\n';
        };
        for (int t = 0; t < posterior.T; ++t) {
            write_row(t, posterior.smoothed[t].block_mean(0), posterior.smoothed[t].block_cov(0));
        }
        write_row(posterior.T, posterior.terminal.mean(), posterior.terminal.cov());
        if (!os) throw IoError("write failed: plan.csv");
    }
    {
        std::ofstream os(dir + "/rollouts.csv");
        if (!os) throw IoError("cannot open " + dir + "/rollouts.csv");
        const int du = report.input_trajectories.empty() || report.input_trajectories[0].empty()
                           ? 0
                           : static_cast<int>(report.input_trajectories[0][0].size());
        os << "rollout,t";
        for (int i = 0; i < dx; ++i) os << ",x_" << i;
        for (int i = 0; i < du; ++i) os << ",u_" << i;
        os << '\n';
        for (std::size_t r = 0; r < report.state_trajectories.size(); ++r) {
            const auto& xs = report.state_trajectories[r];
            const auto& us = report.input_trajectories[r];
            for (std::size_t t = 0; t < xs.size(); ++t) {
                os << r << ',' << t;
                for (int i = 0; i < dx; ++i) os << ',' << fmt17(xs[t](i));
                for (int i = 0; i < du; ++i) {
                    if (t < us.size()) {
                        os << ',' << fmt17(us[t](i));
                    } else {
                        os << ',';
                    }
                }
                os << '\n';
            }
        }
        if (!os) throw IoError("write failed: rollouts.csv");
    }
}

void write_rollout_json(const RolloutReport& report, const RunConfig& cfg,
                        const std::string& path) {
    ensure_parent(path);
    json doc;
    doc["config"] = json::parse(cfg.config_text.empty() ? "{}" : cfg.config_text);
    doc["config_sha1"] = sha1_hex(cfg.config_text);
    doc["metadata"] = {{"rng", RandomStream::kAlgorithm}, {"percentile", "nearest-rank"}};
    const double s = display_scale(cfg);
    doc["summary"] = {{"p10", report.p10 * s}, {"p90", report.p90 * s},
                      {"mean", report.mean * s}, {"stddev", report.stddev * s},
                      {"failures", report.failures},
                      {"n", static_cast<int>(report.rollouts.size())}};
    doc["costs"] = json::array();
    for (const auto& rec : report.rollouts) {
        doc["costs"].push_back(rec.failed ? json(nullptr) : json(rec.cost * s));
    }
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path);
    os << doc.dump(2) << '\n';
    if (!os) throw IoError("write failed: " + path);
}

// ---------------------------------------------------------------------------
// SHA-1 (for git-style config content hashes in run metadata)

namespace {

struct Sha1 {
    std::uint32_t h[5] = {0x67452301u, 0xEFCDAB89u, 0x98BADCFEu, 0x10325476u, 0xC3D2E1F0u};
    std::uint64_t total = 0;
    unsigned char block[64];
    std::size_t fill = 0;

    static std::uint32_t rol(std::uint32_t x, int s) { return (x << s) | (x >> (32 - s)); }

    void process(const unsigned char* p) {
        std::uint32_t w[80];
        for (int i = 0; i < 16; ++i) {
            w[i] = (std::uint32_t(p[4 * i]) << 24) | (std::uint32_t(p[4 * i + 1]) << 16) |
                   (std::uint32_t(p[4 * i + 2]) << 8) | std::uint32_t(p[4 * i + 3]);
        }
        for (int i = 16; i < 80; ++i) w[i] = rol(w[i - 3] ^ w[i - 8] ^ w[i - 14] ^ w[i - 16], 1);
        std::uint32_t a = h[0], b = h[1], c = h[2], d = h[3], e = h[4];
        for (int i = 0; i < 80; ++i) {
            std::uint32_t f, k;
            if (i < 20) {
                f = (b & c) | (~b & d);
                k = 0x5A827999u;
            } else if (i < 40) {
                f = b ^ c ^ d;
                k = 0x6ED9EBA1u;
            } else if (i < 60) {
                f = (b & c) | (b & d) | (c & d);
                k = 0x8F1BBCDCu;
            } else {
                f = b ^ c ^ d;
                k = 0xCA62C1D6u;
            }
            const std::uint32_t tmp = rol(a, 5) + f + e + k + w[i];
            e = d;
            d = c;
            c = rol(b, 30);
            b = a;
            a = tmp;
        }
        h[0] += a;
        h[1] += b;
        h[2] += c;
        h[3] += d;
        h[4] += e;
    }

    void update(const unsigned char* p, std::size_t n) {
        total += n;
        while (n > 0) {
            const std::size_t take = std::min(n, sizeof(block) - fill);
            std::copy(p, p + take, block + fill);
            fill += take;
            p += take;
            n -= take;
            if (fill == sizeof(block)) {
                process(block);
                fill = 0;
            }
        }
    }

    std::string finish() {
        const std::uint64_t bits = total * 8;
        const unsigned char one = 0x80;
        update(&one, 1);
        const unsigned char zero = 0x00;
        while (fill != 56) update(&zero, 1);
        unsigned char len[8];
        for (int i = 0; i < 8; ++i) len[i] = static_cast<unsigned char>(bits >> (56 - 8 * i));
        update(len, 8);
        char out[41];
        for (int i = 0; i < 5; ++i) std::snprintf(out + 8 * i, 9, "%08x", h[i]);
        return std::string(out, 40);
    }
};

} // namespace

std::string sha1_hex(const std::string& content) {
    Sha1 sha;
    const std::string header = "blob " + std::to_string(content.size());
    sha.update(reinterpret_cast<const unsigned char*>(header.data()), header.size() + 1);
    sha.update(reinterpret_cast<const unsigned char*>(content.data()), content.size());
    return sha.finish();
}

} // namespace soc
