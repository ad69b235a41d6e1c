#include "soc/i2c.hpp"

#include <cmath>
#include <fstream>
#include <iomanip>
#include <sstream>

#include "soc/covcontrol.hpp"
#include "soc/rng.hpp"

namespace soc {

void I2cConfig::validate() const {
    if (!(alpha0 > 0.0)) throw NonPositiveAlpha("alpha0");
    if (!(expert_p > 0.0 && expert_p < 1.0)) throw InvalidProbability("expert_p");
    if (!(tol_loglik > 0.0 && tol_alpha > 0.0)) throw Error("tolerances must be positive");
    if (!(sigma_u > 0.0)) throw Error("sigma_u must be positive");
    if (max_em_iters < 1 || e_step_sweeps < 1) throw Error("iteration counts must be >= 1");
}

std::vector<Vec> Posterior::mean_states() const {
    std::vector<Vec> xs;
    xs.reserve(T + 1);
    for (const auto& j : smoothed) xs.push_back(j.block_mean(0));
    xs.push_back(terminal.mean());
    return xs;
}

std::vector<Vec> Posterior::mean_inputs() const {
    std::vector<Vec> us;
    us.reserve(T);
    for (const auto& j : smoothed) us.push_back(j.block_mean(1));
    return us;
}

namespace {

// Clip rounding-level negative eigenvalues; anything materially indefinite is
// a diverged belief.
Mat repair_psd(const Mat& cov) {
    Eigen::SelfAdjointEigenSolver<Mat> es(symmetrize(cov));
    const double hi = std::max(es.eigenvalues().maxCoeff(), 0.0);
    const double lo = es.eigenvalues().minCoeff();
    if (!std::isfinite(hi) || lo < -1e-6 * std::max(hi, 1e-12)) {
        throw DivergedInference("belief covariance indefinite (min eig " +
                                std::to_string(lo) + ")");
    }
    if (lo >= 0.0) return symmetrize(cov);
    const Vec lam = es.eigenvalues().cwiseMax(0.0);
    return symmetrize(es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose());
}

Gaussian make_belief(const Vec& mean, const Mat& cov) {
    if (!mean.allFinite()) throw DivergedInference("belief mean non-finite");
    return Gaussian(mean, repair_psd(cov));
}

// Stage prior over (x, u): independent input prior, or the previous
// controller's conditional (optionally confidence-gated against its own
// nominal belief) for closed-loop optimization.
JointGaussian join_stage(const Gaussian& bx, const I2cConfig& cfg,
                         const LinearGaussianController* join, int t, int du) {
    const Gaussian input_prior(Vec::Zero(du),
                               cfg.sigma_u * cfg.sigma_u * Mat::Identity(du, du));
    if (join == nullptr || cfg.controller_mode == ControllerMode::Feedforward) {
        return JointGaussian::independent({bx, input_prior});
    }
    const ControllerStage& st = join->stages.at(t);
    double w = 1.0;
    if (cfg.controller_mode == ControllerMode::Expert) {
        w = membership_weight(Gaussian(st.x_mean, st.x_cov), bx.mean(), cfg.expert_p);
    }
    const Mat K = w * st.K;
    const Vec k = w * st.k; // open-loop prior mean is zero
    const Mat cond = w * st.cov_cond +
                     (1.0 - w) * cfg.sigma_u * cfg.sigma_u * Mat::Identity(du, du);
    const int dx = bx.dim();
    Vec mean(dx + du);
    mean << bx.mean(), K * bx.mean() + k;
    Mat cov(dx + du, dx + du);
    cov.topLeftCorner(dx, dx) = bx.cov();
    cov.topRightCorner(dx, du) = bx.cov() * K.transpose();
    cov.bottomLeftCorner(du, dx) = K * bx.cov();
    cov.bottomRightCorner(du, du) = K * bx.cov() * K.transpose() + cond;
    return JointGaussian(make_belief(mean, cov), {dx, du});
}

struct MeasurementUpdate {
    Gaussian updated;
    double loglik = 0.0;
};

MeasurementUpdate measurement_update(const Gaussian& belief, const AffineApprox& obs,
                                     const Mat& noise, const Vec& z) {
    const Mat& H = obs.J;
    const Mat R = noise + obs.omega;
    const Vec zhat = H * belief.mean() + obs.c;
    const Mat S = symmetrize(H * belief.cov() * H.transpose() + R);
    const Mat gain = psd_solve(S, H * belief.cov()).transpose(); // Sigma H^T S^-1
    const Vec mean = belief.mean() + gain * (z - zhat);
    const int n = belief.dim();
    const Mat ikh = Mat::Identity(n, n) - gain * H;
    const Mat cov = ikh * belief.cov() * ikh.transpose() + gain * R * gain.transpose();
    MeasurementUpdate out{make_belief(mean, cov)};
    out.loglik = Gaussian(zhat, S).logpdf(z);
    return out;
}

double expected_weighted_residual(const MomentTransform& mt, const StageMap& map,
                                  const Gaussian& belief, const Vec& z, const Mat& W) {
    const TransformResult tr = transform_moments(mt, map, belief);
    const Vec d = tr.out.mean() - z;
    return (W * tr.out.cov()).trace() + d.dot(W * d);
}

} // namespace

Posterior e_step(const DynamicsModel& dyn, const CostModel& cost, const I2cConfig& cfg,
                 const Posterior* warm, const LinearGaussianController* join,
                 const TerminalClamp* clamp) {
    cfg.validate();
    if (dyn.T != cost.T || dyn.dx != cost.dx || dyn.du != cost.du) {
        throw ShapeMismatch("dynamics/cost disagree");
    }
    const int T = dyn.T;
    const int dx = dyn.dx;
    const int du = dyn.du;
    const double alpha = warm != nullptr ? warm->alpha : cfg.alpha0;
    if (!(alpha > 0.0)) throw NonPositiveAlpha("e_step alpha");
    const LikelihoodNoise xi = cost_to_likelihood(cost, alpha);
    const Mat proc_jitter = cfg.ce_jitter * Mat::Identity(dx, dx);

    // Statistical-linearization references: previous posterior when warm,
    // otherwise the running forward beliefs of the first sweep.
    std::optional<Posterior> prev;
    Posterior post;

    for (int sweep = 0; sweep < cfg.e_step_sweeps; ++sweep) {
        const Posterior* ref = prev.has_value() ? &*prev : warm;
        post = Posterior{};
        post.alpha = alpha;
        post.T = T;
        post.smoothed.reserve(T);
        post.filtered.reserve(T);
        post.predicted.reserve(T);
        post.cross.reserve(T);

        std::vector<AffineApprox> fwd_dyn(T);
        Gaussian bx = dyn.x0;
        for (int t = 0; t < T; ++t) {
            const JointGaussian prior = join_stage(bx, cfg, join, t, du);

            const Gaussian& ref_g = ref != nullptr ? ref->smoothed[t].full() : prior.full();
            const AffineApprox obs = slr(cfg.transform, cost.stage_map(t), ref_g);
            MeasurementUpdate up =
                measurement_update(prior.full(), obs, xi.stage[t], cost.z(t));
            post.log_likelihood += up.loglik;
            post.filtered.emplace_back(up.updated, std::vector<int>{dx, du});

            const Gaussian& ref_f =
                ref != nullptr ? ref->smoothed[t].full() : post.filtered.back().full();
            const AffineApprox fdyn = slr(cfg.transform, dyn.stage_map(t), ref_f);
            fwd_dyn[t] = fdyn;
            const Mat proc = cfg.mode == InferenceMode::Stochastic
                                 ? Mat(dyn.noise_cov(t))
                                 : proc_jitter;
            const Mat& sf = post.filtered.back().full().cov();
            const Vec pm = fdyn.J * post.filtered.back().full().mean() + fdyn.c;
            const Mat pc = fdyn.J * sf * fdyn.J.transpose() + fdyn.omega + proc;
            post.predicted.push_back(make_belief(pm, pc));
            post.cross.push_back(sf * fdyn.J.transpose());
            bx = post.predicted.back();
        }

        // Terminal boundary: clamped target product or observation update.
        if (clamp != nullptr) {
            post.terminal = clamp_terminal(bx, TerminalTarget(clamp->target), clamp->beta);
        } else if (cost.dzT > 0) {
            const Gaussian& ref_T = ref != nullptr ? ref->terminal : bx;
            const AffineApprox obs = slr(cfg.transform, cost.terminal_map(), ref_T);
            MeasurementUpdate up = measurement_update(bx, obs, xi.terminal, cost.zT);
            post.log_likelihood += up.loglik;
            post.terminal = up.updated;
        } else {
            post.terminal = bx;
        }

        // Rauch-Tung-Striebel pass over the stage joints.
        Gaussian next = post.terminal;
        post.smoothed.assign(post.filtered.begin(), post.filtered.end());
        for (int t = T - 1; t >= 0; --t) {
            const Mat gain = psd_solve(post.predicted[t].cov(), post.cross[t].transpose())
                                 .transpose();
            const Vec mean = post.filtered[t].full().mean() +
                             gain * (next.mean() - post.predicted[t].mean());
            const Mat cov = post.filtered[t].full().cov() +
                            gain * (next.cov() - post.predicted[t].cov()) * gain.transpose();
            post.smoothed[t] = JointGaussian(make_belief(mean, cov), {dx, du});
            next = post.smoothed[t].marginal(0);
        }
        if (sweep + 1 < cfg.e_step_sweeps) prev = post; // relinearize around this posterior
    }

    // Expected weighted residuals under the smoothed beliefs (M-step input).
    post.residual_dof = 0.0;
    for (int t = 0; t < T; ++t) {
        post.residual_expect.push_back(expected_weighted_residual(
            cfg.transform, cost.stage_map(t), post.smoothed[t].full(), cost.z(t),
            cost.W(t)));
        post.residual_dof += cost.dz;
    }
    if (clamp == nullptr && cost.dzT > 0) {
        post.residual_expect.push_back(expected_weighted_residual(
            cfg.transform, cost.terminal_map(), post.terminal, cost.zT, cost.WT));
        post.residual_dof += cost.dzT;
    }
    return post;
}

double m_step_alpha(const Posterior& post, const CostModel&, const I2cConfig& cfg) {
    double total = 0.0;
    for (double r : post.residual_expect) total += r;
    if (!(total > 1e-300)) return cfg.alpha_max; // perfectly reconstructed trajectory
    const double alpha = post.residual_dof / total;
    return std::min(std::max(alpha, cfg.alpha_min), cfg.alpha_max);
}

LinearGaussianController extract_controller(const Posterior& post, ControllerMode mode,
                                            double expert_p) {
    LinearGaussianController ctrl;
    ctrl.mode = mode;
    ctrl.expert_p = expert_p;
    ctrl.stages.reserve(post.T);
    for (const auto& joint : post.smoothed) {
        const int dx = joint.block_dim(0);
        const int du = joint.block_dim(1);
        ctrl.dx = dx;
        ctrl.du = du;
        ControllerStage st;
        st.u_mean = joint.block_mean(1);
        st.u_cov = joint.block_cov(1);
        st.x_mean = joint.block_mean(0);
        st.x_cov = joint.block_cov(0);
        if (mode == ControllerMode::Feedforward) {
            st.K = Mat::Zero(du, dx);
            st.k = st.u_mean;
            st.cov_cond = st.u_cov;
        } else {
            const Mat sxx = joint.block_cov(0);
            const Mat sxu = joint.cross(0, 1);
            st.K = psd_solve(sxx, sxu).transpose(); // Sigma_ux Sigma_xx^-1
            st.k = st.u_mean - st.K * st.x_mean;
            st.cov_cond = symmetrize(st.u_cov - st.K * sxu);
            Eigen::SelfAdjointEigenSolver<Mat> es(st.cov_cond);
            const Vec lam = es.eigenvalues().cwiseMax(0.0);
            st.cov_cond = symmetrize(es.eigenvectors() * lam.asDiagonal() *
                                     es.eigenvectors().transpose());
        }
        ctrl.stages.push_back(std::move(st));
    }
    return ctrl;
}

double LinearGaussianController::weight(int t, const Vec& x) const {
    switch (mode) {
        case ControllerMode::Feedforward: return 0.0;
        case ControllerMode::Feedback: return 1.0;
        case ControllerMode::Expert: {
            const ControllerStage& st = stages.at(t);
            return membership_weight(Gaussian(st.x_mean, st.x_cov), x, expert_p);
        }
    }
    return 1.0;
}

Gaussian LinearGaussianController::action_distribution(int t, const Vec& x) const {
    if (t < 0 || t >= horizon()) throw StageOutOfRange("controller stage " + std::to_string(t));
    const ControllerStage& st = stages[t];
    const double w = weight(t, x);
    const Vec mean = w * (st.k + st.K * x) + (1.0 - w) * st.u_mean;
    const Mat cov = w * st.cov_cond + (1.0 - w) * st.u_cov;
    return Gaussian(mean, cov);
}

Vec LinearGaussianController::mean_action(int t, const Vec& x) const {
    return action_distribution(t, x).mean();
}

Vec control(const LinearGaussianController& ctrl, int t, const Vec& x, bool sample,
            std::uint64_t seed) {
    const Gaussian dist = ctrl.action_distribution(t, x);
    if (!sample) return dist.mean();
    RandomStream stream{seed, static_cast<std::uint64_t>(t), 0x61637431ULL};
    return dist.mean() + psd_sqrt(dist.cov()) * stream.normal_vector(dist.dim());
}

SolveResult solve(const DynamicsModel& dyn, const CostModel& cost, const I2cConfig& cfg) {
    cfg.validate();
    SolveResult res;
    const Posterior* warm = nullptr;
    const LinearGaussianController* join = nullptr;
    double prev_ll = 0.0, prev_alpha = cfg.alpha0;

    for (int iter = 0; iter < cfg.max_em_iters; ++iter) {
        res.posterior = e_step(dyn, cost, cfg, warm, join, nullptr);
        const double alpha_new = cfg.alpha_update == AlphaUpdate::Em
                                     ? m_step_alpha(res.posterior, cost, cfg)
                                     : res.posterior.alpha;
        res.controller = extract_controller(res.posterior, cfg.controller_mode, cfg.expert_p);

        res.diagnostics.alpha_trace.push_back(alpha_new);
        res.diagnostics.loglik_trace.push_back(res.posterior.log_likelihood);
        res.diagnostics.planned_cost_trace.push_back(
            evaluate_cost(cost, res.posterior.mean_states(), res.posterior.mean_inputs()));
        res.diagnostics.iterations = iter + 1;

        const bool ll_done =
            iter > 0 && std::abs(res.posterior.log_likelihood - prev_ll) <=
                            cfg.tol_loglik * std::max(1.0, std::abs(prev_ll));
        const bool alpha_done =
            std::abs(alpha_new - prev_alpha) <= cfg.tol_alpha * std::max(prev_alpha, 1e-300);
        prev_ll = res.posterior.log_likelihood;
        prev_alpha = alpha_new;
        res.posterior.alpha = alpha_new;
        warm = &res.posterior;
        if (cfg.controller_mode != ControllerMode::Feedforward) join = &res.controller;
        if (ll_done && alpha_done) {
            res.diagnostics.converged = true;
            break;
        }
    }
    return res;
}

std::vector<RiskStageReport> risk_equivalent_sigma(const DynamicsModel& dyn,
                                                   const Posterior& post, double sigma) {
    if (!dyn.linear) throw LinearOnly("risk_equivalent_sigma");
    const LqProblem& lq = *dyn.linear;
    std::vector<RiskStageReport> out;
    out.reserve(post.T);
    for (int t = 0; t < post.T; ++t) {
        Mat F(lq.dx, lq.dx + lq.du);
        F << lq.A[t], lq.B[t];
        const Mat zero = Mat::Zero(lq.dx, lq.dx);
        const Gaussian fwd = propagate_linear(post.filtered[t].full(), F, lq.c[t], zero);
        const Gaussian smo = propagate_linear(post.smoothed[t].full(), F, lq.c[t], zero);
        RiskStageReport r;
        r.lambda_fwd_prenoise = psd_inverse(fwd.cov());
        r.lambda_post_prenoise = psd_inverse(smo.cov());
        r.lambda_bwd_prenoise = symmetrize(r.lambda_post_prenoise - r.lambda_fwd_prenoise);
        const Gaussian next =
            t + 1 < post.T ? post.smoothed[t + 1].marginal(0) : post.terminal;
        r.lambda_post_next = psd_inverse(next.cov());
        const Mat bwd_cov = psd_inverse(r.lambda_bwd_prenoise);
        r.effective_noise = symmetrize(next.cov() - bwd_cov);
        // Either sign of sigma may leave the PD cone; report whatever the
        // transform produces rather than failing the diagnostic.
        r.leqg_precision_pos = Mat((bwd_cov + sigma * lq.noise[t]).inverse());
        r.leqg_precision_neg = Mat((bwd_cov - sigma * lq.noise[t]).inverse());
        out.push_back(std::move(r));
    }
    return out;
}

namespace {

void write_matrix(std::ostream& os, const char* name, const Mat& m) {
    os << name;
    for (int i = 0; i < m.rows(); ++i) {
        for (int j = 0; j < m.cols(); ++j) os << ' ' << std::setprecision(17) << m(i, j);
    }
    os << '\n';
}

Mat read_matrix(std::istream& is, const char* name, int rows, int cols) {
    std::string tag;
    is >> tag;
    if (tag != name) throw IoError("controller file: expected field '" + std::string(name) +
                                   "', got '" + tag + "'");
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) {
        for (int j = 0; j < cols; ++j) {
            if (!(is >> m(i, j))) throw IoError("controller file: truncated matrix");
        }
    }
    return m;
}

const char* mode_name(ControllerMode m) {
    switch (m) {
        case ControllerMode::Feedforward: return "ff";
        case ControllerMode::Feedback: return "fb";
        case ControllerMode::Expert: return "expert";
    }
    return "fb";
}

ControllerMode mode_from_name(const std::string& s) {
    if (s == "ff") return ControllerMode::Feedforward;
    if (s == "fb") return ControllerMode::Feedback;
    if (s == "expert") return ControllerMode::Expert;
    throw IoError("unknown controller mode '" + s + "'");
}

} // namespace

void save_controller(const LinearGaussianController& ctrl, const std::string& path) {
    std::ofstream os(path);
    if (!os) throw IoError("cannot open " + path + " for writing");
    os << "# linear-gaussian controller v1\n"
       << "# per stage, row-major, fields in order: K (du x dx), k (du), "
          "cov_cond (du x du), u_mean (du), u_cov (du x du), x_mean (dx), "
          "x_cov (dx x dx)\n";
    os << "mode " << mode_name(ctrl.mode) << '\n';
    os << "expert_p " << std::setprecision(17) << ctrl.expert_p << '\n';
    os << "T " << ctrl.horizon() << " dx " << ctrl.dx << " du " << ctrl.du << '\n';
    for (int t = 0; t < ctrl.horizon(); ++t) {
        const ControllerStage& st = ctrl.stages[t];
        os << "stage " << t << '\n';
        write_matrix(os, "K", st.K);
        write_matrix(os, "k", st.k);
        write_matrix(os, "cov_cond", st.cov_cond);
        write_matrix(os, "u_mean", st.u_mean);
        write_matrix(os, "u_cov", st.u_cov);
        write_matrix(os, "x_mean", st.x_mean);
        write_matrix(os, "x_cov", st.x_cov);
    }
    if (!os) throw IoError("write failed: " + path);
}

LinearGaussianController load_controller(const std::string& path) {
    std::ifstream is(path);
    if (!is) throw IoError("cannot open " + path);
    std::string line;
    while (is.peek() == '#') std::getline(is, line);
    LinearGaussianController ctrl;
    std::string tag, mode;
    int T = 0;
    is >> tag >> mode;
    if (tag != "mode") throw IoError("controller file: missing mode");
    ctrl.mode = mode_from_name(mode);
    is >> tag >> ctrl.expert_p;
    if (tag != "expert_p") throw IoError("controller file: missing expert_p");
    is >> tag >> T;
    is >> tag >> ctrl.dx;
    is >> tag >> ctrl.du;
    for (int t = 0; t < T; ++t) {
        int idx = 0;
        is >> tag >> idx;
        if (tag != "stage" || idx != t) throw IoError("controller file: bad stage marker");
        ControllerStage st;
        st.K = read_matrix(is, "K", ctrl.du, ctrl.dx);
        st.k = read_matrix(is, "k", ctrl.du, 1);
        st.cov_cond = read_matrix(is, "cov_cond", ctrl.du, ctrl.du);
        st.u_mean = read_matrix(is, "u_mean", ctrl.du, 1);
        st.u_cov = read_matrix(is, "u_cov", ctrl.du, ctrl.du);
        st.x_mean = read_matrix(is, "x_mean", ctrl.dx, 1);
        st.x_cov = read_matrix(is, "x_cov", ctrl.dx, ctrl.dx);
        ctrl.stages.push_back(std::move(st));
    }
    return ctrl;
}

} // namespace soc
