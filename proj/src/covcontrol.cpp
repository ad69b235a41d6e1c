#include "soc/covcontrol.hpp"

#include <cmath>

namespace soc {

TerminalTarget::TerminalTarget(Gaussian g) : target(std::move(g)) {
    Eigen::SelfAdjointEigenSolver<Mat> es(target.cov(), Eigen::EigenvaluesOnly);
    if (es.eigenvalues().minCoeff() <= 0.0) {
        throw NonPsdInput("terminal target covariance must be positive definite");
    }
}

void AnnealSchedule::validate() const {
    if (!(beta0 > 0.0 && beta0 <= 1.0)) throw Error("beta0 must lie in (0, 1]");
    if (!(gamma > 0.0 && gamma < 1.0)) throw Error("gamma must lie in (0, 1)");
    if (beta_floor < 0.0) throw Error("beta_floor must be nonnegative");
}

Gaussian clamp_terminal(const Gaussian& forward, const TerminalTarget& target, double beta) {
    if (!(beta >= 0.0 && beta <= 1.0)) throw Error("clamp beta must lie in [0, 1]");
    if (forward.dim() != target.target.dim()) throw ShapeMismatch("clamp_terminal dims");
    if (beta == 0.0) return target.target;
    const Mat lam_t = psd_inverse(target.target.cov());
    const Mat lam_f = psd_inverse(forward.cov());
    const Mat lam = symmetrize(lam_t + beta * lam_f);
    const Mat cov = psd_inverse(lam);
    const Vec mu = cov * (lam_t * target.target.mean() + beta * lam_f * forward.mean());
    return Gaussian(mu, cov);
}

namespace {

std::vector<Gaussian> propagate_closed_loop(const DynamicsModel& dyn,
                                            const LinearGaussianController& ctrl,
                                            bool linearize_along_means, double fd_step) {
    if (ctrl.horizon() != dyn.T) throw ShapeMismatch("controller horizon vs model T");
    std::vector<Gaussian> moments{dyn.x0};
    moments.reserve(dyn.T + 1);
    for (int t = 0; t < dyn.T; ++t) {
        const ControllerStage& st = ctrl.stages[t];
        const Gaussian& x = moments.back();
        Mat A(dyn.dx, dyn.dx), B(dyn.dx, dyn.du);
        Vec mean_next(dyn.dx);
        const Vec u_mean = st.K * x.mean() + st.k;
        if (linearize_along_means) {
            const StageMap map = dyn.stage_map(t);
            Vec xu(dyn.dx + dyn.du);
            xu << x.mean(), u_mean;
            const Mat J = map.jacobian ? map.jacobian(xu) : fd_jacobian(map, xu, fd_step);
            A = J.leftCols(dyn.dx);
            B = J.rightCols(dyn.du);
            mean_next = dyn.f(x.mean(), u_mean, t);
        } else {
            const LqProblem& lq = *dyn.linear;
            A = lq.A[t];
            B = lq.B[t];
            mean_next = A * x.mean() + B * u_mean + lq.c[t];
        }
        const Mat M = A + B * st.K;
        const Mat cov = M * x.cov() * M.transpose() + B * st.cov_cond * B.transpose() +
                        dyn.noise_cov(t);
        moments.emplace_back(mean_next, symmetrize(cov));
    }
    return moments;
}

} // namespace

std::vector<Gaussian> closed_loop_moments(const DynamicsModel& dyn,
                                          const LinearGaussianController& ctrl) {
    if (!dyn.linear) throw LinearOnly("closed_loop_moments (use the linearized variant)");
    return propagate_closed_loop(dyn, ctrl, false, 0.0);
}

std::vector<Gaussian> closed_loop_moments_linearized(const DynamicsModel& dyn,
                                                     const LinearGaussianController& ctrl,
                                                     double fd_step) {
    return propagate_closed_loop(dyn, ctrl, true, fd_step);
}

CcResult cc_solve(const DynamicsModel& dyn, const CostModel& cost, const I2cConfig& cfg,
                  const TerminalTarget& target, const AnnealSchedule& sched,
                  const CcOptions& opts) {
    cfg.validate();
    sched.validate();
    if (cost.dzT > 0) {
        throw Error("cc_solve expects a cost without a terminal observation factor");
    }
    if (dyn.linear) {
        // Feasibility for the linear case: the target must exceed the
        // final-stage process noise.
        const Mat gap = target.target.cov() - dyn.linear->noise[dyn.T - 1];
        Eigen::SelfAdjointEigenSolver<Mat> es(gap, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0) {
            throw InfeasibleTarget("target covariance minus final-stage noise not PD (min eig " +
                                   std::to_string(es.eigenvalues().minCoeff()) + ")");
        }
    }

    I2cConfig inner = cfg;
    inner.controller_mode = ControllerMode::Feedback; // steering needs the stochastic FB law

    CcResult res;
    double beta = sched.beta0;
    const Posterior* warm = nullptr;
    const LinearGaussianController* join = nullptr;
    for (int outer = 0; outer < opts.max_outer; ++outer) {
        res.iterations = outer + 1;
        const TerminalClamp clamp{target.target, beta};
        res.posterior = e_step(dyn, cost, inner, warm, join, &clamp);
        if (inner.alpha_update == AlphaUpdate::Em) {
            res.posterior.alpha = m_step_alpha(res.posterior, cost, inner);
        }
        res.controller =
            extract_controller(res.posterior, ControllerMode::Feedback, inner.expert_p);
        res.closed_loop = dyn.linear ? closed_loop_moments(dyn, res.controller)
                                     : closed_loop_moments_linearized(dyn, res.controller,
                                                                      inner.transform.fd_step);
        res.kl_trace.push_back(kl(res.closed_loop.back(), target.target));
        if (res.kl_trace.back() < opts.tol_kl) {
            res.converged = true;
            break;
        }
        beta = sched.next(beta);
        warm = &res.posterior;
        join = &res.controller;
    }
    return res;
}

} // namespace soc
