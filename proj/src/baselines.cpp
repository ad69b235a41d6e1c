#include "soc/baselines.hpp"

#include <cmath>

namespace soc {

namespace {

struct StageValue {
    Mat P;
    Vec p;
    double c;
};

// One tracking-LQR stage update given the cost-to-go of the next stage.
// Returns the classical-sign gain pair (u = -K x + k) and this stage's value.
struct StageSolution {
    Mat K;
    Vec k;
    StageValue value;
};

StageSolution riccati_step(const Mat& A, const Mat& B, const Vec& c, const Mat& Q,
                           const Mat& R, const Vec& x_ref, const Vec& u_ref,
                           const StageValue& next) {
    const Mat H = symmetrize(R + B.transpose() * next.P * B);
    Eigen::LLT<Mat> llt(H);
    if (llt.info() != Eigen::Success) {
        throw SingularInput("R + B^T P B not positive definite");
    }
    const Mat G = B.transpose() * next.P * A;
    const Mat K = llt.solve(G);
    const Vec k = llt.solve(R * u_ref - B.transpose() * (next.P * c + next.p));

    const Mat M = A - B * K; // closed-loop transition
    const Vec v = B * k + c;
    StageValue val;
    val.P = symmetrize(Q + K.transpose() * R * K + M.transpose() * next.P * M);
    val.p = -Q * x_ref - K.transpose() * R * (k - u_ref) +
            M.transpose() * (next.P * v + next.p);
    const Vec du = k - u_ref;
    val.c = x_ref.dot(Q * x_ref) + du.dot(R * du) + v.dot(next.P * v) +
            2.0 * next.p.dot(v) + next.c;
    return {K, k, val};
}

StageValue terminal_value(const LqProblem& lq) {
    StageValue v;
    v.P = lq.QT;
    v.p = -lq.QT * lq.x_refT;
    v.c = lq.x_refT.dot(lq.QT * lq.x_refT);
    return v;
}

StageValue leqg_transform(const StageValue& v, const Mat& sigma_eta, double sigma) {
    if (sigma == 0.0 || sigma_eta.isZero(0.0)) return v;
    const int n = static_cast<int>(v.P.rows());
    const Mat M = Mat::Identity(n, n) + sigma * v.P * sigma_eta;
    const Eigen::FullPivLU<Mat> lu(M);
    if (!lu.isInvertible()) {
        throw NeuroticBreakdown("I + sigma P Sigma_eta singular");
    }
    StageValue out;
    out.P = symmetrize(lu.solve(v.P));
    out.p = lu.solve(v.p);
    out.c = v.c; // constant term tracks the sigma -> 0 limit; policies unaffected
    Eigen::SelfAdjointEigenSolver<Mat> es(out.P, Eigen::EigenvaluesOnly);
    const double hi = std::max(es.eigenvalues().maxCoeff(), 1e-300);
    if (es.eigenvalues().minCoeff() < -kPsdTol * hi) {
        throw NeuroticBreakdown("transformed cost-to-go lost positive definiteness");
    }
    return out;
}

std::pair<ValueQuadratic, AffinePolicy> backward_pass(const LqProblem& lq, double sigma,
                                                      bool risk_sensitive) {
    lq.validate();
    ValueQuadratic value;
    AffinePolicy policy;
    value.P.resize(lq.T + 1);
    value.p.resize(lq.T + 1);
    value.c.resize(lq.T + 1);
    policy.K.resize(lq.T);
    policy.k.resize(lq.T);

    StageValue v = terminal_value(lq);
    value.P[lq.T] = v.P;
    value.p[lq.T] = v.p;
    value.c[lq.T] = v.c;
    for (int t = lq.T - 1; t >= 0; --t) {
        const StageValue ahead = risk_sensitive ? leqg_transform(v, lq.noise[t], sigma) : v;
        StageSolution sol = riccati_step(lq.A[t], lq.B[t], lq.c[t], lq.Q[t], lq.R[t],
                                         lq.x_ref[t], lq.u_ref[t], ahead);
        policy.K[t] = std::move(sol.K);
        policy.k[t] = std::move(sol.k);
        v = std::move(sol.value);
        value.P[t] = v.P;
        value.p[t] = v.p;
        value.c[t] = v.c;
    }
    return {std::move(value), std::move(policy)};
}

} // namespace

std::pair<ValueQuadratic, AffinePolicy> lqr_solve(const LqProblem& lq) {
    return backward_pass(lq, 0.0, false);
}

std::pair<ValueQuadratic, AffinePolicy> leqg_solve(const LqProblem& lq, double sigma) {
    return backward_pass(lq, sigma, true);
}

std::pair<std::vector<Vec>, std::vector<Vec>> policy_rollout(const LqProblem& lq,
                                                             const AffinePolicy& policy,
                                                             const Vec& x0) {
    std::vector<Vec> xs{x0};
    std::vector<Vec> us;
    for (int t = 0; t < lq.T; ++t) {
        const Vec u = -policy.K[t] * xs.back() + policy.k[t];
        us.push_back(u);
        xs.push_back(lq.A[t] * xs.back() + lq.B[t] * u + lq.c[t]);
    }
    return {std::move(xs), std::move(us)};
}

namespace {

std::vector<Vec> rollout_deterministic(const DynamicsModel& dyn, const Vec& x0,
                                       const std::vector<Vec>& us) {
    std::vector<Vec> xs{x0};
    xs.reserve(us.size() + 1);
    for (int t = 0; t < static_cast<int>(us.size()); ++t) {
        Vec next = dyn.f(xs.back(), us[t], t);
        if (!next.allFinite()) throw NonFiniteState("ilqr rollout diverged");
        xs.push_back(std::move(next));
    }
    return xs;
}

struct StageDerivs {
    Mat A, B;
    Vec lx, lu;
    Mat lxx, luu, lux;
};

StageDerivs stage_derivs(const DynamicsModel& dyn, const CostModel& cost, const Vec& x,
                         const Vec& u, int t, double fd_step) {
    const LocalLinearModel lin = linearize(dyn, cost, x, u, t, fd_step);
    const Vec r = cost.g(x, u, t) - cost.z(t);
    const Mat W = cost.W(t);
    StageDerivs d;
    d.A = lin.A;
    d.B = lin.B;
    d.lx = 2.0 * lin.H.transpose() * W * r;
    d.lu = 2.0 * lin.D.transpose() * W * r;
    d.lxx = 2.0 * lin.H.transpose() * W * lin.H;
    d.luu = 2.0 * lin.D.transpose() * W * lin.D;
    d.lux = 2.0 * lin.D.transpose() * W * lin.H;
    return d;
}

void terminal_derivs(const CostModel& cost, const Vec& xT, double fd_step, Vec& vx, Mat& vxx) {
    if (cost.dzT == 0) {
        vx = Vec::Zero(cost.dx);
        vxx = Mat::Zero(cost.dx, cost.dx);
        return;
    }
    const StageMap map = cost.terminal_map();
    const Mat HT = map.jacobian ? map.jacobian(xT) : fd_jacobian(map, xT, fd_step);
    const Vec rT = cost.gT(xT) - cost.zT;
    vx = 2.0 * HT.transpose() * cost.WT * rT;
    vxx = 2.0 * HT.transpose() * cost.WT * HT;
}

} // namespace

std::vector<Vec> input_gradient(const DynamicsModel& dyn, const CostModel& cost,
                                const std::vector<Vec>& xs, const std::vector<Vec>& us,
                                double fd_step) {
    const int T = static_cast<int>(us.size());
    std::vector<Vec> grad(T);
    Vec vx;
    Mat vxx;
    terminal_derivs(cost, xs[T], fd_step, vx, vxx);
    for (int t = T - 1; t >= 0; --t) {
        const StageDerivs d = stage_derivs(dyn, cost, xs[t], us[t], t, fd_step);
        grad[t] = d.lu + d.B.transpose() * vx;
        vx = d.lx + d.A.transpose() * vx;
    }
    return grad;
}

namespace {

Vec box_clamp(const Vec& u, const IlqrOptions& opts) {
    if (opts.u_min.size() == 0) return u;
    return u.cwiseMax(opts.u_min).cwiseMin(opts.u_max);
}

} // namespace

IlqrResult ilqr_solve(const DynamicsModel& dyn, const CostModel& cost, const Vec& x0,
                      std::vector<Vec> init_us, const IlqrOptions& opts) {
    if (static_cast<int>(init_us.size()) != dyn.T) {
        throw LengthMismatch("ilqr needs T initial inputs");
    }
    const bool boxed = opts.u_min.size() > 0;
    if (boxed && (opts.u_min.size() != dyn.du || opts.u_max.size() != dyn.du)) {
        throw ShapeMismatch("ilqr input box dims");
    }
    IlqrResult res;
    res.us = std::move(init_us);
    for (auto& u : res.us) u = box_clamp(u, opts);
    res.xs = rollout_deterministic(dyn, x0, res.us);
    res.cost = evaluate_cost(cost, res.xs, res.us);
    res.cost_trace.push_back(res.cost);
    res.K.assign(dyn.T, Mat::Zero(dyn.du, dyn.dx));

    double lambda = opts.lambda_init;
    for (int iter = 0; iter < opts.max_iters; ++iter) {
        res.iterations = iter + 1;

        // Backward pass; a failed Quu factorization raises lambda and retries.
        std::vector<Mat> K(dyn.T);
        std::vector<Vec> k(dyn.T);
        bool backward_ok = false;
        while (!backward_ok) {
            backward_ok = true;
            Vec vx;
            Mat vxx;
            terminal_derivs(cost, res.xs[dyn.T], opts.fd_step, vx, vxx);
            for (int t = dyn.T - 1; t >= 0; --t) {
                const StageDerivs d = stage_derivs(dyn, cost, res.xs[t], res.us[t], t,
                                                   opts.fd_step);
                const Vec qu = d.lu + d.B.transpose() * vx;
                const Mat quu = symmetrize(d.luu + d.B.transpose() * vxx * d.B);
                const Mat qux = d.lux + d.B.transpose() * vxx * d.A;
                const Vec qx = d.lx + d.A.transpose() * vx;
                const Mat qxx = symmetrize(d.lxx + d.A.transpose() * vxx * d.A);

                const Mat quu_reg = quu + lambda * Mat::Identity(dyn.du, dyn.du);
                Eigen::LLT<Mat> llt(quu_reg);
                if (llt.info() != Eigen::Success) {
                    lambda = std::min(lambda * opts.lambda_factor, opts.lambda_cap);
                    backward_ok = false;
                    break;
                }
                k[t] = -llt.solve(qu);
                K[t] = -llt.solve(qux);
                if (boxed) {
                    // Active box rows keep the clamped feedforward and lose
                    // their feedback (coordinate projection).
                    for (int i = 0; i < dyn.du; ++i) {
                        const double target = res.us[t](i) + k[t](i);
                        if (target <= opts.u_min(i)) {
                            k[t](i) = opts.u_min(i) - res.us[t](i);
                            K[t].row(i).setZero();
                        } else if (target >= opts.u_max(i)) {
                            k[t](i) = opts.u_max(i) - res.us[t](i);
                            K[t].row(i).setZero();
                        }
                    }
                }
                vx = qx + K[t].transpose() * quu * k[t] + K[t].transpose() * qu +
                     qux.transpose() * k[t];
                vxx = symmetrize(qxx + K[t].transpose() * quu * K[t] +
                                 K[t].transpose() * qux + qux.transpose() * K[t]);
            }
            if (!backward_ok && lambda >= opts.lambda_cap) {
                res.converged = false;
                return res;
            }
        }

        // Line search on the feedforward scale.
        bool accepted = false;
        double step = 1.0;
        for (int bt = 0; bt <= opts.max_backtracks; ++bt, step *= 0.5) {
            std::vector<Vec> us_new(dyn.T), xs_new{res.xs[0]};
            bool finite = true;
            for (int t = 0; t < dyn.T; ++t) {
                us_new[t] = box_clamp(
                    res.us[t] + step * k[t] + K[t] * (xs_new.back() - res.xs[t]), opts);
                Vec next = dyn.f(xs_new.back(), us_new[t], t);
                if (!next.allFinite()) {
                    finite = false;
                    break;
                }
                xs_new.push_back(std::move(next));
            }
            if (!finite) continue;
            const double cost_new = evaluate_cost(cost, xs_new, us_new);
            if (cost_new < res.cost) {
                const double rel = (res.cost - cost_new) / std::max(1.0, std::abs(res.cost));
                res.xs = std::move(xs_new);
                res.us = std::move(us_new);
                res.K = K;
                res.cost = cost_new;
                res.cost_trace.push_back(cost_new);
                lambda = std::max(lambda * opts.lambda_shrink, 1e-12);
                accepted = true;
                if (rel < opts.tol) {
                    res.converged = true;
                    return res;
                }
                break;
            }
        }
        if (!accepted) {
            if (lambda >= opts.lambda_cap) {
                res.converged = false; // best-so-far, flagged
                return res;
            }
            lambda = std::min(lambda * opts.lambda_factor, opts.lambda_cap);
        }
    }
    res.converged = false;
    return res;
}

} // namespace soc
