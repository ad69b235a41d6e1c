#pragma once

#include "soc/model.hpp"

namespace soc {

/// Quadratic cost-to-go V_t(x) = x^T P_t x + 2 p_t^T x + c_t, one entry per
/// stage 0..T.
struct ValueQuadratic {
    std::vector<Mat> P;
    std::vector<Vec> p;
    std::vector<double> c;
};

/// Classical-sign affine policy u_t = -K_t x + k_t, stages 0..T-1.
struct AffinePolicy {
    std::vector<Mat> K;
    std::vector<Vec> k;
};

/// Backward Riccati recursion for the time-varying tracking LQR. Affine
/// dynamics offsets and cost references are carried exactly.
std::pair<ValueQuadratic, AffinePolicy> lqr_solve(const LqProblem& lq);

/// Risk-sensitive recursion: the propagated cost-to-go is transformed by
/// P -> (P^-1 + sigma Sigma_eta,t)^-1 before every Riccati step; sigma = 0
/// reproduces lqr_solve exactly. Throws NeuroticBreakdown when the transform
/// loses positive semi-definiteness.
std::pair<ValueQuadratic, AffinePolicy> leqg_solve(const LqProblem& lq, double sigma);

/// Deterministic rollout of the policy from the given start state.
std::pair<std::vector<Vec>, std::vector<Vec>> policy_rollout(const LqProblem& lq,
                                                             const AffinePolicy& policy,
                                                             const Vec& x0);

struct IlqrOptions {
    int max_iters = 200;
    double tol = 1e-9;              // relative cost change
    double lambda_init = 1e-6;
    double lambda_factor = 10.0;
    double lambda_shrink = 0.5;
    double lambda_cap = 1e10;
    int max_backtracks = 10;        // step scales 1, 1/2, ..., 2^-10
    double fd_step = 1e-5;
    /// Input box (empty = unconstrained). The feedforward is clamped in the
    /// backward pass (active rows lose feedback) and rollouts saturate, so
    /// plans never command beyond the box.
    Vec u_min, u_max;
};

struct IlqrResult {
    std::vector<Vec> xs;            // nominal states, T+1
    std::vector<Vec> us;            // nominal inputs, T
    std::vector<Mat> K;             // local feedback, du(x) = K (x - xs_t)
    std::vector<double> cost_trace; // accepted iterations, non-increasing
    bool converged = false;
    int iterations = 0;
    double cost = 0.0;
};

/// Gauss-Newton trajectory optimization with Levenberg regularization on the
/// input Hessian and a backtracking line search on the feedforward scale.
IlqrResult ilqr_solve(const DynamicsModel& dyn, const CostModel& cost, const Vec& x0,
                      std::vector<Vec> init_us, const IlqrOptions& opts = {});

/// Exact gradient of the deterministic total cost with respect to each input,
/// by adjoint recursion along the given nominal trajectory.
std::vector<Vec> input_gradient(const DynamicsModel& dyn, const CostModel& cost,
                                const std::vector<Vec>& xs, const std::vector<Vec>& us,
                                double fd_step = 1e-5);

} // namespace soc
