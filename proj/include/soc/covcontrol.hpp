#pragma once

#include "soc/i2c.hpp"

namespace soc {

/// Desired terminal state distribution; covariance must be positive definite.
struct TerminalTarget {
    Gaussian target;
    explicit TerminalTarget(Gaussian g);
};

/// Geometric tempering of the forward terminal prior.
struct AnnealSchedule {
    double beta0 = 1.0;
    double gamma = 0.7;
    double beta_floor = 0.0;

    double next(double beta) const { return std::max(gamma * beta, beta_floor); }
    void validate() const;
};

/// Gaussian power-and-product p(x_T) = p(x_T*) p(forward)^beta in precision
/// form; beta = 0 returns the target exactly.
Gaussian clamp_terminal(const Gaussian& forward, const TerminalTarget& target, double beta);

/// Exact forward moment propagation of the closed loop x' = A x + B u + c
/// with u = K x + k + N(0, Sigma_u) under the model process noise. Returns
/// stages 0..T. Requires a linear model.
std::vector<Gaussian> closed_loop_moments(const DynamicsModel& dyn,
                                          const LinearGaussianController& ctrl);

/// Linearization-based analogue for nonlinear models: Jacobians are taken
/// along the propagated closed-loop means. Approximate, for diagnostics.
std::vector<Gaussian> closed_loop_moments_linearized(const DynamicsModel& dyn,
                                                     const LinearGaussianController& ctrl,
                                                     double fd_step = 1e-5);

struct CcOptions {
    int max_outer = 60;
    double tol_kl = 1e-6;
};

struct CcResult {
    Posterior posterior;
    LinearGaussianController controller;
    std::vector<double> kl_trace; // KL(achieved terminal || target) per outer iter
    std::vector<Gaussian> closed_loop;
    bool converged = false;
    int iterations = 0;
};

/// Covariance control: the i2c loop with the terminal observation replaced by
/// clamp_terminal at an annealed beta, iterating forward (closed-loop) and
/// backward (smoothing) passes until the achieved terminal distribution meets
/// the target. The linear feasibility condition target_cov - Sigma_eta,T-1 > 0
/// is enforced for linear models and advisory otherwise.
CcResult cc_solve(const DynamicsModel& dyn, const CostModel& cost, const I2cConfig& cfg,
                  const TerminalTarget& target, const AnnealSchedule& sched,
                  const CcOptions& opts = {});

} // namespace soc
