#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "soc/model.hpp"

namespace soc {

enum class InferenceMode { Stochastic, CertaintyEquivalent };
enum class ControllerMode { Feedforward, Feedback, Expert };
enum class AlphaUpdate { Fixed, Em };

struct I2cConfig {
    InferenceMode mode = InferenceMode::CertaintyEquivalent;
    ControllerMode controller_mode = ControllerMode::Expert;
    double alpha0 = 1.0;
    AlphaUpdate alpha_update = AlphaUpdate::Em;
    /// Stage-independent input prior N(0, sigma_u^2 I); doubles as control
    /// regularization.
    double sigma_u = 1.0;
    int max_em_iters = 100;
    int e_step_sweeps = 1;
    double tol_loglik = 1e-6; // relative change
    double tol_alpha = 1e-4;  // relative change
    double expert_p = 0.9;
    MomentTransform transform{TransformKind::Cubature, 1e-5};
    double alpha_min = 1e-10;
    double alpha_max = 1e8;
    double ce_jitter = 1e-9; // stands in for Sigma_eta during CE inference

    void validate() const;
};

/// Smoothed state-action beliefs plus the forward quantities needed by the
/// M-step and the risk diagnostics. Stage joints are (x_t, u_t); the terminal
/// entry is over x_T alone.
struct Posterior {
    double alpha = 1.0;
    /// Log-likelihood of the desired trajectory under the model at alpha
    /// (prediction-error decomposition; exact for linear-Gaussian models).
    double log_likelihood = 0.0;
    std::vector<JointGaussian> smoothed;
    Gaussian terminal = Gaussian::standard(1);
    std::vector<JointGaussian> filtered;
    std::vector<Gaussian> predicted;      // forward message at x_{t+1}
    std::vector<Mat> cross;               // Cov(filtered_t, x_{t+1})
    std::vector<double> residual_expect;  // E[(g - z)^T W (g - z)] per stage
    double residual_dof = 0.0;            // sum of observation dims
    int T = 0;

    std::vector<Vec> mean_states() const; // T+1 smoothed state means
    std::vector<Vec> mean_inputs() const; // T smoothed input means
};

/// Time-varying linear-Gaussian policy. Conditional-mean sign convention:
/// u = K x + k. Feedforward and conditional parameter sets are both stored so
/// the expert blend can interpolate between them.
struct ControllerStage {
    Mat K;
    Vec k;
    Mat cov_cond;  // Sigma_{u|x}
    Vec u_mean;    // input marginal
    Mat u_cov;
    Vec x_mean;    // nominal state belief, expert gating
    Mat x_cov;
};

struct LinearGaussianController {
    ControllerMode mode = ControllerMode::Feedback;
    double expert_p = 0.9;
    int dx = 0;
    int du = 0;
    std::vector<ControllerStage> stages;

    int horizon() const { return static_cast<int>(stages.size()); }

    /// Blend weight at state x: 1 in FB mode, 0 in FF mode, the confidence
    /// membership of x under the nominal belief in expert mode.
    double weight(int t, const Vec& x) const;
    /// Action distribution at (t, x) honoring the mode.
    Gaussian action_distribution(int t, const Vec& x) const;
    Vec mean_action(int t, const Vec& x) const;
};

/// Action at (t, x); with sample=true adds noise from the mode's action
/// covariance using a counter stream keyed by (seed, t).
Vec control(const LinearGaussianController& ctrl, int t, const Vec& x, bool sample = false,
            std::uint64_t seed = 0);

/// Terminal boundary handling for covariance control: the terminal
/// observation update is replaced by the annealed product
/// precision = Lambda_target + beta * Lambda_forward.
struct TerminalClamp {
    Gaussian target;
    double beta = 1.0;
};

/// One forward-backward Gaussian smoothing sweep (optionally several) over the
/// joint state-action chain. Nonlinear stage maps enter through statistical
/// linearization against the warm posterior (or the running forward beliefs on
/// a cold start). `join` switches the stage prior between the independent
/// input prior (open-loop optimization) and the previous controller's
/// conditional (closed-loop / expert optimization).
Posterior e_step(const DynamicsModel& dyn, const CostModel& cost, const I2cConfig& cfg,
                 const Posterior* warm = nullptr,
                 const LinearGaussianController* join = nullptr,
                 const TerminalClamp* clamp = nullptr);

/// Closed-form stationary point of the expected log-likelihood in alpha:
/// alpha = (sum of observation dims) / (sum of expected weighted residuals),
/// clipped to [alpha_min, alpha_max]. A vanishing residual sum caps at
/// alpha_max (a perfectly reconstructed trajectory).
double m_step_alpha(const Posterior& post, const CostModel& cost, const I2cConfig& cfg);

LinearGaussianController extract_controller(const Posterior& post, ControllerMode mode,
                                            double expert_p);

struct SolveDiagnostics {
    std::vector<double> alpha_trace;
    std::vector<double> loglik_trace;
    std::vector<double> planned_cost_trace;
    bool converged = false;
    int iterations = 0;
};

struct SolveResult {
    Posterior posterior;
    LinearGaussianController controller;
    SolveDiagnostics diagnostics;
};

/// EM loop: alternate e_step and the closed-form alpha update until the
/// relative log-likelihood and alpha changes fall below tolerance.
SolveResult solve(const DynamicsModel& dyn, const CostModel& cost, const I2cConfig& cfg);

/// Per-stage message decomposition around the dynamics factor of a
/// linear-Gaussian model, reported next to the risk-sensitive (LEQG-style)
/// precision transform for +-sigma. Diagnostic only.
struct RiskStageReport {
    Mat lambda_fwd_prenoise;   // forward precision at x'' (state after f, before noise)
    Mat lambda_bwd_prenoise;   // backward (likelihood) precision at x''
    Mat lambda_post_prenoise;  // posterior precision at x''
    Mat lambda_post_next;      // posterior precision at x_{t+1}
    Mat effective_noise;       // cov(x_{t+1} posterior) - cov of backward message at x''
    Mat leqg_precision_pos;    // (bwd cov + sigma * Sigma_eta)^-1
    Mat leqg_precision_neg;    // (bwd cov - sigma * Sigma_eta)^-1
};

std::vector<RiskStageReport> risk_equivalent_sigma(const DynamicsModel& dyn,
                                                   const Posterior& post, double sigma);

/// Structured-text controller dump/load for reproducible replay. The field
/// order is documented in the file header.
void save_controller(const LinearGaussianController& ctrl, const std::string& path);
LinearGaussianController load_controller(const std::string& path);

} // namespace soc
