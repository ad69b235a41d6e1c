#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <vector>

#include "soc/gaussian.hpp"
#include "soc/moments.hpp"

namespace soc {

struct LqProblem;

/// Stagewise stochastic dynamics x_{t+1} = f_t(x_t, u_t) + eta_t. Stage maps
/// are total functions of (x, u); time variation is by index, sharing one
/// closure. `linear` is set when the model was built from an LqProblem and
/// unlocks the exact linear paths (baseline bridges, risk diagnostics).
struct DynamicsModel {
    int dx = 0;
    int du = 0;
    int T = 0;
    std::function<Vec(const Vec& x, const Vec& u, int t)> f;
    std::function<Mat(const Vec& x, const Vec& u, int t)> f_jacobian; // d f / d[x;u], optional
    std::function<Mat(int t)> noise_cov;                              // Sigma_eta,t
    Gaussian x0 = Gaussian::standard(1);
    std::shared_ptr<const LqProblem> linear;

    /// Stacked-joint view of f_t for the moment transforms.
    StageMap stage_map(int t) const;
};

/// Quadratic-form cost through observation residuals: stage residual
/// r_t = g_t(x_t, u_t) - z_t weighted by W_t, terminal g_T over x only.
/// dzT == 0 means no terminal factor at all (covariance-control problems
/// handle the boundary by clamping instead).
struct CostModel {
    int dx = 0;
    int du = 0;
    int T = 0;
    int dz = 0;
    int dzT = 0;
    std::function<Vec(const Vec& x, const Vec& u, int t)> g;
    std::function<Mat(const Vec& x, const Vec& u, int t)> g_jacobian; // optional
    std::function<Vec(int t)> z;
    std::function<Mat(int t)> W;
    std::function<Vec(const Vec& x)> gT;
    std::function<Mat(const Vec& x)> gT_jacobian; // optional
    Vec zT;
    Mat WT;
    std::shared_ptr<const LqProblem> linear;

    StageMap stage_map(int t) const;
    StageMap terminal_map() const;
};

/// First-order expansion of dynamics and observation at (x, u). Offsets are
/// defined so the expansion reproduces the function value at the point.
struct LocalLinearModel {
    Mat A, B;
    Vec c;
    Mat H, D;
    Vec e;
};

LocalLinearModel linearize(const DynamicsModel& dyn, const CostModel& cost, const Vec& x,
                           const Vec& u, int t, double fd_step = 1e-5);

/// Observation noise Sigma_xi,t = (alpha W_t)^-1 per stage plus terminal
/// (empty when the cost has no terminal factor).
struct LikelihoodNoise {
    std::vector<Mat> stage;
    Mat terminal;
};

LikelihoodNoise cost_to_likelihood(const CostModel& cost, double alpha);

/// Effort-only cost g_t = u_t, z_t = 0, W_t = R, with no terminal factor.
CostModel min_energy_cost(int dx, int du, int T, const Mat& R);

/// Total cost sum_t r_t^T W_t r_t + terminal. States has T+1 entries, inputs T.
double evaluate_cost(const CostModel& cost, const std::vector<Vec>& states,
                     const std::vector<Vec>& inputs);

/// Time-varying linear dynamics with quadratic tracking cost; the common
/// ground between the inference solver and the closed-form baselines.
struct LqProblem {
    int dx = 0;
    int du = 0;
    int T = 0;
    std::vector<Mat> A, B;
    std::vector<Vec> c;
    std::vector<Mat> Q, R;
    std::vector<Vec> x_ref, u_ref;
    Mat QT;
    Vec x_refT;
    std::vector<Mat> noise; // Sigma_eta,t
    Gaussian x0 = Gaussian::standard(1);

    /// Time-invariant convenience constructor.
    static LqProblem time_invariant(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                                    const Mat& QT, int T, const Gaussian& x0,
                                    const Mat& noise);

    DynamicsModel dynamics() const;
    /// g = (x; u), z = (x_ref; u_ref), W = diag(Q, R); terminal over x.
    CostModel cost() const;
    void validate() const;
};

} // namespace soc
