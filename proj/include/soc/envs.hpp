#pragma once

#include <string>

#include "soc/model.hpp"

namespace soc {

/// Benchmark system description. Nonlinear systems expose continuous-time
/// dynamics integrated with RK4 over dt; the linear system is discrete-time
/// native (A, B). Inputs saturate at +-u_limit inside step, never error.
struct EnvSpec {
    std::string name;
    int dx = 0;
    int du = 0;
    double dt = 0.0;
    int T = 0;
    Vec u_limit;
    Gaussian x0 = Gaussian::standard(1);
    Mat sigma_eta; // process noise per stage (stochastic benchmark mode)
    Vec goal;
    Mat Q, R, QT;

    std::function<Vec(const Vec& x, const Vec& u)> continuous; // xdot = h(x, u)
    bool discrete_linear = false;
    Mat A, B;
};

EnvSpec make_env(const std::string& name);

/// One transition: clamp u, integrate dt (or apply A x + B u), add noise if
/// given. Deterministic in (x, u, noise); throws NonFiniteState on blow-up.
Vec env_step(const EnvSpec& env, const Vec& x, const Vec& u, const Vec* noise = nullptr);

Vec clamp_input(const EnvSpec& env, const Vec& u);

/// Single RK4 step of xdot = h(x, u) over dt (u held constant).
Vec rk4_step(const std::function<Vec(const Vec&, const Vec&)>& h, const Vec& x, const Vec& u,
             double dt);

/// Model bridges. `stochastic` selects the env process noise; otherwise the
/// dynamics carry zero noise (certainty-equivalent planning).
DynamicsModel dynamics_model(const EnvSpec& env, bool stochastic);

/// Quadratic goal-tracking cost g = (x; u), z = (goal; 0), W = diag(Q, R).
CostModel goal_cost(const EnvSpec& env);

/// Task cost shipped with the env: minimum-energy for linear-unstable,
/// goal tracking otherwise.
CostModel default_cost(const EnvSpec& env);

} // namespace soc
