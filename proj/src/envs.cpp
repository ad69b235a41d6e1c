#include "soc/envs.hpp"

#include <cmath>
#include <numbers>

namespace soc {

Vec clamp_input(const EnvSpec& env, const Vec& u) {
    return u.cwiseMin(env.u_limit).cwiseMax(-env.u_limit);
}

Vec rk4_step(const std::function<Vec(const Vec&, const Vec&)>& h, const Vec& x, const Vec& u,
             double dt) {
    const Vec k1 = h(x, u);
    const Vec k2 = h(x + 0.5 * dt * k1, u);
    const Vec k3 = h(x + 0.5 * dt * k2, u);
    const Vec k4 = h(x + dt * k3, u);
    return x + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

Vec env_step(const EnvSpec& env, const Vec& x, const Vec& u, const Vec* noise) {
    if (x.size() != env.dx || u.size() != env.du) throw ShapeMismatch("env_step operands");
    const Vec uc = clamp_input(env, u);
    Vec next = env.discrete_linear ? Vec(env.A * x + env.B * uc)
                                   : rk4_step(env.continuous, x, uc, env.dt);
    if (noise != nullptr) {
        if (noise->size() != env.dx) throw ShapeMismatch("env_step noise dim");
        next += *noise;
    }
    if (!next.allFinite()) throw NonFiniteState(env.name + " step diverged");
    return next;
}

namespace {

// Pendulum: theta = 0 upright, unit mass and length, viscous damping.
// theta_dd = (g/l) sin(theta) + (u - damping * theta_d) / (m l^2)
struct PendulumParams {
    double m = 1.0, l = 1.0, g = 9.81, damping = 0.05;
};

EnvSpec make_pendulum() {
    EnvSpec env;
    env.name = "pendulum";
    env.dx = 2;
    env.du = 1;
    env.dt = 0.025;
    env.T = 200;
    env.u_limit = Vec::Constant(1, 2.5);
    env.x0 = Gaussian((Vec(2) << std::numbers::pi, 0.0).finished(), 1e-4 * Mat::Identity(2, 2));
    env.sigma_eta = 1e-4 * env.dt * Mat::Identity(2, 2);
    env.goal = Vec::Zero(2);
    env.Q = (Vec(2) << 10.0, 1.0).finished().asDiagonal();
    env.R = Mat::Identity(1, 1);
    env.QT = 100.0 * env.Q;
    const PendulumParams p;
    env.continuous = [p](const Vec& x, const Vec& u) {
        Vec dx(2);
        dx(0) = x(1);
        dx(1) = (p.g / p.l) * std::sin(x(0)) +
                (u(0) - p.damping * x(1)) / (p.m * p.l * p.l);
        return dx;
    };
    return env;
}

// Cartpole: state (cart pos, pole angle from upright, cart vel, angular vel).
// Standard frictionless equations; pole pivots on a 1 kg cart.
struct CartpoleParams {
    double mc = 1.0, mp = 0.1, l = 0.5, g = 9.81;
};

EnvSpec make_cartpole() {
    EnvSpec env;
    env.name = "cartpole";
    env.dx = 4;
    env.du = 1;
    env.dt = 0.004;
    env.T = 500;
    env.u_limit = Vec::Constant(1, 10.0);
    env.x0 = Gaussian((Vec(4) << 0.0, std::numbers::pi, 0.0, 0.0).finished(), 1e-4 * Mat::Identity(4, 4));
    env.sigma_eta = 1e-4 * env.dt * Mat::Identity(4, 4);
    env.goal = Vec::Zero(4);
    env.Q = (Vec(4) << 10.0, 10.0, 1.0, 1.0).finished().asDiagonal();
    env.R = 0.1 * Mat::Identity(1, 1);
    env.QT = 100.0 * env.Q;
    const CartpoleParams p;
    env.continuous = [p](const Vec& x, const Vec& u) {
        const double th = x(1), thd = x(3);
        const double sin_th = std::sin(th), cos_th = std::cos(th);
        const double total = p.mc + p.mp;
        const double tmp = (u(0) + p.mp * p.l * thd * thd * sin_th) / total;
        const double th_dd = (p.g * sin_th - cos_th * tmp) /
                             (p.l * (4.0 / 3.0 - p.mp * cos_th * cos_th / total));
        const double x_dd = tmp - p.mp * p.l * th_dd * cos_th / total;
        Vec dx(4);
        dx << x(2), x(3), x_dd, th_dd;
        return dx;
    };
    return env;
}

EnvSpec make_linear_unstable() {
    EnvSpec env;
    env.name = "linear-unstable";
    env.dx = 2;
    env.du = 1;
    env.dt = 1.0; // discrete-time native
    env.T = 50;
    env.u_limit = Vec::Constant(1, 1e12);
    env.x0 = Gaussian((Vec(2) << 5.0, 5.0).finished(), 0.05 * Mat::Identity(2, 2));
    env.sigma_eta = 0.1 * Mat::Identity(2, 2);
    env.goal = Vec::Zero(2);
    env.Q = Mat::Zero(2, 2); // minimum-energy task: only effort is penalized
    env.R = Mat::Identity(1, 1);
    env.QT = Mat::Identity(2, 2);
    env.discrete_linear = true;
    env.A = (Mat(2, 2) << 1.1, 0.1, 0.0, 1.05).finished();
    env.B = (Mat(2, 1) << 0.0, 0.1).finished();
    Eigen::VectorXcd eig = env.A.eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < eig.size(); ++i) rho = std::max(rho, std::abs(eig(i)));
    if (rho <= 1.0) throw Error("linear-unstable spectral radius must exceed 1");
    return env;
}

} // namespace

EnvSpec make_env(const std::string& name) {
    if (name == "pendulum") return make_pendulum();
    if (name == "cartpole") return make_cartpole();
    if (name == "linear-unstable") return make_linear_unstable();
    throw UnknownEnvironment(name);
}

DynamicsModel dynamics_model(const EnvSpec& env, bool stochastic) {
    const Mat noise = stochastic ? env.sigma_eta : Mat(Mat::Zero(env.dx, env.dx));
    if (env.discrete_linear) {
        LqProblem lq = LqProblem::time_invariant(env.A, env.B, env.Q, env.R, env.QT, env.T,
                                                 env.x0, noise);
        return lq.dynamics();
    }
    DynamicsModel dyn;
    dyn.dx = env.dx;
    dyn.du = env.du;
    dyn.T = env.T;
    dyn.x0 = env.x0;
    dyn.noise_cov = [noise](int) { return noise; };
    const EnvSpec e = env;
    dyn.f = [e](const Vec& x, const Vec& u, int) { return env_step(e, x, u); };
    return dyn;
}

CostModel goal_cost(const EnvSpec& env) {
    // Running weights are dt-scaled (discretized time-integral cost); the
    // terminal weight is a boundary penalty and stays unscaled.
    LqProblem shape;
    shape.dx = env.dx;
    shape.du = env.du;
    shape.T = env.T;
    shape.A.assign(env.T, Mat::Identity(env.dx, env.dx));
    shape.B.assign(env.T, Mat::Zero(env.dx, env.du));
    shape.c.assign(env.T, Vec::Zero(env.dx));
    shape.Q.assign(env.T, Mat(env.dt * env.Q));
    shape.R.assign(env.T, Mat(env.dt * env.R));
    shape.x_ref.assign(env.T, env.goal);
    shape.u_ref.assign(env.T, Vec::Zero(env.du));
    shape.QT = env.QT;
    shape.x_refT = env.goal;
    shape.noise.assign(env.T, env.sigma_eta);
    shape.x0 = env.x0;
    CostModel cost = shape.cost();
    cost.linear.reset(); // the cost shape is quadratic but the env may not be linear
    return cost;
}

CostModel default_cost(const EnvSpec& env) {
    if (env.name == "linear-unstable") return min_energy_cost(env.dx, env.du, env.T, env.R);
    return goal_cost(env);
}

} // namespace soc
