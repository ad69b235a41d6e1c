#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <numbers>

#include "soc/envs.hpp"

using namespace soc;

TEST_CASE("frozen environment parameters") {
    const EnvSpec lin = make_env("linear-unstable");
    CHECK((lin.sigma_eta - 0.1 * Mat::Identity(2, 2)).norm() == 0.0);
    CHECK(lin.T == 50);
    CHECK(lin.discrete_linear);

    const EnvSpec cp = make_env("cartpole");
    CHECK(cp.dt == doctest::Approx(0.004));
    CHECK(cp.T == 500);
    CHECK(cp.dx == 4);

    const EnvSpec pend = make_env("pendulum");
    CHECK(pend.dx == 2);
    CHECK(pend.du == 1);
    CHECK(pend.u_limit(0) == doctest::Approx(2.5));

    CHECK_THROWS_AS(make_env("acrobot"), UnknownEnvironment);
}

TEST_CASE("linear env step is exactly A x + B u + noise") {
    const EnvSpec env = make_env("linear-unstable");
    const Vec x = (Vec(2) << 1.0, -2.0).finished();
    const Vec u = Vec::Constant(1, 0.3);
    const Vec eta = (Vec(2) << 0.01, -0.02).finished();
    const Vec next = env_step(env, x, u, &eta);
    CHECK((next - (env.A * x + env.B * u + eta)).norm() == 0.0);
}

TEST_CASE("pendulum equilibria") {
    const EnvSpec env = make_env("pendulum");
    const Vec u0 = Vec::Zero(1);
    const Vec upright = Vec::Zero(2);
    CHECK((env_step(env, upright, u0) - upright).norm() < 1e-12);
    const Vec hanging = (Vec(2) << std::numbers::pi, 0.0).finished();
    CHECK((env_step(env, hanging, u0) - hanging).norm() < 1e-12);
}

TEST_CASE("input saturation binds exactly") {
    const EnvSpec env = make_env("pendulum");
    const Vec x = (Vec(2) << 2.0, -1.0).finished();
    const Vec big = Vec::Constant(1, 7.0);
    const Vec lim = Vec::Constant(1, 2.5);
    CHECK((env_step(env, x, big) - env_step(env, x, lim)).norm() == 0.0);
    const Vec neg = Vec::Constant(1, -100.0);
    CHECK((env_step(env, x, neg) - env_step(env, x, Vec(-lim))).norm() == 0.0);
}

TEST_CASE("undriven undamped pendulum conserves energy at dt/10") {
    // Integrator check: remove damping, integrate one period at a fine step.
    EnvSpec env = make_env("pendulum");
    const double m = 1.0, l = 1.0, g = 9.81;
    env.continuous = [&](const Vec& x, const Vec& u) {
        Vec dx(2);
        dx << x(1), (g / l) * std::sin(x(0)) + u(0) / (m * l * l);
        return dx;
    };
    env.dt = 0.0025; // dt / 10
    auto energy = [&](const Vec& x) {
        return 0.5 * m * l * l * x(1) * x(1) + m * g * l * std::cos(x(0));
    };
    Vec x = (Vec(2) << std::numbers::pi - 0.7, 0.0).finished(); // swinging, not at rest
    const double e0 = energy(x);
    const Vec u0 = Vec::Zero(1);
    // ~one period of the large-amplitude oscillation (~2.3 s)
    for (int i = 0; i < 920; ++i) x = env_step(env, x, u0);
    CHECK(std::abs(energy(x) - e0) < 1e-3 * std::abs(e0));
}

TEST_CASE("linear-unstable spectral radius exceeds one") {
    const EnvSpec env = make_env("linear-unstable");
    const Eigen::VectorXcd eig = env.A.eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < eig.size(); ++i) rho = std::max(rho, std::abs(eig(i)));
    CHECK(rho > 1.0);
}

TEST_CASE("non-finite states are reported") {
    EnvSpec env = make_env("pendulum");
    env.continuous = [](const Vec& x, const Vec&) {
        Vec dx(2);
        dx << x(1), std::exp(x(0)) * 1e300;
        return dx;
    };
    const Vec x = (Vec(2) << 700.0, 0.0).finished();
    CHECK_THROWS_AS(env_step(env, x, Vec::Zero(1)), NonFiniteState);
}

TEST_CASE("model bridges carry the env noise only in stochastic mode") {
    const EnvSpec env = make_env("pendulum");
    const DynamicsModel det = dynamics_model(env, false);
    const DynamicsModel sto = dynamics_model(env, true);
    CHECK(det.noise_cov(0).norm() == 0.0);
    CHECK((sto.noise_cov(0) - env.sigma_eta).norm() == 0.0);
    CHECK(det.T == env.T);

    const CostModel cost = default_cost(env);
    CHECK(cost.dz == 3);
    CHECK(cost.dzT == 2);
    const CostModel me = default_cost(make_env("linear-unstable"));
    CHECK(me.dz == 1);
    CHECK(me.dzT == 0);
}
