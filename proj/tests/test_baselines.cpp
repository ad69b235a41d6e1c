#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "soc/baselines.hpp"
#include "soc/envs.hpp"
#include "test_problems.hpp"

using namespace soc;
using namespace soc::testutil;

namespace {

LqProblem scalar_problem(double a, double b, double q, double r, double qT, int T) {
    return LqProblem::time_invariant(Mat::Constant(1, 1, a), Mat::Constant(1, 1, b),
                                     Mat::Constant(1, 1, q), Mat::Constant(1, 1, r),
                                     Mat::Constant(1, 1, qT), T,
                                     Gaussian(Vec::Ones(1), Mat::Constant(1, 1, 1e-10)),
                                     Mat::Zero(1, 1));
}

double open_loop_cost(const LqProblem& lq, const std::vector<Vec>& us, const Vec& x0) {
    std::vector<Vec> xs{x0};
    for (int t = 0; t < lq.T; ++t) xs.push_back(lq.A[t] * xs.back() + lq.B[t] * us[t] + lq.c[t]);
    return evaluate_cost(lq.cost(), xs, us);
}

} // namespace

TEST_CASE("scalar one-stage Riccati: K = 1/2, P = 3/2, grid-search oracle") {
    const LqProblem lq = scalar_problem(1.0, 1.0, 1.0, 1.0, 1.0, 1);
    const auto [value, policy] = lqr_solve(lq);
    CHECK(policy.K[0](0, 0) == doctest::Approx(0.5).epsilon(1e-12));
    CHECK(value.P[0](0, 0) == doctest::Approx(1.5).epsilon(1e-12));

    // Brute-force over u_0 from x0 = 1.
    double best_u = 0.0, best_cost = 1e300;
    for (double u = -2.0; u <= 2.0; u += 1e-5) {
        const double x1 = 1.0 + u;
        const double cost = 1.0 + u * u + x1 * x1;
        if (cost < best_cost) {
            best_cost = cost;
            best_u = u;
        }
    }
    CHECK(best_u == doctest::Approx(-0.5).epsilon(1e-3));
    const auto [xs, us] = policy_rollout(lq, policy, Vec::Ones(1));
    CHECK(us[0](0) == doctest::Approx(best_u).epsilon(1e-3));
}

TEST_CASE("no control authority means zero gains") {
    LqProblem lq = scalar_problem(0.9, 0.0, 0.0, 1.0, 1.0, 5);
    lq.Q.assign(5, Mat::Zero(1, 1));
    const auto [value, policy] = lqr_solve(lq);
    for (int t = 0; t < 5; ++t) CHECK(std::abs(policy.K[t](0, 0)) < 1e-14);
}

TEST_CASE("500-stage recursion converges to the DARE fixed point") {
    const Mat a = (Mat(2, 2) << 1.05, 0.1, 0.0, 0.97).finished();
    const Mat b = (Mat(2, 1) << 0.0, 1.0).finished();
    const LqProblem lq = LqProblem::time_invariant(a, b, Mat::Identity(2, 2),
                                                   Mat::Identity(1, 1), Mat::Identity(2, 2),
                                                   500, Gaussian::standard(2), Mat::Zero(2, 2));
    const auto [value, policy] = lqr_solve(lq);
    CHECK((value.P[0] - value.P[1]).norm() < 1e-10);
    // Residual substitution into the DARE.
    const Mat p = value.P[0];
    const Mat h = Mat::Identity(1, 1) + b.transpose() * p * b;
    const Mat residual = Mat(a.transpose() * p * a - p + Mat::Identity(2, 2) -
                             a.transpose() * p * b * h.inverse() * b.transpose() * p * a);
    CHECK(residual.norm() < 1e-8);
}

TEST_CASE("lqr open-loop sequence is a local minimum under single-input perturbations") {
    RandomStream s{71, 0};
    for (int rep = 0; rep < 20; ++rep) {
        const int dx = 1 + static_cast<int>(s.next_u64() % 3);
        const int du = 1 + static_cast<int>(s.next_u64() % 2);
        const int T = 2 + static_cast<int>(s.next_u64() % 4);
        const LqProblem lq = rand_lq_problem(s, dx, du, T);
        const auto [value, policy] = lqr_solve(lq);
        const Vec x0 = lq.x0.mean();
        const auto [xs, us] = policy_rollout(lq, policy, x0);
        const double base = open_loop_cost(lq, us, x0);
        for (int t = 0; t < T; ++t) {
            for (int i = 0; i < du; ++i) {
                for (double d : {-1e-3, 1e-3}) {
                    std::vector<Vec> pert = us;
                    pert[t](i) += d;
                    CHECK(open_loop_cost(lq, pert, x0) >= base - 1e-12);
                }
            }
        }
    }
}

TEST_CASE("leqg degeneracies and sign structure") {
    RandomStream s{73, 1};
    SUBCASE("sigma = 0 reproduces lqr exactly") {
        const LqProblem lq = rand_lq_problem(s, 2, 1, 8, 1.05, 0.1);
        const auto [vl, pl] = lqr_solve(lq);
        const auto [ve, pe] = leqg_solve(lq, 0.0);
        for (int t = 0; t < lq.T; ++t) {
            CHECK((pl.K[t] - pe.K[t]).norm() <= 1e-12 * std::max(1.0, pl.K[t].norm()));
            CHECK((vl.P[t] - ve.P[t]).norm() <= 1e-12 * std::max(1.0, vl.P[t].norm()));
        }
    }
    SUBCASE("zero noise reproduces lqr for any admissible sigma") {
        const LqProblem lq = rand_lq_problem(s, 2, 1, 8, 1.05, 0.0);
        for (double sigma : {-0.5, 0.5}) {
            const auto [vl, pl] = lqr_solve(lq);
            const auto [ve, pe] = leqg_solve(lq, sigma);
            for (int t = 0; t < lq.T; ++t) {
                CHECK((pl.K[t] - pe.K[t]).norm() <= 1e-12 * std::max(1.0, pl.K[t].norm()));
            }
        }
    }
    SUBCASE("scalar gains are monotone in sigma and bracket the lqr gain") {
        LqProblem lq = scalar_problem(1.2, 1.0, 1.0, 1.0, 1.0, 3);
        lq.noise.assign(3, Mat::Constant(1, 1, 0.2));
        const double k_lqr = lqr_solve(lq).second.K[0](0, 0);
        double prev = 1e300;
        for (double sigma : {-0.5, -0.25, 0.0, 0.25, 0.5}) {
            const double k = leqg_solve(lq, sigma).second.K[0](0, 0);
            CHECK(k < prev);
            if (sigma < 0.0) CHECK(k > k_lqr);
            if (sigma > 0.0) CHECK(k < k_lqr);
            prev = k;
        }
    }
    SUBCASE("gains are continuous in sigma at zero") {
        const LqProblem lq = rand_lq_problem(s, 2, 1, 6, 1.0, 0.3);
        const double h = 1e-7;
        const auto kp = leqg_solve(lq, h).second.K[0];
        const auto km = leqg_solve(lq, -h).second.K[0];
        CHECK((kp - km).norm() < 1e-5);
    }
    SUBCASE("inadmissible sigma raises NeuroticBreakdown") {
        LqProblem lq = scalar_problem(1.2, 1.0, 1.0, 1.0, 1.0, 3);
        lq.noise.assign(3, Mat::Constant(1, 1, 0.2));
        CHECK_THROWS_AS(leqg_solve(lq, -6.0), NeuroticBreakdown);
    }
}

TEST_CASE("ilqr solves linear-quadratic problems in one iteration") {
    RandomStream s{79, 2};
    const LqProblem lq = rand_lq_problem(s, 2, 1, 10);
    const auto [value, policy] = lqr_solve(lq);
    const auto [xs_opt, us_opt] = policy_rollout(lq, policy, lq.x0.mean());

    IlqrOptions opts;
    opts.max_iters = 1;
    opts.lambda_init = 1e-12;
    const IlqrResult res = ilqr_solve(lq.dynamics(), lq.cost(), lq.x0.mean(),
                                      std::vector<Vec>(lq.T, Vec::Zero(1)), opts);
    for (int t = 0; t <= lq.T; ++t) CHECK((res.xs[t] - xs_opt[t]).norm() < 1e-8);
}

TEST_CASE("ilqr cost trace is non-increasing across accepted iterations") {
    const EnvSpec env = make_env("pendulum");
    const DynamicsModel dyn = dynamics_model(env, false);
    const CostModel cost = default_cost(env);
    IlqrOptions opts;
    opts.max_iters = 30;
    const IlqrResult res = ilqr_solve(dyn, cost, env.x0.mean(),
                                      std::vector<Vec>(env.T, Vec::Zero(1)), opts);
    for (std::size_t i = 1; i < res.cost_trace.size(); ++i) {
        CHECK(res.cost_trace[i] <= res.cost_trace[i - 1]);
    }
}

TEST_CASE("ilqr swings the pendulum up from zero initialization") {
    const EnvSpec env = make_env("pendulum");
    EnvSpec unclamped = env;
    unclamped.u_limit = Vec::Constant(1, 1e12);
    const DynamicsModel dyn = dynamics_model(unclamped, false);
    const CostModel cost = default_cost(env);
    IlqrOptions opts;
    opts.max_iters = 300;
    opts.tol = 1e-10;
    opts.u_min = -env.u_limit;
    opts.u_max = env.u_limit;
    const IlqrResult res = ilqr_solve(dyn, cost, env.x0.mean(),
                                      std::vector<Vec>(env.T, Vec::Zero(1)), opts);
    CHECK(res.converged);
    CHECK(std::abs(res.xs.back()(0)) < 0.1);
    for (const auto& u : res.us) CHECK(std::abs(u(0)) <= 2.5 + 1e-12);
}

TEST_CASE("adjoint input gradient matches central finite differences on pendulum") {
    EnvSpec env = make_env("pendulum");
    env.T = 40;
    const DynamicsModel dyn = dynamics_model(env, false);
    const CostModel cost = default_cost(env);
    RandomStream s{83, 3};
    std::vector<Vec> us;
    for (int t = 0; t < env.T; ++t) us.push_back(0.5 * s.normal_vector(1));
    std::vector<Vec> xs{env.x0.mean()};
    for (int t = 0; t < env.T; ++t) xs.push_back(dyn.f(xs.back(), us[t], t));

    const std::vector<Vec> grad = input_gradient(dyn, cost, xs, us);

    auto total_cost = [&](const std::vector<Vec>& u_seq) {
        std::vector<Vec> traj{env.x0.mean()};
        for (int t = 0; t < env.T; ++t) traj.push_back(dyn.f(traj.back(), u_seq[t], t));
        return evaluate_cost(cost, traj, u_seq);
    };
    const double h = 1e-6;
    for (int t = 0; t < env.T; ++t) {
        std::vector<Vec> up = us, dn = us;
        up[t](0) += h;
        dn[t](0) -= h;
        const double fd = (total_cost(up) - total_cost(dn)) / (2.0 * h);
        CHECK(grad[t](0) == doctest::Approx(fd).epsilon(1e-4));
    }
}
