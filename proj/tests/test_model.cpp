#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include "soc/model.hpp"
#include "test_util.hpp"

using namespace soc;
using namespace soc::testutil;

TEST_CASE("cost_to_likelihood arithmetic and scaling") {
    CostModel cost = min_energy_cost(1, 1, 3, Mat::Identity(1, 1));
    SUBCASE("alpha=1, W=I -> Sigma_xi=I") {
        const LikelihoodNoise xi = cost_to_likelihood(cost, 1.0);
        CHECK(xi.stage[0](0, 0) == doctest::Approx(1.0));
    }
    SUBCASE("alpha=2, W=4 -> 0.125") {
        cost.W = [](int) { return Mat(Mat::Constant(1, 1, 4.0)); };
        const LikelihoodNoise xi = cost_to_likelihood(cost, 2.0);
        CHECK(xi.stage[0](0, 0) == doctest::Approx(0.125));
    }
    SUBCASE("doubling alpha halves Sigma_xi") {
        cost.W = [](int) { return Mat((Vec(1) << 2.5).finished().asDiagonal()); };
        const LikelihoodNoise a = cost_to_likelihood(cost, 1.3);
        const LikelihoodNoise b = cost_to_likelihood(cost, 2.6);
        CHECK(b.stage[1](0, 0) == doctest::Approx(0.5 * a.stage[1](0, 0)));
    }
    SUBCASE("nonpositive alpha rejected") {
        CHECK_THROWS_AS(cost_to_likelihood(cost, 0.0), NonPositiveAlpha);
        CHECK_THROWS_AS(cost_to_likelihood(cost, -1.0), NonPositiveAlpha);
    }
    SUBCASE("singular weights rejected") {
        cost.W = [](int) { return Mat(Mat::Zero(1, 1)); };
        CHECK_THROWS_AS(cost_to_likelihood(cost, 1.0), SingularCovariance);
    }
}

TEST_CASE("evaluate_cost: zero on target, hand value, LQR recovery") {
    RandomStream s{31, 0};
    LqProblem lq = LqProblem::time_invariant(rand_mat(s, 2, 2), rand_mat(s, 2, 1),
                                             rand_psd(s, 2), Mat::Identity(1, 1),
                                             rand_psd(s, 2), 4, Gaussian::standard(2),
                                             Mat::Zero(2, 2));
    const CostModel cost = lq.cost();

    SUBCASE("trajectory exactly on targets costs zero") {
        std::vector<Vec> xs(5, Vec::Zero(2)), us(4, Vec::Zero(1));
        CHECK(evaluate_cost(cost, xs, us) == doctest::Approx(0.0));
    }
    SUBCASE("scalar one-stage: residual 2, weight 3 -> 12") {
        CostModel c1 = min_energy_cost(1, 1, 1, Mat::Constant(1, 1, 3.0));
        std::vector<Vec> xs(2, Vec::Zero(1));
        std::vector<Vec> us{Vec::Constant(1, 2.0)};
        CHECK(evaluate_cost(c1, xs, us) == doctest::Approx(12.0));
    }
    SUBCASE("quadratic x^T Q x + u^T R u is recovered") {
        std::vector<Vec> xs;
        std::vector<Vec> us;
        for (int t = 0; t < 5; ++t) xs.push_back(rand_vec(s, 2));
        for (int t = 0; t < 4; ++t) us.push_back(rand_vec(s, 1));
        double direct = xs[4].dot(lq.QT * xs[4]);
        for (int t = 0; t < 4; ++t) {
            direct += xs[t].dot(lq.Q[t] * xs[t]) + us[t].dot(lq.R[t] * us[t]);
        }
        CHECK(evaluate_cost(cost, xs, us) == doctest::Approx(direct).epsilon(1e-12));
    }
    SUBCASE("length mismatch throws") {
        std::vector<Vec> xs(4, Vec::Zero(2)), us(4, Vec::Zero(1));
        CHECK_THROWS_AS(evaluate_cost(cost, xs, us), LengthMismatch);
    }
}

TEST_CASE("linearize reproduces the function value at the expansion point") {
    RandomStream s{37, 2};
    LqProblem lq = LqProblem::time_invariant(rand_mat(s, 3, 3), rand_mat(s, 3, 2),
                                             rand_psd(s, 3), Mat::Identity(2, 2),
                                             rand_psd(s, 3), 3, Gaussian::standard(3),
                                             Mat::Zero(3, 3));
    const DynamicsModel dyn = lq.dynamics();
    const CostModel cost = lq.cost();
    const Vec x = rand_vec(s, 3), u = rand_vec(s, 2);
    const LocalLinearModel lin = linearize(dyn, cost, x, u, 1);
    CHECK((lin.A * x + lin.B * u + lin.c - dyn.f(x, u, 1)).norm() < 1e-12);
    CHECK((lin.H * x + lin.D * u + lin.e - cost.g(x, u, 1)).norm() < 1e-12);
    CHECK((lin.A - lq.A[1]).norm() < 1e-12);
}

TEST_CASE("LqProblem bridges expose the linear backing model") {
    RandomStream s{41, 4};
    const LqProblem lq = LqProblem::time_invariant(rand_mat(s, 2, 2), rand_mat(s, 2, 1),
                                                   rand_psd(s, 2), Mat::Identity(1, 1),
                                                   rand_psd(s, 2), 5, Gaussian::standard(2),
                                                   0.1 * Mat::Identity(2, 2));
    const DynamicsModel dyn = lq.dynamics();
    CHECK(dyn.linear != nullptr);
    CHECK(dyn.T == 5);
    CHECK((dyn.noise_cov(2) - 0.1 * Mat::Identity(2, 2)).norm() < 1e-15);
    const CostModel cost = lq.cost();
    CHECK(cost.dz == 3);
    CHECK(cost.dzT == 2);
}
