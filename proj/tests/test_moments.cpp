#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>

#include "soc/moments.hpp"
#include "test_util.hpp"

using namespace soc;
using namespace soc::testutil;

namespace {

StageMap affine_map(const Mat& a, const Vec& b) {
    StageMap m;
    m.in_dim = static_cast<int>(a.cols());
    m.out_dim = static_cast<int>(a.rows());
    m.fn = [a, b](const Vec& x) { return Vec(a * x + b); };
    m.jacobian = [a](const Vec&) { return a; };
    return m;
}

} // namespace

TEST_CASE("all transform kinds are exact for affine maps") {
    RandomStream s{101, 0};
    for (int rep = 0; rep < 100; ++rep) {
        const int n = 1 + static_cast<int>(s.next_u64() % 6);
        const int m = 1 + static_cast<int>(s.next_u64() % 6);
        const Gaussian in = rand_gaussian(s, n, 2.0, 1e-2);
        const Mat a = rand_mat(s, m, n);
        const Vec b = rand_vec(s, m);
        const Gaussian expect = propagate_linear(in, a, b, Mat::Zero(m, m));
        const Mat cross_expect = in.cov() * a.transpose();
        for (TransformKind kind :
             {TransformKind::ExactLinear, TransformKind::Taylor1, TransformKind::Cubature}) {
            MomentTransform mt{kind, 1e-5};
            const TransformResult tr = transform_moments(mt, affine_map(a, b), in);
            CHECK((tr.out.mean() - expect.mean()).norm() <= 1e-10 * (1.0 + expect.mean().norm()));
            CHECK((tr.out.cov() - expect.cov()).norm() <= 1e-10 * (1.0 + expect.cov().norm()));
            CHECK((tr.cross - cross_expect).norm() <= 1e-9 * (1.0 + cross_expect.norm()));
        }
    }
}

TEST_CASE("cubature of x^2 under a standard normal: sigma points at +-1") {
    StageMap sq;
    sq.in_dim = 1;
    sq.out_dim = 1;
    sq.fn = [](const Vec& x) { return Vec(x.array().square().matrix()); };
    MomentTransform mt{TransformKind::Cubature, 1e-5};
    const TransformResult tr = transform_moments(mt, sq, Gaussian::standard(1));
    CHECK(tr.out.mean()(0) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("identity map returns the input with cross = Sigma") {
    RandomStream s{103, 3};
    const Gaussian in = rand_gaussian(s, 3);
    StageMap id;
    id.in_dim = 3;
    id.out_dim = 3;
    id.fn = [](const Vec& x) { return x; };
    MomentTransform mt{TransformKind::Cubature, 1e-5};
    const TransformResult tr = transform_moments(mt, id, in);
    CHECK((tr.out.mean() - in.mean()).norm() < 1e-12);
    CHECK((tr.out.cov() - in.cov()).norm() < 1e-10);
    CHECK((tr.cross - in.cov()).norm() < 1e-10);
}

TEST_CASE("finite-difference Jacobian matches analytic to O(h^2) on pendulum-like dynamics") {
    StageMap pend;
    pend.in_dim = 2;
    pend.out_dim = 2;
    pend.fn = [](const Vec& x) {
        Vec dx(2);
        dx << x(1), 9.81 * std::sin(x(0)) - 0.05 * x(1);
        return dx;
    };
    auto analytic = [](const Vec& x) {
        Mat j(2, 2);
        j << 0.0, 1.0, 9.81 * std::cos(x(0)), -0.05;
        return j;
    };
    RandomStream s{5, 77};
    for (int rep = 0; rep < 50; ++rep) {
        const Vec x = rand_vec(s, 2, 2.0);
        const Mat fd = fd_jacobian(pend, x, 1e-5);
        CHECK((fd - analytic(x)).cwiseAbs().maxCoeff() < 1e-5);
    }
}

TEST_CASE("slr residual is zero for affine maps and PSD otherwise") {
    RandomStream s{107, 9};
    const Gaussian in = rand_gaussian(s, 2);
    const Mat a = rand_mat(s, 2, 2);
    const Vec b = rand_vec(s, 2);
    MomentTransform mt{TransformKind::Cubature, 1e-5};
    const AffineApprox lin = slr(mt, affine_map(a, b), in);
    CHECK((lin.J - a).norm() < 1e-6);
    CHECK((lin.c - b).norm() < 1e-6);
    CHECK(lin.omega.norm() < 1e-6);

    StageMap nl;
    nl.in_dim = 2;
    nl.out_dim = 1;
    nl.fn = [](const Vec& x) { return Vec(Vec::Constant(1, std::sin(x(0)) * x(1))); };
    const AffineApprox approx = slr(mt, nl, in);
    Eigen::SelfAdjointEigenSolver<Mat> es(approx.omega, Eigen::EigenvaluesOnly);
    CHECK(es.eigenvalues().minCoeff() >= 0.0);
}

TEST_CASE("non-PSD input is rejected") {
    StageMap id;
    id.in_dim = 2;
    id.out_dim = 2;
    id.fn = [](const Vec& x) { return x; };
    MomentTransform mt{TransformKind::Cubature, 1e-5};
    CHECK_THROWS_AS(transform_moments(mt, id, Gaussian::standard(3)), ShapeMismatch);
}
