#pragma once

#include "soc/model.hpp"
#include "test_util.hpp"

namespace soc::testutil {

/// Random time-invariant tracking LQ problem with bounded spectral radius and
/// PD weights; x0 is a tight Gaussian at a random point.
inline LqProblem rand_lq_problem(RandomStream& s, int dx, int du, int T,
                                 double spectral_radius = 1.05, double noise_scale = 0.0,
                                 double x0_cov = 1e-8) {
    Mat a = rand_mat(s, dx, dx);
    const Eigen::VectorXcd eig = a.eigenvalues();
    double rho = 0.0;
    for (int i = 0; i < eig.size(); ++i) rho = std::max(rho, std::abs(eig(i)));
    if (rho > 1e-12) a *= spectral_radius / rho;
    const Mat b = rand_mat(s, dx, du);
    const Mat q = rand_psd(s, dx, 0.1);
    const Mat r = rand_psd(s, du, 0.5);
    const Mat qT = rand_psd(s, dx, 0.5);
    const Mat noise = noise_scale * Mat::Identity(dx, dx);
    const Gaussian x0(rand_vec(s, dx, 2.0), x0_cov * Mat::Identity(dx, dx));
    LqProblem lq = LqProblem::time_invariant(a, b, q, r, qT, T, x0, noise);
    for (int t = 0; t < T; ++t) lq.c[t] = rand_vec(s, dx, 0.1);
    return lq;
}

} // namespace soc::testutil
