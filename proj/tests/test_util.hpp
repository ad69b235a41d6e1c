#pragma once

#include "soc/gaussian.hpp"
#include "soc/rng.hpp"

namespace soc::testutil {

inline Vec rand_vec(RandomStream& s, int n, double scale = 1.0) {
    return scale * s.normal_vector(n);
}

inline Mat rand_mat(RandomStream& s, int rows, int cols, double scale = 1.0) {
    Mat m(rows, cols);
    for (int i = 0; i < rows; ++i) m.row(i) = scale * s.normal_vector(cols).transpose();
    return m;
}

/// Random PD covariance: Wishart-style A A^T / n plus a diagonal floor.
inline Mat rand_psd(RandomStream& s, int n, double floor = 1e-3) {
    const Mat a = rand_mat(s, n, n);
    return symmetrize(a * a.transpose() / n + floor * Mat::Identity(n, n));
}

/// Random PD covariance with eigenvalues drawn uniformly from [lo, hi]
/// (controlled condition number).
inline Mat rand_psd_conditioned(RandomStream& s, int n, double lo, double hi) {
    const Mat a = rand_mat(s, n, n);
    const Eigen::HouseholderQR<Mat> qr(a);
    const Mat q = qr.householderQ();
    Vec eigs(n);
    for (int i = 0; i < n; ++i) eigs(i) = lo + (hi - lo) * s.next_uniform();
    return symmetrize(q * eigs.asDiagonal() * q.transpose());
}

inline Gaussian rand_gaussian(RandomStream& s, int n, double mean_scale = 1.0,
                              double cov_floor = 1e-3) {
    return Gaussian(rand_vec(s, n, mean_scale), rand_psd(s, n, cov_floor));
}

} // namespace soc::testutil
