#include "soc/moments.hpp"

#include <cmath>

namespace soc {

Mat fd_jacobian(const StageMap& map, const Vec& x, double h) {
    Mat jac(map.out_dim, map.in_dim);
    Vec xp = x, xm = x;
    for (int i = 0; i < map.in_dim; ++i) {
        const double step = h * std::max(1.0, std::abs(x(i)));
        xp(i) = x(i) + step;
        xm(i) = x(i) - step;
        jac.col(i) = (map.fn(xp) - map.fn(xm)) / (2.0 * step);
        xp(i) = x(i);
        xm(i) = x(i);
    }
    return jac;
}

namespace {

TransformResult linearized(const StageMap& map, const Gaussian& input, const Mat& jac) {
    const Vec m = map.fn(input.mean());
    const Mat cov = symmetrize(jac * input.cov() * jac.transpose());
    return {Gaussian(m, cov), input.cov() * jac.transpose()};
}

TransformResult cubature(const StageMap& map, const Gaussian& input) {
    const int n = input.dim();
    const int m = map.out_dim;
    const Mat root = std::sqrt(static_cast<double>(n)) * psd_sqrt(input.cov());
    const double w = 1.0 / (2.0 * n);

    Mat points(n, 2 * n), values(m, 2 * n);
    for (int i = 0; i < n; ++i) {
        points.col(2 * i) = input.mean() + root.col(i);
        points.col(2 * i + 1) = input.mean() - root.col(i);
    }
    for (int i = 0; i < 2 * n; ++i) {
        const Vec y = map.fn(points.col(i));
        if (!y.allFinite()) throw NonPsdInput("cubature point mapped to non-finite value");
        values.col(i) = y;
    }
    const Vec mean = values.rowwise().mean();
    Mat cov = Mat::Zero(m, m), cross = Mat::Zero(n, m);
    for (int i = 0; i < 2 * n; ++i) {
        const Vec dy = values.col(i) - mean;
        const Vec dx = points.col(i) - input.mean();
        cov += w * dy * dy.transpose();
        cross += w * dx * dy.transpose();
    }
    return {Gaussian(mean, symmetrize(cov)), cross};
}

} // namespace

TransformResult transform_moments(const MomentTransform& mt, const StageMap& map,
                                  const Gaussian& input) {
    if (input.dim() != map.in_dim) throw ShapeMismatch("transform input dim");
    switch (mt.kind) {
        case TransformKind::ExactLinear:
            if (!map.jacobian) {
                throw Error("exact-linear transform requires an analytic Jacobian");
            }
            return linearized(map, input, map.jacobian(input.mean()));
        case TransformKind::Taylor1: {
            const Mat jac = map.jacobian ? map.jacobian(input.mean())
                                         : fd_jacobian(map, input.mean(), mt.fd_step);
            return linearized(map, input, jac);
        }
        case TransformKind::Cubature:
            return cubature(map, input);
    }
    throw Error("unreachable transform kind");
}

AffineApprox slr(const MomentTransform& mt, const StageMap& map, const Gaussian& ref) {
    const TransformResult tr = transform_moments(mt, map, ref);
    const Mat jac = psd_solve(ref.cov(), tr.cross).transpose(); // cross^T Sigma^-1
    const Vec c = tr.out.mean() - jac * ref.mean();
    Mat omega = symmetrize(tr.out.cov() - jac * ref.cov() * jac.transpose());
    // Moment-matching residual is PSD in exact arithmetic; clip rounding noise.
    Eigen::SelfAdjointEigenSolver<Mat> es(omega);
    const Vec lam = es.eigenvalues().cwiseMax(0.0);
    omega = es.eigenvectors() * lam.asDiagonal() * es.eigenvectors().transpose();
    return {jac, c, symmetrize(omega)};
}

} // namespace soc
