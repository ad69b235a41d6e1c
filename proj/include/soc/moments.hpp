#pragma once

#include <functional>

#include "soc/gaussian.hpp"

namespace soc {

enum class TransformKind { ExactLinear, Taylor1, Cubature };

/// Vector map with an optional analytic Jacobian. When the Jacobian is absent,
/// Taylor1 falls back to scale-aware central differences.
struct StageMap {
    std::function<Vec(const Vec&)> fn;
    std::function<Mat(const Vec&)> jacobian; // may be empty
    int in_dim = 0;
    int out_dim = 0;
};

struct MomentTransform {
    TransformKind kind = TransformKind::Cubature;
    double fd_step = 1e-5; // central-difference base step, scaled by max(1,|x_i|)
};

struct TransformResult {
    Gaussian out;  // moments of fn(input), no extra noise
    Mat cross;     // Cov(input, fn(input)), in_dim x out_dim
};

/// Central-difference Jacobian with per-coordinate step h*max(1,|x_i|).
Mat fd_jacobian(const StageMap& map, const Vec& x, double h);

/// Gaussian moment propagation through a nonlinear map. Exact for affine maps
/// under every kind. Cubature uses 2n sigma points mu +- sqrt(n) * chol(Sigma)
/// columns with equal weights.
TransformResult transform_moments(const MomentTransform& mt, const StageMap& map,
                                  const Gaussian& input);

/// Affine surrogate fn(v) ~ J v + c with moment-matching residual covariance
/// omega, obtained by statistical linear regression of the transform output
/// against the reference belief. omega = 0 whenever the transform is exact.
struct AffineApprox {
    Mat J;
    Vec c;
    Mat omega;
};

AffineApprox slr(const MomentTransform& mt, const StageMap& map, const Gaussian& ref);

} // namespace soc
