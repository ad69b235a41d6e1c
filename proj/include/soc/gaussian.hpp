#pragma once

#include <Eigen/Dense>
#include <vector>

#include "soc/errors.hpp"

namespace soc {

using Vec = Eigen::VectorXd;
using Mat = Eigen::MatrixXd;

/// Relative eigenvalue slack below which a symmetrized covariance is rejected.
inline constexpr double kPsdTol = 1e-10;

/// Jitter scale used before any covariance inversion: eps = kJitterScale * trace / n.
inline constexpr double kJitterScale = 1e-9;

Mat symmetrize(const Mat& m);

/// Adds the trace-scaled jitter used throughout the library before inversions.
Mat jittered(const Mat& cov);

/// Cholesky-based inverse of a jittered covariance. Throws SingularCovariance.
Mat psd_inverse(const Mat& cov);

/// Solves cov * X = rhs through the jittered Cholesky factor.
Mat psd_solve(const Mat& cov, const Mat& rhs);

/// Lower-triangular Cholesky factor of the jittered covariance.
Mat psd_sqrt(const Mat& cov);

/// Multivariate Gaussian in moment form. Immutable after construction; the
/// covariance is symmetrized and validated PSD (eigenvalues above -kPsdTol
/// relative). Zero covariances are legal; only inverted paths reject them.
class Gaussian {
public:
    Gaussian(Vec mean, Mat cov);

    int dim() const { return static_cast<int>(mean_.size()); }
    const Vec& mean() const { return mean_; }
    const Mat& cov() const { return cov_; }

    /// Point mass at x (zero covariance).
    static Gaussian delta(const Vec& x) { return Gaussian(x, Mat::Zero(x.size(), x.size())); }
    static Gaussian standard(int n) { return Gaussian(Vec::Zero(n), Mat::Identity(n, n)); }

    /// Squared Mahalanobis distance of x under this Gaussian.
    double mahalanobis2(const Vec& x) const;

    /// Log density at x (requires invertible covariance).
    double logpdf(const Vec& x) const;

private:
    Vec mean_;
    Mat cov_;
};

/// Stacked Gaussian over named blocks, block 0 first. Cross blocks live in the
/// full covariance; extraction of any block is itself a valid Gaussian.
class JointGaussian {
public:
    JointGaussian(Gaussian full, std::vector<int> block_sizes);

    /// Independent join: block-diagonal covariance, zero cross terms.
    static JointGaussian independent(const std::vector<Gaussian>& blocks);

    const Gaussian& full() const { return full_; }
    int blocks() const { return static_cast<int>(sizes_.size()); }
    int block_dim(int b) const { return sizes_.at(b); }
    int block_offset(int b) const { return offsets_.at(b); }

    Gaussian marginal(int b) const;
    Vec block_mean(int b) const;
    Mat block_cov(int b) const;
    /// Cross covariance Sigma_{ab} (dim_a x dim_b).
    Mat cross(int a, int b) const;

private:
    Gaussian full_;
    std::vector<int> sizes_;
    std::vector<int> offsets_;
};

/// p(rest | block = value): Gaussian conditioning with the library jitter
/// policy. Remaining blocks are stacked in their original order.
Gaussian condition(const JointGaussian& joint, int block, const Vec& value);

/// N(A mu + b, A Sigma A^T + noise_cov).
Gaussian propagate_linear(const Gaussian& g, const Mat& A, const Vec& b, const Mat& noise_cov);

/// Precision-weighted product of two Gaussians over the same variable.
Gaussian fuse(const Gaussian& a, const Gaussian& b);

/// KL(p || q). Requires invertible q; +inf for degenerate p.
double kl(const Gaussian& p, const Gaussian& q);

/// Chi-squared quantile via bisection on the regularized incomplete gamma CDF.
double chi2_quantile(double p, int k);

/// Regularized lower incomplete gamma P(a, x).
double gamma_p(double a, double x);

/// Confidence-region membership of x under g: 1 inside the chi-squared
/// p-region, exp(-(d2 - quantile)/2) outside; monotone in the distance.
double membership_weight(const Gaussian& g, const Vec& x, double p);

} // namespace soc
