#include "soc/gaussian.hpp"

#include <cmath>
#include <limits>
#include <numbers>

namespace soc {

Mat symmetrize(const Mat& m) { return 0.5 * (m + m.transpose()); }

Mat jittered(const Mat& cov) {
    const int n = static_cast<int>(cov.rows());
    const double eps = kJitterScale * cov.trace() / std::max(n, 1);
    return cov + eps * Mat::Identity(n, n);
}

namespace {

Eigen::LLT<Mat> checked_llt(const Mat& cov) {
    Eigen::LLT<Mat> llt(jittered(cov));
    if (llt.info() != Eigen::Success) {
        throw SingularCovariance("Cholesky failed after jitter (trace=" +
                                 std::to_string(cov.trace()) + ")");
    }
    return llt;
}

// Density evaluation factors exactly when possible; the jitter safeguard is
// for the conditioning/fusion paths, not for log-densities.
Eigen::LLT<Mat> density_llt(const Mat& cov) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() == Eigen::Success) return llt;
    return checked_llt(cov);
}

} // namespace

Mat psd_inverse(const Mat& cov) {
    const int n = static_cast<int>(cov.rows());
    return symmetrize(checked_llt(cov).solve(Mat::Identity(n, n)));
}

Mat psd_solve(const Mat& cov, const Mat& rhs) { return checked_llt(cov).solve(rhs); }

Mat psd_sqrt(const Mat& cov) {
    Eigen::LLT<Mat> llt(cov);
    if (llt.info() == Eigen::Success) return Mat(llt.matrixL());
    return Mat(checked_llt(cov).matrixL());
}

Gaussian::Gaussian(Vec mean, Mat cov) : mean_(std::move(mean)), cov_(std::move(cov)) {
    if (cov_.rows() != cov_.cols() || cov_.rows() != mean_.size()) {
        throw ShapeMismatch("Gaussian mean dim " + std::to_string(mean_.size()) +
                            " vs cov " + std::to_string(cov_.rows()) + "x" +
                            std::to_string(cov_.cols()));
    }
    if (!mean_.allFinite() || !cov_.allFinite()) {
        throw NonPsdInput("non-finite Gaussian parameters");
    }
    cov_ = symmetrize(cov_);
    if (dim() > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> es(cov_, Eigen::EigenvaluesOnly);
        const double lo = es.eigenvalues().minCoeff();
        const double hi = es.eigenvalues().maxCoeff();
        if (lo < -kPsdTol * std::max(hi, 1e-300)) {
            throw NonPsdInput("min eigenvalue " + std::to_string(lo) +
                              " vs max " + std::to_string(hi));
        }
    }
}

double Gaussian::mahalanobis2(const Vec& x) const {
    if (x.size() != mean_.size()) throw ShapeMismatch("mahalanobis2 point dim");
    const Vec d = x - mean_;
    const Vec sol = psd_solve(cov_, d);
    return d.dot(sol);
}

double Gaussian::logpdf(const Vec& x) const {
    const auto llt = density_llt(cov_);
    const Vec d = x - mean_;
    double logdet = 0.0;
    for (int i = 0; i < dim(); ++i) logdet += 2.0 * std::log(llt.matrixL()(i, i));
    const double quad = d.dot(llt.solve(d));
    return -0.5 * (quad + logdet + dim() * std::log(2.0 * std::numbers::pi));
}

JointGaussian::JointGaussian(Gaussian full, std::vector<int> block_sizes)
    : full_(std::move(full)), sizes_(std::move(block_sizes)) {
    int total = 0;
    offsets_.reserve(sizes_.size());
    for (int s : sizes_) {
        if (s <= 0) throw ShapeMismatch("joint block size must be positive");
        offsets_.push_back(total);
        total += s;
    }
    if (total != full_.dim()) {
        throw ShapeMismatch("joint blocks sum to " + std::to_string(total) + " but dim is " +
                            std::to_string(full_.dim()));
    }
}

JointGaussian JointGaussian::independent(const std::vector<Gaussian>& blocks) {
    int total = 0;
    for (const auto& b : blocks) total += b.dim();
    Vec mean(total);
    Mat cov = Mat::Zero(total, total);
    std::vector<int> sizes;
    int at = 0;
    for (const auto& b : blocks) {
        mean.segment(at, b.dim()) = b.mean();
        cov.block(at, at, b.dim(), b.dim()) = b.cov();
        sizes.push_back(b.dim());
        at += b.dim();
    }
    return JointGaussian(Gaussian(std::move(mean), std::move(cov)), std::move(sizes));
}

Gaussian JointGaussian::marginal(int b) const { return Gaussian(block_mean(b), block_cov(b)); }

Vec JointGaussian::block_mean(int b) const {
    return full_.mean().segment(block_offset(b), block_dim(b));
}

Mat JointGaussian::block_cov(int b) const {
    return full_.cov().block(block_offset(b), block_offset(b), block_dim(b), block_dim(b));
}

Mat JointGaussian::cross(int a, int b) const {
    return full_.cov().block(block_offset(a), block_offset(b), block_dim(a), block_dim(b));
}

Gaussian condition(const JointGaussian& joint, int block, const Vec& value) {
    if (block < 0 || block >= joint.blocks()) throw StageOutOfRange("condition block id");
    if (value.size() != joint.block_dim(block)) {
        throw ShapeMismatch("condition value dim " + std::to_string(value.size()));
    }
    const int nb = joint.block_dim(block);
    const int ob = joint.block_offset(block);
    const int rest = joint.full().dim() - nb;
    if (rest == 0) throw ShapeMismatch("conditioning on the only block");

    // Stack the remaining blocks in order.
    Vec mu_r(rest);
    Mat sig_rr(rest, rest), sig_rb(rest, nb);
    std::vector<int> keep;
    for (int i = 0; i < joint.full().dim(); ++i) {
        if (i < ob || i >= ob + nb) keep.push_back(i);
    }
    for (int i = 0; i < rest; ++i) {
        mu_r(i) = joint.full().mean()(keep[i]);
        for (int j = 0; j < rest; ++j) sig_rr(i, j) = joint.full().cov()(keep[i], keep[j]);
        for (int j = 0; j < nb; ++j) sig_rb(i, j) = joint.full().cov()(keep[i], ob + j);
    }
    const Mat sig_bb = joint.block_cov(block);
    const Mat gain = psd_solve(sig_bb, sig_rb.transpose()).transpose(); // Sigma_rb Sigma_bb^-1
    const Vec mu = mu_r + gain * (value - joint.block_mean(block));
    const Mat cov = symmetrize(sig_rr - gain * sig_rb.transpose());
    return Gaussian(mu, cov);
}

Gaussian propagate_linear(const Gaussian& g, const Mat& A, const Vec& b, const Mat& noise_cov) {
    if (A.cols() != g.dim() || A.rows() != b.size() || noise_cov.rows() != A.rows() ||
        noise_cov.cols() != A.rows()) {
        throw ShapeMismatch("propagate_linear operands");
    }
    return Gaussian(A * g.mean() + b, symmetrize(A * g.cov() * A.transpose() + noise_cov));
}

Gaussian fuse(const Gaussian& a, const Gaussian& b) {
    if (a.dim() != b.dim()) throw ShapeMismatch("fuse dims");
    // Symmetric form of the precision-weighted product: only (Sigma_a +
    // Sigma_b) is inverted, so a single degenerate input is fine, and
    // swapping the arguments evaluates the same expressions. Both inputs
    // degenerate triggers SingularCovariance.
    const Mat s = a.cov() + b.cov();
    const Mat ga = psd_solve(s, a.cov()).transpose(); // Sigma_a S^-1
    const Mat gb = psd_solve(s, b.cov()).transpose(); // Sigma_b S^-1
    const Vec mu = gb * a.mean() + ga * b.mean();
    const Mat cov = symmetrize(ga * b.cov());
    return Gaussian(mu, cov);
}

double kl(const Gaussian& p, const Gaussian& q) {
    if (p.dim() != q.dim()) throw ShapeMismatch("kl dims");
    const int n = p.dim();
    const Mat qi = psd_inverse(q.cov());
    Eigen::SelfAdjointEigenSolver<Mat> esp(p.cov(), Eigen::EigenvaluesOnly);
    Eigen::SelfAdjointEigenSolver<Mat> esq(jittered(q.cov()), Eigen::EigenvaluesOnly);
    if (esp.eigenvalues().minCoeff() <= 0.0) {
        return std::numeric_limits<double>::infinity();
    }
    double logdet_p = 0.0, logdet_q = 0.0;
    for (int i = 0; i < n; ++i) {
        logdet_p += std::log(esp.eigenvalues()(i));
        logdet_q += std::log(esq.eigenvalues()(i));
    }
    const Vec d = q.mean() - p.mean();
    const double val =
        0.5 * ((qi * p.cov()).trace() + d.dot(qi * d) - n + logdet_q - logdet_p);
    return std::max(val, 0.0);
}

namespace {

// Regularized lower incomplete gamma by series (x < a+1) or continued
// fraction, after Numerical Recipes.
double gamma_p_series(double a, double x) {
    double ap = a;
    double sum = 1.0 / a;
    double del = sum;
    for (int i = 0; i < 500; ++i) {
        ap += 1.0;
        del *= x / ap;
        sum += del;
        if (std::abs(del) < std::abs(sum) * 1e-16) break;
    }
    return sum * std::exp(-x + a * std::log(x) - std::lgamma(a));
}

double gamma_q_contfrac(double a, double x) {
    const double tiny = 1e-300;
    double b = x + 1.0 - a;
    double c = 1.0 / tiny;
    double d = 1.0 / b;
    double h = d;
    for (int i = 1; i <= 500; ++i) {
        const double an = -i * (i - a);
        b += 2.0;
        d = an * d + b;
        if (std::abs(d) < tiny) d = tiny;
        c = b + an / c;
        if (std::abs(c) < tiny) c = tiny;
        d = 1.0 / d;
        const double del = d * c;
        h *= del;
        if (std::abs(del - 1.0) < 1e-16) break;
    }
    return std::exp(-x + a * std::log(x) - std::lgamma(a)) * h;
}

} // namespace

double gamma_p(double a, double x) {
    if (x < 0.0 || a <= 0.0) throw Error("gamma_p domain");
    if (x == 0.0) return 0.0;
    if (x < a + 1.0) return gamma_p_series(a, x);
    return 1.0 - gamma_q_contfrac(a, x);
}

double chi2_quantile(double p, int k) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidProbability(std::to_string(p));
    if (k < 1) throw Error("chi2_quantile dof");
    const double a = 0.5 * k;
    double lo = 0.0;
    double hi = k + 10.0 * std::sqrt(2.0 * k) + 50.0;
    while (gamma_p(a, 0.5 * hi) < p) hi *= 2.0;
    for (int i = 0; i < 200; ++i) {
        const double mid = 0.5 * (lo + hi);
        if (gamma_p(a, 0.5 * mid) < p) {
            lo = mid;
        } else {
            hi = mid;
        }
        if (hi - lo < 1e-10 * std::max(1.0, hi)) break;
    }
    return 0.5 * (lo + hi);
}

double membership_weight(const Gaussian& g, const Vec& x, double p) {
    if (!(p > 0.0 && p < 1.0)) throw InvalidProbability(std::to_string(p));
    const double d2 = g.mahalanobis2(x);
    const double gate = chi2_quantile(p, g.dim());
    return std::exp(-0.5 * std::max(0.0, d2 - gate));
}

} // namespace soc
