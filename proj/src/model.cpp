#include "soc/model.hpp"

#include <cmath>

namespace soc {

namespace {

StageMap joint_map(int dx, int du, int out_dim,
                   std::function<Vec(const Vec&, const Vec&, int)> fn,
                   std::function<Mat(const Vec&, const Vec&, int)> jac, int t) {
    StageMap map;
    map.in_dim = dx + du;
    map.out_dim = out_dim;
    map.fn = [fn, dx, du, t](const Vec& v) { return fn(v.head(dx), v.tail(du), t); };
    if (jac) {
        map.jacobian = [jac, dx, du, t](const Vec& v) { return jac(v.head(dx), v.tail(du), t); };
    }
    return map;
}

} // namespace

StageMap DynamicsModel::stage_map(int t) const {
    return joint_map(dx, du, dx, f, f_jacobian, t);
}

StageMap CostModel::stage_map(int t) const {
    return joint_map(dx, du, dz, g, g_jacobian, t);
}

StageMap CostModel::terminal_map() const {
    StageMap map;
    map.in_dim = dx;
    map.out_dim = dzT;
    map.fn = gT;
    map.jacobian = gT_jacobian;
    return map;
}

LocalLinearModel linearize(const DynamicsModel& dyn, const CostModel& cost, const Vec& x,
                           const Vec& u, int t, double fd_step) {
    LocalLinearModel lin;
    MomentTransform mt{TransformKind::Taylor1, fd_step};
    const StageMap fmap = dyn.stage_map(t);
    const Vec xu = (Vec(dyn.dx + dyn.du) << x, u).finished();
    const Mat fj = fmap.jacobian ? fmap.jacobian(xu) : fd_jacobian(fmap, xu, fd_step);
    lin.A = fj.leftCols(dyn.dx);
    lin.B = fj.rightCols(dyn.du);
    lin.c = dyn.f(x, u, t) - lin.A * x - lin.B * u;

    const StageMap gmap = cost.stage_map(t);
    const Mat gj = gmap.jacobian ? gmap.jacobian(xu) : fd_jacobian(gmap, xu, fd_step);
    lin.H = gj.leftCols(cost.dx);
    lin.D = gj.rightCols(cost.du);
    lin.e = cost.g(x, u, t) - lin.H * x - lin.D * u;
    return lin;
}

LikelihoodNoise cost_to_likelihood(const CostModel& cost, double alpha) {
    if (!(alpha > 0.0)) throw NonPositiveAlpha(std::to_string(alpha));
    LikelihoodNoise out;
    out.stage.reserve(cost.T);
    for (int t = 0; t < cost.T; ++t) {
        const Mat w = cost.W(t);
        Eigen::SelfAdjointEigenSolver<Mat> es(w, Eigen::EigenvaluesOnly);
        if (es.eigenvalues().minCoeff() <= 0.0) {
            throw SingularCovariance(
                "cost weight W_" + std::to_string(t) +
                " is not positive definite; drop unpenalized observation dims");
        }
        out.stage.push_back(psd_inverse(alpha * w));
    }
    if (cost.dzT > 0) {
        Eigen::SelfAdjointEigenSolver<Mat> esT(cost.WT, Eigen::EigenvaluesOnly);
        if (esT.eigenvalues().minCoeff() <= 0.0) {
            throw SingularCovariance("terminal cost weight is not positive definite");
        }
        out.terminal = psd_inverse(alpha * cost.WT);
    }
    return out;
}

CostModel min_energy_cost(int dx, int du, int T, const Mat& R) {
    CostModel cost;
    cost.dx = dx;
    cost.du = du;
    cost.T = T;
    cost.dz = du;
    cost.dzT = 0;
    cost.g = [](const Vec&, const Vec& u, int) { return u; };
    cost.g_jacobian = [dx, du](const Vec&, const Vec&, int) {
        Mat j = Mat::Zero(du, dx + du);
        j.rightCols(du).setIdentity();
        return j;
    };
    cost.z = [du](int) { return Vec(Vec::Zero(du)); };
    cost.W = [R](int) { return R; };
    cost.gT = [](const Vec& x) { return Vec(Vec::Zero(0)); };
    cost.zT = Vec::Zero(0);
    cost.WT = Mat::Zero(0, 0);
    return cost;
}

double evaluate_cost(const CostModel& cost, const std::vector<Vec>& states,
                     const std::vector<Vec>& inputs) {
    if (static_cast<int>(states.size()) != cost.T + 1 ||
        static_cast<int>(inputs.size()) != cost.T) {
        throw LengthMismatch("evaluate_cost expects T+1 states and T inputs");
    }
    double total = 0.0;
    for (int t = 0; t < cost.T; ++t) {
        const Vec r = cost.g(states[t], inputs[t], t) - cost.z(t);
        total += r.dot(cost.W(t) * r);
    }
    if (cost.dzT > 0) {
        const Vec rT = cost.gT(states[cost.T]) - cost.zT;
        total += rT.dot(cost.WT * rT);
    }
    return total;
}

void LqProblem::validate() const {
    auto want = [&](bool ok, const char* what) {
        if (!ok) throw ShapeMismatch(std::string("LqProblem: ") + what);
    };
    want(static_cast<int>(A.size()) == T && static_cast<int>(B.size()) == T, "A/B length");
    want(static_cast<int>(c.size()) == T, "c length");
    want(static_cast<int>(Q.size()) == T && static_cast<int>(R.size()) == T, "Q/R length");
    want(static_cast<int>(x_ref.size()) == T && static_cast<int>(u_ref.size()) == T,
         "reference length");
    want(static_cast<int>(noise.size()) == T, "noise length");
    want(QT.rows() == dx && x_refT.size() == dx, "terminal dims");
    want(x0.dim() == dx, "x0 dim");
}

LqProblem LqProblem::time_invariant(const Mat& A, const Mat& B, const Mat& Q, const Mat& R,
                                    const Mat& QT, int T, const Gaussian& x0,
                                    const Mat& noise) {
    LqProblem p;
    p.dx = static_cast<int>(A.rows());
    p.du = static_cast<int>(B.cols());
    p.T = T;
    p.A.assign(T, A);
    p.B.assign(T, B);
    p.c.assign(T, Vec::Zero(p.dx));
    p.Q.assign(T, Q);
    p.R.assign(T, R);
    p.x_ref.assign(T, Vec::Zero(p.dx));
    p.u_ref.assign(T, Vec::Zero(p.du));
    p.QT = QT;
    p.x_refT = Vec::Zero(p.dx);
    p.noise.assign(T, noise);
    p.x0 = x0;
    p.validate();
    return p;
}

DynamicsModel LqProblem::dynamics() const {
    validate();
    auto self = std::make_shared<const LqProblem>(*this);
    DynamicsModel dyn;
    dyn.dx = dx;
    dyn.du = du;
    dyn.T = T;
    dyn.f = [self](const Vec& x, const Vec& u, int t) {
        return Vec(self->A[t] * x + self->B[t] * u + self->c[t]);
    };
    dyn.f_jacobian = [self](const Vec&, const Vec&, int t) {
        Mat j(self->dx, self->dx + self->du);
        j << self->A[t], self->B[t];
        return j;
    };
    dyn.noise_cov = [self](int t) { return self->noise[t]; };
    dyn.x0 = x0;
    dyn.linear = self;
    return dyn;
}

CostModel LqProblem::cost() const {
    validate();
    auto self = std::make_shared<const LqProblem>(*this);
    CostModel cost;
    cost.dx = dx;
    cost.du = du;
    cost.T = T;
    cost.dz = dx + du;
    cost.dzT = dx;
    cost.g = [](const Vec& x, const Vec& u, int) {
        Vec z(x.size() + u.size());
        z << x, u;
        return z;
    };
    cost.g_jacobian = [self](const Vec&, const Vec&, int) {
        return Mat(Mat::Identity(self->dx + self->du, self->dx + self->du));
    };
    cost.z = [self](int t) {
        Vec z(self->dx + self->du);
        z << self->x_ref[t], self->u_ref[t];
        return z;
    };
    cost.W = [self](int t) {
        Mat w = Mat::Zero(self->dx + self->du, self->dx + self->du);
        w.topLeftCorner(self->dx, self->dx) = self->Q[t];
        w.bottomRightCorner(self->du, self->du) = self->R[t];
        return w;
    };
    cost.gT = [](const Vec& x) { return x; };
    cost.gT_jacobian = [self](const Vec&) { return Mat(Mat::Identity(self->dx, self->dx)); };
    cost.zT = x_refT;
    cost.WT = QT;
    cost.linear = self;
    return cost;
}

} // namespace soc
