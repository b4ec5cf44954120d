#include "dremid/estimator.hpp"

namespace dremid {

void adjugate_det(const MatrixXd& M, MatrixXd& adj_out, double& det_out) {
    const int n = static_cast<int>(M.rows());
    if (M.cols() != n) throw ConfigError("adjugate: matrix must be square");
    if (n > adjugate_max_dim) throw ConfigError("adjugate: dimension above configured max");
    if (n == 0) throw ConfigError("adjugate: empty matrix");
    if (n == 1) {
        adj_out = MatrixXd::Ones(1, 1);
        det_out = M(0, 0);
        return;
    }
    // Faddeev-LeVerrier: B0 = I; A_k = M B_{k-1}; c_k = -tr(A_k)/k;
    // B_k = A_k + c_k I. Then det = (-1)^n c_n, adj = (-1)^(n-1) B_{n-1}.
    MatrixXd B = MatrixXd::Identity(n, n);
    MatrixXd A(n, n);
    double c = 0.0;
    for (int k = 1; k <= n; ++k) {
        A.noalias() = M * B;
        c = -A.trace() / k;
        if (k == n) break;
        B = A;
        B.diagonal().array() += c;
    }
    const double sgn = (n % 2 == 0) ? 1.0 : -1.0;
    det_out = sgn * c;
    adj_out = -sgn * B;  // (-1)^(n-1) B_{n-1}
}

MatrixXd adjugate(const MatrixXd& M) {
    MatrixXd adj;
    double det;
    adjugate_det(M, adj, det);
    return adj;
}

NlpreMapping make_nlpre(const ExtendedMapping& map) {
    NlpreMapping m;
    m.s = map.s();
    m.ell = map.ell();
    m.T_W = map.build_T_W();
    m.W = [&map](const VectorXd& theta) { return map.eval_W(theta); };
    return m;
}

LsDremEstimator::LsDremEstimator(NlpreMapping map, double gamma_w, double f0,
                                 const MatrixXd& Gamma, VectorXd W0, VectorXd theta0)
    : map_(std::move(map)),
      s_(map_.s),
      ell_(map_.ell),
      gamma_w_(gamma_w),
      f0_(f0),
      Gamma_(Gamma),
      W0_(std::move(W0)),
      theta0_(std::move(theta0)) {
    if (!(gamma_w_ > 0.0)) throw ConfigError("gamma_w must be > 0");
    if (!(f0_ > 0.0)) throw ConfigError("f0 must be > 0");
    if (map_.T_W.rows() != ell_ || map_.T_W.cols() != s_)
        throw ConfigError("T_W must be ell x s");
    if (Gamma_.rows() != ell_ || Gamma_.cols() != ell_) throw ConfigError("Gamma must be ell x ell");
    if (W0_.size() != s_) throw ConfigError("W0 must have s entries");
    if (theta0_.size() != ell_) throw ConfigError("theta0 must have ell entries");
    if (s_ > adjugate_max_dim) throw ConfigError("regressor dimension above adjugate max");
    if (s_ < 1 || ell_ < 1) throw ConfigError("mapping dimensions must be positive");
    M_.resize(s_, s_);
    adj_.resize(s_, s_);
    work_.resize(s_, s_);
}

void LsDremEstimator::init_state(std::span<double> state) const {
    if (static_cast<int>(state.size()) != size()) throw ConfigError("estimator state size");
    Eigen::Map<VectorXd> w(state.data(), s_);
    Eigen::Map<MatrixXd> f(state.data() + s_, s_, s_);
    Eigen::Map<VectorXd> th(state.data() + s_ + s_ * s_, ell_);
    w = W0_;
    f = (1.0 / f0_) * MatrixXd::Identity(s_, s_);
    th = theta0_;
}

void LsDremEstimator::mixed_signals(std::span<const double> state, double* delta,
                                    VectorXd* Yc) const {
    Eigen::Map<const VectorXd> w(state.data(), s_);
    Eigen::Map<const MatrixXd> f(state.data() + s_, s_, s_);
    M_ = -f0_ * f;
    M_.diagonal().array() += 1.0;  // I - f0 F
    double det;
    adjugate_det(M_, adj_, det);
    if (delta) *delta = det;
    if (Yc) Yc->noalias() = adj_ * (w - f0_ * (f * W0_));
}

void LsDremEstimator::deriv(std::span<const double> state, double Y, const VectorXd& phi,
                            std::span<double> dstate) const {
    if (phi.size() != s_) throw ConfigError("phi dimension mismatch");
    Eigen::Map<const VectorXd> w(state.data(), s_);
    Eigen::Map<const MatrixXd> f(state.data() + s_, s_, s_);
    Eigen::Map<const VectorXd> th(state.data() + s_ + s_ * s_, ell_);
    Eigen::Map<VectorXd> dw(dstate.data(), s_);
    Eigen::Map<MatrixXd> df(dstate.data() + s_, s_, s_);
    Eigen::Map<VectorXd> dth(dstate.data() + s_ + s_ * s_, ell_);

    // LS stage
    VectorXd fphi = f * phi;
    const double err = Y - phi.dot(w);
    dw = gamma_w_ * err * fphi;
    df.noalias() = (-gamma_w_) * fphi * fphi.transpose();

    // DREM stage
    M_ = -f0_ * f;
    M_.diagonal().array() += 1.0;
    double delta;
    adjugate_det(M_, adj_, delta);
    VectorXd yc = adj_ * (w - f0_ * (f * W0_));
    VectorXd werr = yc - delta * map_.W(th);
    dth.noalias() = delta * (Gamma_ * (map_.T_W * werr));
}

double LsDremEstimator::resymmetrize_F(std::span<double> state) const {
    Eigen::Map<MatrixXd> f(state.data() + s_, s_, s_);
    work_ = 0.5 * (f + f.transpose());
    const double drift = (f - work_).cwiseAbs().maxCoeff();
    f = work_;
    return drift;
}

VectorXd LsDremEstimator::W_hat(std::span<const double> state) const {
    return Eigen::Map<const VectorXd>(state.data(), s_);
}

MatrixXd LsDremEstimator::F(std::span<const double> state) const {
    return Eigen::Map<const MatrixXd>(state.data() + s_, s_, s_);
}

VectorXd LsDremEstimator::theta_hat(std::span<const double> state) const {
    return Eigen::Map<const VectorXd>(state.data() + s_ + s_ * s_, ell_);
}

EstimationErrors estimator_errors(const VectorXd& theta_hat, const VectorXd& theta_true) {
    if (theta_hat.size() != theta_true.size())
        throw ConfigError("estimator_errors: dimension mismatch");
    EstimationErrors e;
    e.component = (theta_hat - theta_true).cwiseAbs();
    e.norm = (theta_hat - theta_true).norm();
    return e;
}

GradientStage::GradientStage(double lambda, double gain, double c0)
    : lambda_(lambda), gain_(gain), c0_(c0) {
    if (!(lambda_ > 0.0)) throw ConfigError("gradient stage lambda must be > 0");
    if (!(gain_ > 0.0)) throw ConfigError("gradient stage gain must be > 0");
}

void GradientStage::init_state(std::span<double> state) const {
    if (state.size() != static_cast<std::size_t>(size()))
        throw ConfigError("gradient stage state size");
    state[0] = state[1] = state[2] = 0.0;
    state[3] = c0_;
}

void GradientStage::deriv(std::span<const double> state, double xdot, double rhs_known,
                          double m_raw, std::span<double> dstate) const {
    const double z_hp = state[0], z_rhs = state[1], z_m = state[2], c = state[3];
    dstate[0] = lambda_ * (xdot - z_hp);
    dstate[1] = lambda_ * (rhs_known - z_rhs);
    dstate[2] = lambda_ * (m_raw - z_m);
    const double z = lambda_ * (xdot - z_hp) - z_rhs;  // HP1(xdot) - Low1(rhs_known)
    const double m = z_m;
    dstate[3] = gain_ * m * (z - m * c) / (1.0 + m * m);
}

}  // namespace dremid
