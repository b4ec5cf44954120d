#include "dremid/regressors.hpp"

#include <Eigen/Eigenvalues>

namespace dremid {

// ---------------------------------------------------------------------------
// Class I
// ---------------------------------------------------------------------------

Class1Regressor::Class1Regressor(const ClassISystem& sys, double lambda)
    : sys_(&sys), lambda_(lambda) {
    if (!(lambda_ > 0.0)) throw ConfigError("regressor lambda must be > 0");
    z_ = VectorXd::Zero(size());
    dz_a_.resize(size());
    dz_b_.resize(size());
    dz_c_.resize(size());
    dz_d_.resize(size());
    ztmp_.resize(size());
}

Class1Regressor::Signals Class1Regressor::signals(const VectorXd& x, const VectorXd& u,
                                                  double y1) const {
    require_finite(x, "class1 regressor x");
    require_finite(u, "class1 regressor u");
    require_finite(y1, "class1 regressor y1");
    const double h3 = sys_->h3(x, u);
    if (std::abs(h3) < sys_->h3_floor) throw SingularityError("class1_step: |h3| below floor");
    Signals s;
    const VectorXd gh4 = sys_->grad_h4(x);
    s.h5 = gh4.dot(sys_->f1(x, u));
    s.h6 = sys_->f2(x, u).transpose() * gh4;
    s.h7 = (y1 - sys_->h1(x, u)) / h3;
    s.h8 = -sys_->h2(x, u) / h3;
    return s;
}

void Class1Regressor::init_state(std::span<double> z) const {
    if (static_cast<int>(z.size()) != size()) throw ConfigError("class1 regressor state size");
    for (double& v : z) v = 0.0;
}

// state layout: [z_h7, z_h8, z_p1, z_p3, z_p4 (p), z_p5 (p)]
void Class1Regressor::deriv(std::span<const double> z, const Signals& sig,
                            std::span<double> dz) const {
    const int p = sys_->p_eta;
    const double lam = lambda_;
    dz[0] = lam * (sig.h7 - z[0]);
    dz[1] = lam * (sig.h8 - z[1]);
    dz[2] = lam * (sig.h5 * sig.h7 - z[2]);
    dz[3] = lam * (sig.h5 * sig.h8 - z[3]);
    for (int j = 0; j < p; ++j) {
        dz[4 + j] = lam * (sig.h7 * sig.h6[j] - z[4 + j]);
        dz[4 + p + j] = lam * (sig.h8 * sig.h6[j] - z[4 + p + j]);
    }
}

void Class1Regressor::outputs(std::span<const double> z, const Signals& sig, double* Y,
                              VectorXd* phi) const {
    const int p = sys_->p_eta;
    const double lam = lambda_;
    *Y = lam * (sig.h7 - z[0]);
    phi->resize(s());
    (*phi)[0] = z[2];
    (*phi)[1] = -lam * (sig.h8 - z[1]);
    (*phi)[2] = z[3];
    for (int j = 0; j < p; ++j) {
        (*phi)[3 + j] = z[4 + j];
        (*phi)[3 + p + j] = z[4 + p + j];
    }
}

RegressorSample Class1Regressor::step(const VectorXd& x, const VectorXd& u, double y1, double dt) {
    if (!(dt > 0.0)) throw ConfigError("class1_step: dt must be > 0");
    const Signals cur = signals(x, u, y1);
    if (!primed_) {
        prev_ = cur;
        primed_ = true;
    }
    Signals mid;
    mid.h5 = 0.5 * (prev_.h5 + cur.h5);
    mid.h7 = 0.5 * (prev_.h7 + cur.h7);
    mid.h8 = 0.5 * (prev_.h8 + cur.h8);
    mid.h6 = 0.5 * (prev_.h6 + cur.h6);

    deriv(as_span(z_), prev_, as_span(dz_a_));
    ztmp_ = z_ + 0.5 * dt * dz_a_;
    deriv(as_span(ztmp_), mid, as_span(dz_b_));
    ztmp_ = z_ + 0.5 * dt * dz_b_;
    deriv(as_span(ztmp_), mid, as_span(dz_c_));
    ztmp_ = z_ + dt * dz_c_;
    deriv(as_span(ztmp_), cur, as_span(dz_d_));
    z_ += (dt / 6.0) * (dz_a_ + 2.0 * dz_b_ + 2.0 * dz_c_ + dz_d_);

    prev_ = cur;
    t_ += dt;

    RegressorSample out;
    out.t = t_;
    outputs(as_span(z_), cur, &out.Y, &out.phi);
    return out;
}

// ---------------------------------------------------------------------------
// Class II
// ---------------------------------------------------------------------------

Class2Regressor::Class2Regressor(const ClassIISystem& sys, double lambda)
    : sys_(&sys), lambda_(lambda) {
    if (!(lambda_ > 0.0)) throw ConfigError("regressor lambda must be > 0");
    const int p = sys_->p_eta;
    const int k = sys_->k_psi;
    int at = 0;
    lay_.z_s = at++;
    lay_.z_c4 = at++;
    lay_.z_c3 = at++;
    lay_.z_o4 = at++;
    lay_.z_o3 = at++;
    lay_.z_psi = at;
    at += k;
    lay_.z_psic = at;
    at += p;
    lay_.z_opsi = at;
    at += p;
    lay_.z_x1 = at++;
    lay_.z_x2 = at++;
    lay_.z_u1 = at++;
    lay_.z_u2 = at++;
    lay_.z_my1 = at++;
    lay_.z_my2 = at++;
    lay_.z_m1a = at++;
    lay_.z_m1b = at++;
    lay_.z_m2a = at;
    at += p;
    lay_.z_m2b = at;
    at += p;
    lay_.z_m3a = at;
    at += p;
    lay_.z_m3b = at;
    at += p;
    lay_.total = at;

    z_ = VectorXd::Zero(lay_.total);
    k1_.resize(lay_.total);
    k2_.resize(lay_.total);
    k3_.resize(lay_.total);
    k4_.resize(lay_.total);
    ztmp_.resize(lay_.total);
}

int Class2Regressor::size() const { return lay_.total; }

void Class2Regressor::init_state(std::span<double> z) const {
    if (static_cast<int>(z.size()) != size()) throw ConfigError("class2 regressor state size");
    for (double& v : z) v = 0.0;
}

void Class2Regressor::deriv(std::span<const double> z, double x, double xdot, double u,
                            std::span<double> dz) const {
    require_finite(x, "class2 regressor x");
    require_finite(xdot, "class2 regressor xdot");
    require_finite(u, "class2 regressor u");
    const int p = sys_->p_eta;
    const int k = sys_->k_psi;
    const double lam = lambda_;

    const double h3 = sys_->h3(x);
    if (std::abs(h3) < sys_->h3_floor) throw SingularityError("class2_step: |h3| below floor");
    const double r3 = sys_->h3_d1(x) / h3;
    const double h4d1 = sys_->h4_d1(x);
    const double f1 = sys_->f1(x);
    const VectorXd f2 = sys_->f2(x, xdot);

    const double s = xdot * xdot;
    const double w = s - z[lay_.z_s];  // (p/(p+lam)) xdot^2

    // scalar swaps (the 1/2 from h4dot*xdd = 1/2 h4' d(xdot^2)/dt is folded
    // into both branches)
    dz[lay_.z_s] = lam * w;
    dz[lay_.z_c4] = lam * (0.5 * sys_->h4_d2(x) * xdot * w - z[lay_.z_c4]);
    const double adot3 = 0.5 * (sys_->h3_d2(x) / h3 - r3 * r3) * xdot;
    dz[lay_.z_c3] = lam * (adot3 * w - z[lay_.z_c3]);
    const double S_h4 = 0.5 * h4d1 * lam * w - z[lay_.z_c4];
    const double S_h3 = 0.5 * r3 * lam * w - z[lay_.z_c3];
    dz[lay_.z_o4] = lam * (S_h4 - z[lay_.z_o4]);
    dz[lay_.z_o3] = lam * (S_h3 - z[lay_.z_o3]);

    // vector swap for psi_a * d/dt psi_c
    const VectorXd psi_c = sys_->psi_c(xdot);
    const MatrixXd psi_a = sys_->psi_a(x);
    const MatrixXd psi_ad = sys_->psi_a_d1(x);
    for (int j = 0; j < k; ++j) dz[lay_.z_psi + j] = lam * (psi_c[j] - z[lay_.z_psi + j]);
    VectorXd wpsi(k);
    for (int j = 0; j < k; ++j) wpsi[j] = psi_c[j] - z[lay_.z_psi + j];
    const VectorXd corr_in = psi_ad * (xdot * wpsi);
    VectorXd S_psi = psi_a * (lam * wpsi);
    for (int j = 0; j < p; ++j) {
        dz[lay_.z_psic + j] = lam * (corr_in[j] - z[lay_.z_psic + j]);
        S_psi[j] -= z[lay_.z_psic + j];
        dz[lay_.z_opsi + j] = lam * (S_psi[j] - z[lay_.z_opsi + j]);
    }

    // proper-filter cascades on measured signals
    dz[lay_.z_x1] = lam * (xdot - z[lay_.z_x1]);
    dz[lay_.z_x2] = lam * (z[lay_.z_x1] - z[lay_.z_x2]);
    dz[lay_.z_u1] = lam * (u - z[lay_.z_u1]);
    dz[lay_.z_u2] = lam * (z[lay_.z_u1] - z[lay_.z_u2]);

    const double m_y = xdot * (sys_->f1_d1(x) - r3 * (f1 + u));  // h3 f3dot - (h3dot/h3) u
    dz[lay_.z_my1] = lam * (m_y - z[lay_.z_my1]);
    dz[lay_.z_my2] = lam * (z[lay_.z_my1] - z[lay_.z_my2]);

    const double m_1 = h4d1 * xdot * (f1 + u);  // h4dot (f1 + u)
    dz[lay_.z_m1a] = lam * (m_1 - z[lay_.z_m1a]);
    dz[lay_.z_m1b] = lam * (z[lay_.z_m1a] - z[lay_.z_m1b]);

    const VectorXd m_2 = sys_->f2_x_part(x, xdot) - (r3 * xdot) * f2;
    const VectorXd m_3 = (h4d1 * xdot) * f2;
    for (int j = 0; j < p; ++j) {
        dz[lay_.z_m2a + j] = lam * (m_2[j] - z[lay_.z_m2a + j]);
        dz[lay_.z_m2b + j] = lam * (z[lay_.z_m2a + j] - z[lay_.z_m2b + j]);
        dz[lay_.z_m3a + j] = lam * (m_3[j] - z[lay_.z_m3a + j]);
        dz[lay_.z_m3b + j] = lam * (z[lay_.z_m3a + j] - z[lay_.z_m3b + j]);
    }
}

void Class2Regressor::outputs(std::span<const double> z, double x, double xdot, double u,
                              double* Y, VectorXd* phi) const {
    const int p = sys_->p_eta;
    const double lam = lambda_;

    // Y = Lam[x'''] - Lam[(h3dot/h3) xdd] - Lam[h3 f3dot - (h3dot/h3) u] - Lam[udot]
    const double third = lam * lam * (xdot - 2.0 * z[lay_.z_x1] + z[lay_.z_x2]);
    const double udot_f = lam * (z[lay_.z_u1] - z[lay_.z_u2]);
    *Y = third - z[lay_.z_o3] - z[lay_.z_my2] - udot_f;

    phi->resize(s());
    (*phi)[0] = z[lay_.z_o4] - z[lay_.z_m1b];
    for (int j = 0; j < p; ++j) {
        (*phi)[1 + j] = z[lay_.z_m2b + j] + z[lay_.z_opsi + j];
        (*phi)[1 + p + j] = -z[lay_.z_m3b + j];
    }
    (void)x;
    (void)u;
}

RegressorSample Class2Regressor::step(double x, double xdot, double u, double dt) {
    if (!(dt > 0.0)) throw ConfigError("class2_step: dt must be > 0");
    if (!primed_) {
        x_prev_ = x;
        xdot_prev_ = xdot;
        u_prev_ = u;
        primed_ = true;
    }
    const double xm = 0.5 * (x_prev_ + x);
    const double xdm = 0.5 * (xdot_prev_ + xdot);
    const double um = 0.5 * (u_prev_ + u);

    deriv(as_span(z_), x_prev_, xdot_prev_, u_prev_, as_span(k1_));
    ztmp_ = z_ + 0.5 * dt * k1_;
    deriv(as_span(ztmp_), xm, xdm, um, as_span(k2_));
    ztmp_ = z_ + 0.5 * dt * k2_;
    deriv(as_span(ztmp_), xm, xdm, um, as_span(k3_));
    ztmp_ = z_ + dt * k3_;
    deriv(as_span(ztmp_), x, xdot, u, as_span(k4_));
    z_ += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);

    x_prev_ = x;
    xdot_prev_ = xdot;
    u_prev_ = u;
    t_ += dt;

    RegressorSample out;
    out.t = t_;
    outputs(as_span(z_), x, xdot, u, &out.Y, &out.phi);
    return out;
}

// ---------------------------------------------------------------------------
// IE monitor
// ---------------------------------------------------------------------------

IeMonitor::IeMonitor(int s) : gram_(MatrixXd::Zero(s, s)), phi_prev_(VectorXd::Zero(s)) {}

void IeMonitor::reset() {
    gram_.setZero();
    phi_prev_.setZero();
    primed_ = false;
    t_ = 0.0;
}

void IeMonitor::update(const VectorXd& phi, double dt) {
    if (phi.size() != gram_.rows()) throw ConfigError("ie_update: phi dimension mismatch");
    require_finite(phi, "ie_update phi");
    if (!(dt > 0.0)) throw ConfigError("ie_update: dt must be > 0");
    if (!primed_) {
        // first sample primes the trapezoid; accumulation starts with the
        // next interval
        phi_prev_ = phi;
        primed_ = true;
        return;
    }
    gram_.noalias() += (0.5 * dt) * (phi_prev_ * phi_prev_.transpose());
    gram_.noalias() += (0.5 * dt) * (phi * phi.transpose());
    phi_prev_ = phi;
    t_ += dt;
}

double IeMonitor::min_eig() const {
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(gram_, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

bool IeMonitor::check(double c_c, double* min_eig_out) const {
    if (!(c_c > 0.0)) throw ConfigError("ie_check: C_c must be > 0");
    const double me = min_eig();
    if (min_eig_out) *min_eig_out = me;
    return me >= c_c;
}

}  // namespace dremid
