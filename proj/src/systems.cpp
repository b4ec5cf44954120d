#include "dremid/systems.hpp"

#include <Eigen/Eigenvalues>

namespace dremid {

VectorXd rhs_class1(const ClassISystem& sys, const VectorXd& x, const VectorXd& u) {
    require_finite(x, "class1 state");
    require_finite(u, "class1 input");
    return sys.f1(x, u) + sys.f2(x, u) * sys.G(sys.true_eta);
}

VectorXd output_class1(const ClassISystem& sys, const VectorXd& x, const VectorXd& u) {
    const double h3 = sys.h3(x, u);
    if (std::abs(h3) < sys.h3_floor) throw SingularityError("output_class1: |h3| below floor");
    const double y1 = sys.h1(x, u) + sys.h2(x, u) * sys.true_theta2 +
                      h3 * std::exp(sys.h4(x) * sys.true_theta1);
    VectorXd y(1 + x.size());
    y[0] = y1;
    y.tail(x.size()) = x;
    return y;
}

Eigen::Vector2d rhs_class2(const ClassIISystem& sys, double x, double xdot, double u) {
    require_finite(x, "class2 x");
    require_finite(xdot, "class2 xdot");
    require_finite(u, "class2 u");
    const double h3 = sys.h3(x);
    if (std::abs(h3) < sys.h3_floor) throw SingularityError("rhs_class2: |h3| below floor");
    const double xdd = sys.f1(x) + sys.f2(x, xdot).dot(sys.G(sys.true_eta)) +
                       sys.exp_coeff * h3 * std::exp(sys.true_theta1 * sys.h4(x)) + u;
    return {xdot, xdd};
}

ClassIISystem make_shank_class2(const ShankParams& p) {
    if (!(p.J > 0.0)) throw ConfigError("shank: J must be > 0");
    ClassIISystem sys;
    sys.n_eta = 3;
    sys.p_eta = 3;
    sys.k_psi = 3;
    const SignSpec sgn = p.sgn;

    sys.f1 = [](double) { return 0.0; };
    sys.f1_d1 = [](double) { return 0.0; };
    sys.f2 = [sgn](double x, double xdot) {
        VectorXd v(3);
        v << -xdot, -sgn(xdot), -std::sin(x);
        return v;
    };
    sys.f2_x_part = [](double x, double xdot) {
        VectorXd v(3);
        v << 0.0, 0.0, -std::cos(x) * xdot;
        return v;
    };
    const double q0 = p.q0;
    sys.h3 = [q0](double x) { return -(x - q0); };
    sys.h3_d1 = [](double) { return -1.0; };
    sys.h3_d2 = [](double) { return 0.0; };
    sys.h4 = [](double x) { return -x; };
    sys.h4_d1 = [](double) { return -1.0; };
    sys.h4_d2 = [](double) { return 0.0; };
    sys.psi_a = [](double x) {
        MatrixXd m = MatrixXd::Zero(3, 3);
        m(0, 0) = -1.0;
        m(1, 1) = -1.0;
        m(2, 2) = -std::sin(x);
        return m;
    };
    sys.psi_a_d1 = [](double x) {
        MatrixXd m = MatrixXd::Zero(3, 3);
        m(2, 2) = -std::cos(x);
        return m;
    };
    sys.psi_c = [sgn](double xdot) {
        VectorXd v(3);
        v << xdot, sgn(xdot), 0.0;
        return v;
    };
    sys.G = [](const VectorXd& eta) { return eta; };
    sys.grad_G = [](const VectorXd&) { return MatrixXd::Identity(3, 3); };

    sys.true_theta1 = p.k2;
    sys.true_eta = VectorXd(3);
    sys.true_eta << p.b1 / p.J, p.b2 / p.J, p.mgl / p.J;
    sys.exp_coeff = p.k1 / p.J;
    sys.h3_floor = p.q0_floor;
    return sys;
}

double shank_potential(const ShankParams& p, double x) {
    // d/dx V = k1 e^{-k2 x}(x - q0) + mgl sin(x)
    const double e = std::exp(-p.k2 * x);
    return p.k1 * e * (-(x - p.q0) / p.k2 - 1.0 / (p.k2 * p.k2)) - p.mgl * std::cos(x);
}

double shank_equilibrium(const ShankParams& p) {
    auto accel = [&p](double x) {
        return -p.k1 * std::exp(-p.k2 * x) * (x - p.q0) - p.mgl * std::sin(x);
    };
    double lo = p.q0 + 2.0 * p.q0_floor;
    double hi = 1.0;
    if (!(accel(lo) * accel(hi) < 0.0))
        throw ConfigError("shank: no unforced equilibrium in (q0, 1]; set x0 explicitly");
    for (int it = 0; it < 200; ++it) {
        const double mid = 0.5 * (lo + hi);
        (accel(mid) * accel(lo) > 0.0 ? lo : hi) = mid;
    }
    return 0.5 * (lo + hi);
}

ReferenceGenerator ReferenceGenerator::shank_default() {
    ReferenceGenerator r;
    r.A << 0, 1, 0, 0, 0, 1, -6000, -1300, -80;
    r.B << 0, 0, 1;
    const double pi = 3.14159265358979323846;
    r.w_values = {1000.0 * pi / 3.0, 1000.0 * pi, 2500.0 * pi};
    r.w_breaks = {20.0, 40.0};
    return r;
}

double ReferenceGenerator::w_at(double t) const {
    std::size_t seg = 0;
    while (seg < w_breaks.size() && t >= w_breaks[seg]) ++seg;
    return w_values.at(seg);
}

Eigen::Vector3d ReferenceGenerator::deriv(const Eigen::Vector3d& x1, double t) const {
    return A * x1 + B * w_at(t);
}

double ReferenceGenerator::max_eig_real() const {
    const Eigen::EigenSolver<Eigen::Matrix3d> es(A);
    return es.eigenvalues().real().maxCoeff();
}

ClassISystem make_class1_synthetic(double theta1, double theta2, double theta3) {
    ClassISystem sys;
    sys.n = 1;
    sys.m = 1;
    sys.n_eta = 1;
    sys.p_eta = 1;
    sys.f1 = [](const VectorXd& x, const VectorXd& u) {
        VectorXd v(1);
        v[0] = -x[0] + u[0];
        return v;
    };
    sys.f2 = [](const VectorXd&, const VectorXd& u) {
        MatrixXd m(1, 1);
        m(0, 0) = u[0];
        return m;
    };
    sys.h1 = [](const VectorXd& x, const VectorXd&) { return x[0] * x[0]; };
    sys.h2 = [](const VectorXd& x, const VectorXd&) { return x[0] - 353.0; };
    sys.h3 = [](const VectorXd& x, const VectorXd&) { return 0.1 + x[0] * x[0]; };
    sys.h4 = [](const VectorXd& x) { return -1.0 / x[0]; };
    sys.grad_h4 = [](const VectorXd& x) {
        VectorXd g(1);
        g[0] = 1.0 / (x[0] * x[0]);
        return g;
    };
    sys.G = [](const VectorXd& eta) { return eta; };
    sys.grad_G = [](const VectorXd&) { return MatrixXd::Identity(1, 1); };
    sys.true_theta1 = theta1;
    sys.true_theta2 = theta2;
    sys.true_eta = VectorXd::Constant(1, theta3);
    sys.h3_floor = 1e-6;
    return sys;
}

}  // namespace dremid
