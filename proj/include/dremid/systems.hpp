#pragma once

#include <functional>
#include <vector>

#include "dremid/common.hpp"

namespace dremid {

// ---------------------------------------------------------------------------
// Class I:  xdot = f1(x,u) + f2(x,u) G(eta)
//           y1   = h1(x,u) + h2(x,u) theta2 + h3(x,u) exp(h4(x) theta1)
// ---------------------------------------------------------------------------
struct ClassISystem {
    int n = 1, m = 1, n_eta = 1, p_eta = 1;

    std::function<VectorXd(const VectorXd& x, const VectorXd& u)> f1;  // R^n
    std::function<MatrixXd(const VectorXd& x, const VectorXd& u)> f2;  // n x p_eta
    std::function<double(const VectorXd& x, const VectorXd& u)> h1, h2, h3;
    std::function<double(const VectorXd& x)> h4;
    std::function<VectorXd(const VectorXd& x)> grad_h4;  // R^n
    std::function<VectorXd(const VectorXd& eta)> G;      // R^{p_eta}
    std::function<MatrixXd(const VectorXd& eta)> grad_G; // p_eta x n_eta

    double true_theta1 = 0.0;
    double true_theta2 = 0.0;
    VectorXd true_eta;

    double h3_floor = 1e-9;

    VectorXd true_theta() const {
        VectorXd t(2 + n_eta);
        t[0] = true_theta1;
        t[1] = true_theta2;
        t.tail(n_eta) = true_eta;
        return t;
    }
};

// State derivative with the true parameters.
VectorXd rhs_class1(const ClassISystem& sys, const VectorXd& x, const VectorXd& u);

// Output [y1; x]; throws SingularityError when |h3| is below the floor.
VectorXd output_class1(const ClassISystem& sys, const VectorXd& x, const VectorXd& u);

// ---------------------------------------------------------------------------
// Class II:  xddot = f1(x) + f2'(x,xdot) G(eta) + exp_coeff*h3(x) e^{theta1 h4(x)} + u
//
// h3 here is the *known* factor; an unknown multiplicative coefficient of the
// exponential term (exp_coeff) is supported for the two-stage procedure and
// equals 1 when absent. psi_a/psi_c factor the xddot-bearing part of
// d/dt f2:  it equals psi_a(x) * d/dt psi_c(xdot), while f2_x_part supplies
// the remaining (pure xdot) part  (d f2/dx) xdot.
// ---------------------------------------------------------------------------
struct ClassIISystem {
    int n_eta = 1, p_eta = 1, k_psi = 1;

    std::function<double(double x)> f1, f1_d1;
    std::function<VectorXd(double x, double xdot)> f2;         // R^{p_eta}
    std::function<VectorXd(double x, double xdot)> f2_x_part;  // (d f2/dx) xdot
    std::function<double(double x)> h3, h3_d1, h3_d2;
    std::function<double(double x)> h4, h4_d1, h4_d2;
    std::function<MatrixXd(double x)> psi_a, psi_a_d1;  // p_eta x k_psi
    std::function<VectorXd(double xdot)> psi_c;         // R^{k_psi}
    std::function<VectorXd(const VectorXd& eta)> G;
    std::function<MatrixXd(const VectorXd& eta)> grad_G;

    double true_theta1 = 0.0;
    VectorXd true_eta;
    double exp_coeff = 1.0;  // unknown theta2 multiplying h3 (1 when absorbed)

    double h3_floor = 1e-9;

    VectorXd true_theta() const {
        VectorXd t(1 + n_eta);
        t[0] = true_theta1;
        t.tail(n_eta) = true_eta;
        return t;
    }
};

// [xdot; xddot] with the true parameters; throws on singular h3.
Eigen::Vector2d rhs_class2(const ClassIISystem& sys, double x, double xdot, double u);

// ---------------------------------------------------------------------------
// sign handling
// ---------------------------------------------------------------------------
enum class SignMode { Exact, Tanh };

struct SignSpec {
    SignMode mode = SignMode::Exact;
    double deadband = 1e-6;  // Exact: |v| <= deadband -> 0
    double tanh_gain = 100.0;

    double operator()(double v) const {
        return mode == SignMode::Exact ? sign_deadband(v, deadband) : std::tanh(tanh_gain * v);
    }
    // derivative of the smooth variant (0 a.e. for Exact)
    double d(double v) const {
        if (mode == SignMode::Exact) return 0.0;
        const double c = std::cosh(tanh_gain * v);
        return tanh_gain / (c * c);
    }
};

// ---------------------------------------------------------------------------
// Human shank about the knee:
//   J xddot + b1 xdot + b2 sgn(xdot) + k1 e^{-k2 x} (x - q0) + mgl sin(x) = u
// normalized by the known inertia J; the Class-II view estimates
// theta = (k2, b1/J, b2/J, mgl/J) and exp_coeff = k1/J.
// ---------------------------------------------------------------------------
struct ShankParams {
    double J = 0.4;
    double b1 = 0.2;
    double b2 = 0.08;
    double k1 = 2.0;
    double k2 = 2.0;
    double mgl = 4.0;
    double q0 = -0.1;
    SignSpec sgn;
    double q0_floor = 1e-3;  // abort when |x - q0| drops below this
};

ClassIISystem make_shank_class2(const ShankParams& p);

// Potential energy of the conservative shank terms (b1 = b2 = 0, u = 0);
// used by the energy-drift check.
double shank_potential(const ShankParams& p, double x);

// Unforced rest angle (elastic/gravity balance) above q0. Starting runs here
// keeps the initial acceleration at zero, so the regression filters carry no
// boundary transient from an unmodeled xddot(0).
double shank_equilibrium(const ShankParams& p);

// ---------------------------------------------------------------------------
// Third-order reference generator  x1dot = A x1 + B w  with piecewise
// constant w; x1 = [x_d, xdot_d, xddot_d].
// ---------------------------------------------------------------------------
struct ReferenceGenerator {
    Eigen::Matrix3d A;
    Eigen::Vector3d B;
    std::vector<double> w_values;      // one per segment
    std::vector<double> w_breaks;      // ascending interior breakpoints

    static ReferenceGenerator shank_default();

    double w_at(double t) const;
    Eigen::Vector3d deriv(const Eigen::Vector3d& x1, double t) const;
    // max real part of eig(A); must be < 0
    double max_eig_real() const;
};

// ---------------------------------------------------------------------------
// Robust tracking controller
//   u = (kc1+1)(r - r0) + z,   zdot = (kc1+1) kc2 r + kc3 sgn(r)
// with the filtered error in one of two conventions:
//   standard:  e = x_d - x,  r = edot + mu e   (stabilizing)
//   literal:   e = x - x_d,  r = edot - mu e   (positive feedback; runs
//              abort on the q0 floor once tracking diverges)
// ---------------------------------------------------------------------------
struct TrackingController {
    double mu = 4.0;
    double kc1 = 1.0;
    double kc2 = 2.0;
    double kc3 = 40.0;
    bool r_plus_convention = false;  // default: literal convention
    SignSpec sgn{SignMode::Tanh, 1e-6, 50.0};

    double r0 = 0.0;  // captured at t = 0 by the scenario

    double r_of(double x, double xdot, double x_d, double xdot_d) const {
        if (r_plus_convention) return (xdot_d - xdot) + mu * (x_d - x);
        return (xdot - xdot_d) - mu * (x - x_d);
    }
    double u_of(double r, double z_int) const { return (kc1 + 1.0) * (r - r0) + z_int; }
    double z_int_deriv(double r) const { return (kc1 + 1.0) * kc2 * r + kc3 * sgn(r); }
};

// ---------------------------------------------------------------------------
// Excitation input: offset + sum of sinusoids.
// ---------------------------------------------------------------------------
struct Excitation {
    double offset = 0.0;
    std::vector<double> amp, freq, phase;

    double operator()(double t) const {
        double v = offset;
        for (std::size_t i = 0; i < amp.size(); ++i) v += amp[i] * std::sin(freq[i] * t + phase[i]);
        return v;
    }
};

// ---------------------------------------------------------------------------
// Shared fixed-step RK4 over a flat state vector.
// ---------------------------------------------------------------------------
using OdeRhs = std::function<void(double t, const VectorXd& x, VectorXd& dx)>;

class Rk4Stepper {
  public:
    explicit Rk4Stepper(int dim) : k1_(dim), k2_(dim), k3_(dim), k4_(dim), tmp_(dim) {}

    void step(const OdeRhs& f, double t, double dt, VectorXd& x) {
        f(t, x, k1_);
        tmp_ = x + 0.5 * dt * k1_;
        f(t + 0.5 * dt, tmp_, k2_);
        tmp_ = x + 0.5 * dt * k2_;
        f(t + 0.5 * dt, tmp_, k3_);
        tmp_ = x + dt * k3_;
        f(t + dt, tmp_, k4_);
        x += (dt / 6.0) * (k1_ + 2.0 * k2_ + 2.0 * k3_ + k4_);
    }

  private:
    VectorXd k1_, k2_, k3_, k4_, tmp_;
};

// The synthetic Class-I plant used by the default scenario:
//   f1 = -x + u, f2 = u, h1 = x^2, h2 = x - 353, h3 = 0.1 + x^2, h4 = -1/x,
//   scalar G(eta) = eta.
ClassISystem make_class1_synthetic(double theta1, double theta2, double theta3);

}  // namespace dremid
