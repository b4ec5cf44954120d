#pragma once

#include <span>

#include "dremid/common.hpp"
#include "dremid/systems.hpp"

namespace dremid {

// One time-stamped regression sample of the NLPRE  Y = phi' W(theta).
struct RegressorSample {
    double t = 0.0;
    double Y = 0.0;
    VectorXd phi;
};

// ---------------------------------------------------------------------------
// Class I regressor (first-order filter lambda/(p+lambda))
//
// With h5 = grad(h4)'f1, h6 = f2' grad(h4), h7 = (y1-h1)/h3, h8 = -h2/h3:
//
//   Y     = (lambda p/(p+lambda)) h7
//   phi   = [ L(h5 h7), -(lambda p/(p+lambda)) h8, L(h5 h8),
//             L(h7 h6'), L(h8 h6') ]'                    L = lambda/(p+lambda)
//
// matching W_I = [theta1, theta2, theta1 theta2, theta1 G', theta1 theta2 G']'.
// phi_2 never differentiates h8: it is realized as the proper high-pass.
// ---------------------------------------------------------------------------
class Class1Regressor {
  public:
    Class1Regressor(const ClassISystem& sys, double lambda);

    int s() const { return 3 + 2 * sys_->p_eta; }
    int size() const { return 4 + 2 * sys_->p_eta; }  // filter states

    struct Signals {
        double h5, h7, h8;
        VectorXd h6;
    };
    // Measurable quantities from (x, u, y1); uses only the known structure
    // functions, never the true parameters.
    Signals signals(const VectorXd& x, const VectorXd& u, double y1) const;

    void init_state(std::span<double> z) const;
    void deriv(std::span<const double> z, const Signals& sig, std::span<double> dz) const;
    void outputs(std::span<const double> z, const Signals& sig, double* Y, VectorXd* phi) const;

    // Standalone stepping for tests and offline use (RK4, inputs
    // interpolated linearly between calls).
    RegressorSample step(const VectorXd& x, const VectorXd& u, double y1, double dt);

    double lambda() const { return lambda_; }

  private:
    const ClassISystem* sys_;
    double lambda_;
    // standalone-stepping buffers
    VectorXd z_, dz_a_, dz_b_, dz_c_, dz_d_, ztmp_;
    bool primed_ = false;
    Signals prev_{};
    double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// Class II regressor (second-order filter Lam = lambda^2/(p+lambda)^2)
//
//   Y   = Lam[ x''' - (h3dot/h3) xdd - h3 f3dot + (h3dot/h3) u - udot ]
//   phi = [ Lam[h4dot (xdd - f1 - u)], Lam[h3 f4dot'], -Lam[h4dot f2'] ]'
//
// matching W_II = [theta1, G', theta1 G']'. Every xdd-bearing product is
// realized through first-order swaps followed by the outer low-pass stage;
// x''' comes from the proper lambda^2 p^2/(p+lambda)^2 acting on measured
// xdot, and the u-derivative from lambda^2 p/(p+lambda)^2 acting on u.
// ---------------------------------------------------------------------------
class Class2Regressor {
  public:
    Class2Regressor(const ClassIISystem& sys, double lambda);

    int s() const { return 1 + 2 * sys_->p_eta; }
    int size() const;

    void init_state(std::span<double> z) const;
    void deriv(std::span<const double> z, double x, double xdot, double u,
               std::span<double> dz) const;
    void outputs(std::span<const double> z, double x, double xdot, double u, double* Y,
                 VectorXd* phi) const;

    RegressorSample step(double x, double xdot, double u, double dt);

    double lambda() const { return lambda_; }

  private:
    struct Layout {
        int z_s, z_c4, z_c3, z_o4, z_o3;  // scalar swap states + outer stages
        int z_psi, z_psic, z_opsi;        // vector swap states (k, p, p)
        int z_x1, z_x2;                   // cascade on xdot (third derivative)
        int z_u1, z_u2;                   // cascade on u (u derivative)
        int z_my1, z_my2;                 // cascade on the measurable Y part
        int z_m1a, z_m1b;                 // cascade on h4' xdot (f1+u)
        int z_m2a, z_m2b;                 // cascades on h3 f4dot measurable part (p each)
        int z_m3a, z_m3b;                 // cascades on h4' xdot f2 (p each)
        int total;
    };
    Layout lay_;

    const ClassIISystem* sys_;
    double lambda_;

    // standalone-stepping buffers
    VectorXd z_, k1_, k2_, k3_, k4_, ztmp_;
    bool primed_ = false;
    double x_prev_ = 0, xdot_prev_ = 0, u_prev_ = 0;
    double t_ = 0.0;
};

// ---------------------------------------------------------------------------
// Interval-excitation monitor: Gram(t) = int_0^t phi phi' ds accumulated by
// the trapezoidal rule.
// ---------------------------------------------------------------------------
class IeMonitor {
  public:
    explicit IeMonitor(int s);

    void update(const VectorXd& phi, double dt);
    void reset();

    const MatrixXd& gram() const { return gram_; }
    double min_eig() const;
    // true iff lambda_min(Gram) >= c_c
    bool check(double c_c, double* min_eig_out = nullptr) const;
    double elapsed() const { return t_; }

  private:
    MatrixXd gram_;
    VectorXd phi_prev_;
    bool primed_ = false;
    double t_ = 0.0;
};

}  // namespace dremid
