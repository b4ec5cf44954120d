#pragma once

#include <functional>
#include <span>

#include "dremid/common.hpp"
#include "dremid/monotone.hpp"

namespace dremid {

// Adjugate and determinant via the Faddeev-LeVerrier recursion (divisions by
// integers only), valid for singular M: adj(M)*M = det(M)*I identically.
// Dimension capped at adjugate_max_dim.
inline constexpr int adjugate_max_dim = 16;

void adjugate_det(const MatrixXd& M, MatrixXd& adj_out, double& det_out);

// Convenience wrapper.
MatrixXd adjugate(const MatrixXd& M);

// Minimal view of an NLPRE mapping as the estimator needs it: the map W,
// the monotonizing matrix and the two dimensions.
struct NlpreMapping {
    int s = 0;
    int ell = 0;
    MatrixXd T_W;  // ell x s
    std::function<VectorXd(const VectorXd&)> W;
};

// The returned mapping holds a reference to `map`, which must outlive it.
NlpreMapping make_nlpre(const ExtendedMapping& map);

// Interlaced least-squares + DREM estimator
//
//   What_dot  = gamma_w * F * phi * (Y - phi' * What)
//   F_dot     = -gamma_w * F * phi * phi' * F,     F(0) = (1/f0) I
//   theta_dot = Delta * Gamma * T_W * (Yc - Delta * W(theta_hat))
//
// with Delta = det(I - f0 F) and Yc = adj(I - f0 F) (What - f0 F W0).
//
// The estimator owns no time stepping: it exposes its state size and a
// derivative evaluation so the caller can integrate it together with the
// plant and the filters. State layout: [What (s) | F row-major (s*s) |
// theta_hat (ell)].
class LsDremEstimator {
  public:
    LsDremEstimator(NlpreMapping map, double gamma_w, double f0, const MatrixXd& Gamma,
                    VectorXd W0, VectorXd theta0);

    int s() const { return s_; }
    int ell() const { return ell_; }
    int size() const { return s_ + s_ * s_ + ell_; }

    // Fills `state` with the initial condition (What = W0, F = (1/f0) I,
    // theta_hat = theta0).
    void init_state(std::span<double> state) const;

    // Derivative of the estimator state given the current regressor sample.
    void deriv(std::span<const double> state, double Y, const VectorXd& phi,
               std::span<double> dstate) const;

    // Delta and the mixed signal Yc at the given state.
    void mixed_signals(std::span<const double> state, double* delta, VectorXd* Yc) const;

    // Symmetrizes F in place (0.5*(F + F')); returns the asymmetry that was
    // removed, for drift monitoring.
    double resymmetrize_F(std::span<double> state) const;

    VectorXd W_hat(std::span<const double> state) const;
    MatrixXd F(std::span<const double> state) const;
    VectorXd theta_hat(std::span<const double> state) const;

    const NlpreMapping& mapping() const { return map_; }
    double f0() const { return f0_; }
    double gamma_w() const { return gamma_w_; }

  private:
    NlpreMapping map_;
    int s_, ell_;
    double gamma_w_, f0_;
    MatrixXd Gamma_;
    VectorXd W0_, theta0_;
    // scratch for the adjugate recursion
    mutable MatrixXd M_, adj_, work_;
};

// Componentwise and norm estimation errors |theta_hat - theta_true|.
struct EstimationErrors {
    VectorXd component;
    double norm = 0.0;
};
EstimationErrors estimator_errors(const VectorXd& theta_hat, const VectorXd& theta_true);

// Second-stage certainty-equivalent gradient estimator for a multiplicative
// coefficient c of a known regressor term, from the scalar filtered
// regression
//
//   z = HP1(xdot) - Low1(rhs_known) = c * Low1(m_raw) + (first-stage error)
//
// advanced by a normalized gradient step  c_dot = g * m * (z - m*c)/(1+m^2).
// State layout: [z_hp | z_rhs | z_m | c_hat].
class GradientStage {
  public:
    GradientStage(double lambda, double gain, double c0 = 0.0);

    static constexpr int size() { return 4; }
    void init_state(std::span<double> state) const;

    // xdot: measured rate; rhs_known: modeled acceleration terms excluding
    // the c-term; m_raw: the unfiltered regressor (the known factor that c
    // multiplies).
    void deriv(std::span<const double> state, double xdot, double rhs_known, double m_raw,
               std::span<double> dstate) const;

    double c_hat(std::span<const double> state) const { return state[3]; }
    double regressor(std::span<const double> state) const { return state[2]; }

    double lambda() const { return lambda_; }

  private:
    double lambda_, gain_, c0_;
};

}  // namespace dremid
