#pragma once

#include "dremid/common.hpp"

namespace dremid {

// Stable first-order building blocks, all realized from the single state
// equation zdot = lambda*(u - z):
//
//   Low1       y = z                          lambda/(p+lambda)
//   HighPass1  y = lambda*(u - z)             lambda*p/(p+lambda)
//   Low2       y = z2 (two cascaded stages)   lambda^2/(p+lambda)^2
//   Deriv2Low2 y = lambda^2*(u - 2 z1 + z2)   lambda^2 p^2/(p+lambda)^2
//
// None of them differentiates its input; the derivative action is algebraic
// feed-through. Deriv2Low2 is intended to be fed a measured rate signal so
// that a second derivative of the underlying quantity is never formed.
enum class FilterKind { Low1, HighPass1, Low2, Deriv2Low2 };

struct FilterSpec {
    FilterKind kind = FilterKind::Low1;
    double lambda = 1.0;  // [1/s], > 0
};

inline double low1_deriv(double lambda, double z, double u) { return lambda * (u - z); }

class FilterState {
  public:
    explicit FilterState(FilterSpec spec);

    // Advances the internal state by dt (RK4, input interpolated linearly
    // from the previous call) and returns the output at the new time.
    double step(double input, double dt);

    // Algebraic output at the current state for a given instantaneous input.
    double output(double input) const;

    void reset();

    const FilterSpec& spec() const { return spec_; }
    int dim() const;

    double z1 = 0.0;  // first stage state
    double z2 = 0.0;  // second stage state (Low2 / Deriv2Low2 only)
    double t = 0.0;

  private:
    FilterSpec spec_;
    bool primed_ = false;
    double u_prev_ = 0.0;
};

// First-order Swapping Lemma realization for terms of the form
//
//   (lambda/(p+lambda)) [ a(t) * d/dt s(t) ]
//     = a * (lambda p/(p+lambda)) s  -  (lambda/(p+lambda)) [ adot * (p/(p+lambda)) s ]
//
// computed without differentiating s. Two Low1 states are kept:
//   inner_z = Low1(s)           so (p/(p+lambda)) s = s - inner_z
//   outer_z = Low1(adot * (s - inner_z))
// and the output is a*lambda*(s - inner_z) - outer_z.
struct SwapTermState {
    explicit SwapTermState(double lambda_);

    double lambda;
    double inner_z = 0.0;
    double outer_z = 0.0;
    double t = 0.0;

    // previous raw inputs for stage interpolation
    bool primed = false;
    double s_prev = 0.0;
    double a_prev = 0.0;
    double adot_prev = 0.0;

    void reset();

    // Advance by dt with current (s, a, adot); returns the swap output.
    double step(double s, double a, double adot, double dt);

    // Output at the current states without advancing.
    double output(double s, double a) const { return a * lambda * (s - inner_z) - outer_z; }
};

// (lambda/(p+lambda)) (h4dot * xddot) from measured x, xdot only, using
// h4dot*xddot = (1/2) h4'(x) d/dt(xdot^2):
//   = 1/2 [ h4' * (lambda p/(p+lambda))(xdot^2)
//           - (lambda/(p+lambda)) ( h4'' * xdot * (p/(p+lambda))(xdot^2) ) ]
double swap_hdot4_xddot(SwapTermState& state, double x, double xdot, double h4_d1, double h4_d2,
                        double dt);

// (lambda/(p+lambda)) ((h3dot/h3) * xddot), same construction with
// a = h3'/h3 and adot = (h3''/h3 - (h3'/h3)^2) * xdot.
// Throws SingularityError when |h3| < floor.
double swap_h3ratio_xddot(SwapTermState& state, double x, double xdot, double h3, double h3_d1,
                          double h3_d2, double dt, double h3_floor = 1e-9);

// Vector swap for (lambda/(p+lambda)) [ psi_a(x) * d/dt psi_c(xdot) ]:
//   = psi_a*(lambda p/(p+lambda)) psi_c
//     - (lambda/(p+lambda)) [ psi_a'(x)*xdot*(p/(p+lambda)) psi_c ]
// psi_a is p x k, psi_c is the k-vector that gets filtered (the
// antiderivative factor: only psi_c is ever fed to a filter, its derivative
// is never formed).
struct SwapPsiState {
    SwapPsiState(double lambda_, int p_dim, int k_dim);

    double lambda;
    VectorXd inner_z;  // k states, Low1(psi_c)
    VectorXd outer_z;  // p states, Low1(psi_a' * xdot * (psi_c - inner_z))
    double t = 0.0;

    bool primed = false;
    double xdot_prev = 0.0;
    MatrixXd psi_a_prev;
    MatrixXd psi_a_d1_prev;
    VectorXd psi_c_prev;

    void reset();
};

VectorXd swap_psi(SwapPsiState& state, double x, double xdot, const MatrixXd& psi_a,
                  const MatrixXd& psi_a_d1, const VectorXd& psi_c, double dt);

}  // namespace dremid
