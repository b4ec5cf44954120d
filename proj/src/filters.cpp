#include "dremid/filters.hpp"

namespace dremid {

namespace {

// RK4 step of the 1- or 2-stage cascade zdot = lambda*(u - z) with the input
// linearly interpolated over the step.
void rk4_cascade(double lambda, double& z1, double& z2, bool two_stage, double u0, double u1,
                 double dt) {
    const double um = 0.5 * (u0 + u1);
    auto f1 = [lambda](double u, double a) { return lambda * (u - a); };

    // stage 1 (driven by the external input)
    const double k1 = f1(u0, z1);
    const double k2 = f1(um, z1 + 0.5 * dt * k1);
    const double k3 = f1(um, z1 + 0.5 * dt * k2);
    const double k4 = f1(u1, z1 + dt * k3);

    if (two_stage) {
        // stage 2 is driven by stage 1's state, so propagate the same RK4
        // stage values through the cascade.
        const double a1 = z1;
        const double a2 = z1 + 0.5 * dt * k1;
        const double a3 = z1 + 0.5 * dt * k2;
        const double a4 = z1 + dt * k3;
        const double m1 = f1(a1, z2);
        const double m2 = f1(a2, z2 + 0.5 * dt * m1);
        const double m3 = f1(a3, z2 + 0.5 * dt * m2);
        const double m4 = f1(a4, z2 + dt * m3);
        z2 += dt / 6.0 * (m1 + 2.0 * m2 + 2.0 * m3 + m4);
    }
    z1 += dt / 6.0 * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
}

}  // namespace

FilterState::FilterState(FilterSpec spec) : spec_(spec) {
    if (!(spec.lambda > 0.0)) throw ConfigError("filter lambda must be > 0");
}

int FilterState::dim() const {
    return (spec_.kind == FilterKind::Low1 || spec_.kind == FilterKind::HighPass1) ? 1 : 2;
}

void FilterState::reset() {
    z1 = z2 = 0.0;
    t = 0.0;
    primed_ = false;
    u_prev_ = 0.0;
}

double FilterState::output(double input) const {
    const double lam = spec_.lambda;
    switch (spec_.kind) {
        case FilterKind::Low1: return z1;
        case FilterKind::HighPass1: return lam * (input - z1);
        case FilterKind::Low2: return z2;
        case FilterKind::Deriv2Low2: return lam * lam * (input - 2.0 * z1 + z2);
    }
    return 0.0;
}

double FilterState::step(double input, double dt) {
    if (!(dt > 0.0)) throw ConfigError("filter_step: dt must be > 0");
    require_finite(input, "filter input");
    if (!primed_) {
        u_prev_ = input;
        primed_ = true;
    }
    rk4_cascade(spec_.lambda, z1, z2, dim() == 2, u_prev_, input, dt);
    u_prev_ = input;
    t += dt;
    return output(input);
}

SwapTermState::SwapTermState(double lambda_) : lambda(lambda_) {
    if (!(lambda > 0.0)) throw ConfigError("swap term lambda must be > 0");
}

void SwapTermState::reset() {
    inner_z = outer_z = 0.0;
    t = 0.0;
    primed = false;
    s_prev = a_prev = adot_prev = 0.0;
}

double SwapTermState::step(double s, double a, double adot, double dt) {
    if (!(dt > 0.0)) throw ConfigError("swap step: dt must be > 0");
    require_finite(s, "swap s");
    require_finite(a, "swap a");
    require_finite(adot, "swap adot");
    if (!primed) {
        s_prev = s;
        a_prev = a;
        adot_prev = adot;
        primed = true;
    }

    const double lam = lambda;
    auto interp = [](double v0, double v1, double tau) { return v0 + tau * (v1 - v0); };
    auto deriv = [lam, this, &interp, s, adot](double zi, double zo, double tau, double* dzi,
                                               double* dzo) {
        const double st = interp(s_prev, s, tau);
        const double at = interp(adot_prev, adot, tau);
        *dzi = lam * (st - zi);
        *dzo = lam * (at * (st - zi) - zo);
    };

    double k1i, k1o, k2i, k2o, k3i, k3o, k4i, k4o;
    deriv(inner_z, outer_z, 0.0, &k1i, &k1o);
    deriv(inner_z + 0.5 * dt * k1i, outer_z + 0.5 * dt * k1o, 0.5, &k2i, &k2o);
    deriv(inner_z + 0.5 * dt * k2i, outer_z + 0.5 * dt * k2o, 0.5, &k3i, &k3o);
    deriv(inner_z + dt * k3i, outer_z + dt * k3o, 1.0, &k4i, &k4o);
    inner_z += dt / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
    outer_z += dt / 6.0 * (k1o + 2.0 * k2o + 2.0 * k3o + k4o);

    s_prev = s;
    a_prev = a;
    adot_prev = adot;
    t += dt;
    return output(s, a);
}

double swap_hdot4_xddot(SwapTermState& state, double /*x*/, double xdot, double h4_d1,
                        double h4_d2, double dt) {
    const double s = xdot * xdot;
    const double a = 0.5 * h4_d1;
    const double adot = 0.5 * h4_d2 * xdot;
    return state.step(s, a, adot, dt);
}

double swap_h3ratio_xddot(SwapTermState& state, double /*x*/, double xdot, double h3, double h3_d1,
                          double h3_d2, double dt, double h3_floor) {
    if (std::abs(h3) < h3_floor) throw SingularityError("swap_h3ratio: |h3| below floor");
    const double r = h3_d1 / h3;
    const double s = xdot * xdot;
    const double a = 0.5 * r;
    const double adot = 0.5 * (h3_d2 / h3 - r * r) * xdot;
    return state.step(s, a, adot, dt);
}

SwapPsiState::SwapPsiState(double lambda_, int p_dim, int k_dim)
    : lambda(lambda_),
      inner_z(VectorXd::Zero(k_dim)),
      outer_z(VectorXd::Zero(p_dim)),
      psi_a_prev(MatrixXd::Zero(p_dim, k_dim)),
      psi_a_d1_prev(MatrixXd::Zero(p_dim, k_dim)),
      psi_c_prev(VectorXd::Zero(k_dim)) {
    if (!(lambda > 0.0)) throw ConfigError("swap_psi lambda must be > 0");
}

void SwapPsiState::reset() {
    inner_z.setZero();
    outer_z.setZero();
    t = 0.0;
    primed = false;
    xdot_prev = 0.0;
    psi_a_prev.setZero();
    psi_a_d1_prev.setZero();
    psi_c_prev.setZero();
}

VectorXd swap_psi(SwapPsiState& state, double /*x*/, double xdot, const MatrixXd& psi_a,
                  const MatrixXd& psi_a_d1, const VectorXd& psi_c, double dt) {
    const int p = static_cast<int>(state.outer_z.size());
    const int k = static_cast<int>(state.inner_z.size());
    if (psi_a.rows() != p || psi_a.cols() != k || psi_a_d1.rows() != p || psi_a_d1.cols() != k ||
        psi_c.size() != k) {
        throw ConfigError("swap_psi: psi_a/psi_b dimensions inconsistent with p_eta");
    }
    if (!(dt > 0.0)) throw ConfigError("swap_psi: dt must be > 0");
    require_finite(psi_c, "psi_c");
    if (!state.primed) {
        state.xdot_prev = xdot;
        state.psi_a_prev = psi_a;
        state.psi_a_d1_prev = psi_a_d1;
        state.psi_c_prev = psi_c;
        state.primed = true;
    }

    const double lam = state.lambda;
    auto deriv = [&](const VectorXd& zi, const VectorXd& zo, double tau, VectorXd* dzi,
                     VectorXd* dzo) {
        const VectorXd ct = state.psi_c_prev + tau * (psi_c - state.psi_c_prev);
        const MatrixXd adt = state.psi_a_d1_prev + tau * (psi_a_d1 - state.psi_a_d1_prev);
        const double xt = state.xdot_prev + tau * (xdot - state.xdot_prev);
        *dzi = lam * (ct - zi);
        *dzo = lam * (adt * (xt * (ct - zi)) - zo);
    };

    VectorXd k1i(k), k1o(p), k2i(k), k2o(p), k3i(k), k3o(p), k4i(k), k4o(p);
    deriv(state.inner_z, state.outer_z, 0.0, &k1i, &k1o);
    deriv(state.inner_z + 0.5 * dt * k1i, state.outer_z + 0.5 * dt * k1o, 0.5, &k2i, &k2o);
    deriv(state.inner_z + 0.5 * dt * k2i, state.outer_z + 0.5 * dt * k2o, 0.5, &k3i, &k3o);
    deriv(state.inner_z + dt * k3i, state.outer_z + dt * k3o, 1.0, &k4i, &k4o);
    state.inner_z += dt / 6.0 * (k1i + 2.0 * k2i + 2.0 * k3i + k4i);
    state.outer_z += dt / 6.0 * (k1o + 2.0 * k2o + 2.0 * k3o + k4o);

    state.xdot_prev = xdot;
    state.psi_a_prev = psi_a;
    state.psi_a_d1_prev = psi_a_d1;
    state.psi_c_prev = psi_c;
    state.t += dt;

    return psi_a * (lam * (psi_c - state.inner_z)) - state.outer_z;
}

}  // namespace dremid
