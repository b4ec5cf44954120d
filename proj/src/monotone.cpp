#include "dremid/monotone.hpp"

#include <Eigen/Eigenvalues>

namespace dremid {

MappingSpec identity_mapping(MappingKind kind, int n_eta, double rho_G) {
    MappingSpec spec;
    spec.kind = kind;
    spec.n_eta = n_eta;
    spec.p_eta = n_eta;
    spec.G = [](const VectorXd& eta) { return eta; };
    spec.grad_G = [n_eta](const VectorXd&) { return MatrixXd::Identity(n_eta, n_eta); };
    spec.T_G = 0.5 * rho_G * MatrixXd::Identity(n_eta, n_eta);
    spec.rho_G = rho_G;
    return spec;
}

std::vector<VectorXd> sample_box(const ParameterBounds& bounds) {
    const int dim = static_cast<int>(bounds.lo.size());
    if (bounds.hi.size() != dim) throw ConfigError("bounds lo/hi length mismatch");
    for (int i = 0; i < dim; ++i)
        if (bounds.hi[i] < bounds.lo[i]) throw ConfigError("bounds hi < lo");

    std::vector<VectorXd> out;
    const int g = std::max(2, bounds.grid_per_dim);
    long total = 1;
    for (int i = 0; i < dim && total <= 20000; ++i) total *= g;
    if (total <= 20000) {
        std::vector<int> idx(dim, 0);
        VectorXd p(dim);
        while (true) {
            for (int i = 0; i < dim; ++i) {
                const double f = (g == 1) ? 0.0 : static_cast<double>(idx[i]) / (g - 1);
                p[i] = bounds.lo[i] + f * (bounds.hi[i] - bounds.lo[i]);
            }
            out.push_back(p);
            int k = 0;
            while (k < dim && ++idx[k] == g) idx[k++] = 0;
            if (k == dim) break;
        }
    }
    Lcg rng(bounds.seed);
    VectorXd p(dim);
    for (int r = 0; r < bounds.random_samples; ++r) {
        for (int i = 0; i < dim; ++i) p[i] = rng.next_in(bounds.lo[i], bounds.hi[i]);
        out.push_back(p);
    }
    return out;
}

ExtendedMapping ExtendedMapping::class1(MappingSpec spec, double alpha, int sign_theta1) {
    if (sign_theta1 != 1 && sign_theta1 != -1)
        throw ConfigError("Class-I T_W requires sign(theta1) = +1 or -1");
    if (!(alpha > 0.0)) throw ConfigError("Class-I T_W requires alpha > 0");
    if (spec.T_G.rows() != spec.n_eta || spec.T_G.cols() != spec.p_eta)
        throw ConfigError("T_G must be n_eta x p_eta");
    ExtendedMapping m;
    m.spec_ = std::move(spec);
    m.kind_ = MappingKind::ClassI;
    m.ell_ = 2 + m.spec_.n_eta;
    m.s_ = 3 + 2 * m.spec_.p_eta;
    m.alpha_ = alpha;
    m.sign_theta1_ = sign_theta1;
    return m;
}

ExtendedMapping ExtendedMapping::class2(MappingSpec spec) {
    if (spec.T_G.rows() != spec.n_eta || spec.T_G.cols() != spec.p_eta)
        throw ConfigError("T_G must be n_eta x p_eta");
    ExtendedMapping m;
    m.spec_ = std::move(spec);
    m.kind_ = MappingKind::ClassII;
    m.ell_ = 1 + m.spec_.n_eta;
    m.s_ = 1 + 2 * m.spec_.p_eta;
    return m;
}

VectorXd ExtendedMapping::eval_W(const VectorXd& theta) const {
    if (theta.size() != ell_) throw ConfigError("eval_W: theta dimension mismatch");
    const int p = spec_.p_eta;
    VectorXd w(s_);
    if (kind_ == MappingKind::ClassI) {
        const double t1 = theta[0], t2 = theta[1];
        const VectorXd eta = theta.tail(spec_.n_eta);
        const VectorXd g = spec_.G(eta);
        if (g.size() != p) throw ConfigError("G(eta) dimension mismatch");
        w[0] = t1;
        w[1] = t2;
        w[2] = t1 * t2;
        w.segment(3, p) = t1 * g;
        w.segment(3 + p, p) = t1 * t2 * g;
    } else {
        const double t1 = theta[0];
        const VectorXd eta = theta.tail(spec_.n_eta);
        const VectorXd g = spec_.G(eta);
        if (g.size() != p) throw ConfigError("G(eta) dimension mismatch");
        w[0] = t1;
        w.segment(1, p) = g;
        w.segment(1 + p, p) = t1 * g;
    }
    return w;
}

MatrixXd ExtendedMapping::jac_W(const VectorXd& theta) const {
    if (theta.size() != ell_) throw ConfigError("jac_W: theta dimension mismatch");
    const int p = spec_.p_eta;
    const int n = spec_.n_eta;
    MatrixXd J = MatrixXd::Zero(s_, ell_);
    if (kind_ == MappingKind::ClassI) {
        const double t1 = theta[0], t2 = theta[1];
        const VectorXd eta = theta.tail(n);
        const VectorXd g = spec_.G(eta);
        const MatrixXd dg = spec_.grad_G(eta);
        if (dg.rows() != p || dg.cols() != n) throw ConfigError("grad_G must be p_eta x n_eta");
        J(0, 0) = 1.0;
        J(1, 1) = 1.0;
        J(2, 0) = t2;
        J(2, 1) = t1;
        J.block(3, 0, p, 1) = g;
        J.block(3, 2, p, n) = t1 * dg;
        J.block(3 + p, 0, p, 1) = t2 * g;
        J.block(3 + p, 1, p, 1) = t1 * g;
        J.block(3 + p, 2, p, n) = t1 * t2 * dg;
    } else {
        const double t1 = theta[0];
        const VectorXd eta = theta.tail(n);
        const VectorXd g = spec_.G(eta);
        const MatrixXd dg = spec_.grad_G(eta);
        if (dg.rows() != p || dg.cols() != n) throw ConfigError("grad_G must be p_eta x n_eta");
        J(0, 0) = 1.0;
        J.block(1, 1, p, n) = dg;
        J.block(1 + p, 0, p, 1) = g;
        J.block(1 + p, 1, p, n) = t1 * dg;
    }
    return J;
}

MatrixXd ExtendedMapping::build_T_W() const {
    const int p = spec_.p_eta;
    const int n = spec_.n_eta;
    MatrixXd T = MatrixXd::Zero(ell_, s_);
    if (kind_ == MappingKind::ClassI) {
        T(0, 0) = alpha_;
        T(1, 1) = alpha_;
        T.block(2, 3, n, p) = static_cast<double>(sign_theta1_) * spec_.T_G;
    } else {
        T(0, 0) = 1.0;
        T.block(1, 1, n, p) = spec_.T_G;
    }
    return T;
}

double ExtendedMapping::lmi_min_eig_at(const VectorXd& theta) const {
    const MatrixXd T = build_T_W();
    const MatrixXd J = jac_W(theta);
    const MatrixXd TJ = T * J;
    const MatrixXd S = TJ + TJ.transpose();
    Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
    return es.eigenvalues().minCoeff();
}

double alpha_min(const MappingSpec& spec, const ParameterBounds& bounds) {
    if (spec.kind != MappingKind::ClassI)
        throw ConfigError("alpha_min applies to Class-I mappings only");
    const int ell = 2 + spec.n_eta;
    if (bounds.lo.size() != ell || bounds.hi.size() != ell)
        throw ConfigError("alpha_min: bounds must cover (theta1, theta2, eta)");
    if (bounds.lo[0] <= 0.0 && bounds.hi[0] >= 0.0)
        throw ConfigError("alpha_min: theta1 interval contains 0, alpha is unbounded");
    const double inf_abs_t1 = std::min(std::abs(bounds.lo[0]), std::abs(bounds.hi[0]));
    if (!(spec.rho_G > 0.0)) throw ConfigError("alpha_min: rho_G must be > 0");

    // sup ||T_G G(eta)|| over the eta box, by grid + random sampling.
    ParameterBounds eta_box;
    eta_box.lo = bounds.lo.tail(spec.n_eta);
    eta_box.hi = bounds.hi.tail(spec.n_eta);
    eta_box.grid_per_dim = bounds.grid_per_dim;
    eta_box.random_samples = bounds.random_samples;
    eta_box.seed = bounds.seed;
    double sup_norm2 = 0.0;
    for (const VectorXd& eta : sample_box(eta_box)) {
        const double n2 = (spec.T_G * spec.G(eta)).squaredNorm();
        sup_norm2 = std::max(sup_norm2, n2);
    }
    return sup_norm2 / (inf_abs_t1 * spec.rho_G);
}

double lmi_min_eig(const ExtendedMapping& map, const std::vector<VectorXd>& theta_samples) {
    if (theta_samples.empty()) throw ConfigError("lmi_min_eig: empty sample set");
    double min_eig = std::numeric_limits<double>::infinity();
    for (const VectorXd& theta : theta_samples)
        min_eig = std::min(min_eig, map.lmi_min_eig_at(theta));
    return min_eig;
}

MatrixXd jac_W_fd(const ExtendedMapping& map, const VectorXd& theta, double h) {
    MatrixXd J(map.s(), map.ell());
    VectorXd tp = theta, tm = theta;
    for (int j = 0; j < map.ell(); ++j) {
        const double step = h * std::max(1.0, std::abs(theta[j]));
        tp[j] = theta[j] + step;
        tm[j] = theta[j] - step;
        J.col(j) = (map.eval_W(tp) - map.eval_W(tm)) / (2.0 * step);
        tp[j] = theta[j];
        tm[j] = theta[j];
    }
    return J;
}

double jac_fd_max_rel_err(const ExtendedMapping& map, const std::vector<VectorXd>& theta_samples) {
    double worst = 0.0;
    for (const VectorXd& theta : theta_samples) {
        const MatrixXd Ja = map.jac_W(theta);
        const MatrixXd Jf = jac_W_fd(map, theta);
        const double scale = std::max(1.0, Ja.cwiseAbs().maxCoeff());
        worst = std::max(worst, (Ja - Jf).cwiseAbs().maxCoeff() / scale);
    }
    return worst;
}

}  // namespace dremid
