#include <doctest.h>

#include "dremid/estimator.hpp"
#include "dremid/systems.hpp"

using namespace dremid;

TEST_SUITE_BEGIN("estimator");

TEST_CASE("adjugate conventions at the edges") {
    // 1x1: empty-minor convention adj = [1]
    MatrixXd one(1, 1);
    one << 42.0;
    MatrixXd adj;
    double det;
    adjugate_det(one, adj, det);
    CHECK(adj(0, 0) == 1.0);
    CHECK(det == 42.0);

    // zero matrix, s >= 2: adjugate vanishes
    adjugate_det(MatrixXd::Zero(3, 3), adj, det);
    CHECK(adj.norm() == 0.0);
    CHECK(det == 0.0);

    // 2x2 closed form
    MatrixXd m(2, 2);
    m << 1, 2, 3, 4;
    adjugate_det(m, adj, det);
    CHECK(det == doctest::Approx(-2.0));
    CHECK(adj(0, 0) == doctest::Approx(4.0));
    CHECK(adj(0, 1) == doctest::Approx(-2.0));
    CHECK(adj(1, 0) == doctest::Approx(-3.0));
    CHECK(adj(1, 1) == doctest::Approx(1.0));
}

TEST_CASE("adjugate identity adj(M) M = det(M) I on random 5x5 and 7x7") {
    Lcg rng(2024);
    for (int n : {5, 7}) {
        for (int trial = 0; trial < 100; ++trial) {
            MatrixXd m(n, n);
            for (int i = 0; i < n; ++i)
                for (int j = 0; j < n; ++j) m(i, j) = rng.next_in(-2.0, 2.0);
            MatrixXd adj;
            double det;
            adjugate_det(m, adj, det);
            const MatrixXd lhs = adj * m;
            const MatrixXd rhs = det * MatrixXd::Identity(n, n);
            const double scale = std::max(1.0, std::abs(det));
            CHECK((lhs - rhs).cwiseAbs().maxCoeff() / scale < 1e-8);
        }
    }
}

TEST_CASE("adjugate identity survives singular matrices") {
    MatrixXd m(4, 4);
    m.setRandom();
    m.col(3) = 2.0 * m.col(0) - m.col(1);  // rank deficient
    MatrixXd adj;
    double det;
    adjugate_det(m, adj, det);
    CHECK(std::abs(det) < 1e-12);
    CHECK((adj * m).cwiseAbs().maxCoeff() < 1e-12);
}

TEST_CASE("adjugate dimension guard") {
    CHECK_THROWS_AS(adjugate(MatrixXd::Zero(17, 17)), ConfigError);
    CHECK_THROWS_AS(adjugate(MatrixXd::Zero(2, 3)), ConfigError);
}

namespace {

NlpreMapping scalar_mapping() {
    NlpreMapping m;
    m.s = 1;
    m.ell = 1;
    m.T_W = MatrixXd::Identity(1, 1);
    m.W = [](const VectorXd& th) { return th; };
    return m;
}

}  // namespace

TEST_CASE("scalar closed form: F = 1/(1+t), Delta = t/(1+t), What -> theta") {
    // s = 1, phi = 1, gamma_w = f0 = 1, Y = theta* = 0.8.
    const double theta_star = 0.8;
    LsDremEstimator est(scalar_mapping(), 1.0, 1.0, MatrixXd::Identity(1, 1), VectorXd::Zero(1),
                        VectorXd::Zero(1));
    VectorXd X = VectorXd::Zero(est.size());
    est.init_state(as_span(X));
    VectorXd phi = VectorXd::Ones(1);

    Rk4Stepper stepper(est.size());
    OdeRhs rhs = [&](double, const VectorXd& x, VectorXd& dx) {
        est.deriv(as_span(x), theta_star * phi[0], phi,
                  {dx.data(), static_cast<std::size_t>(est.size())});
    };

    const double dt = 1e-3;
    double worst_f = 0.0, worst_d = 0.0, worst_w = 0.0, prev_delta = -1.0;
    for (long k = 0; k < 10000; ++k) {
        stepper.step(rhs, k * dt, dt, X);
        const double t = (k + 1) * dt;
        const double f = X[1];  // layout: [What | F | theta]
        double delta;
        est.mixed_signals(as_span(X), &delta, nullptr);
        worst_f = std::max(worst_f, std::abs(f - 1.0 / (1.0 + t)));
        worst_d = std::max(worst_d, std::abs(delta - t / (1.0 + t)));
        worst_w = std::max(worst_w, std::abs(X[0] - theta_star * t / (1.0 + t)));
        CHECK(delta >= prev_delta - 1e-12);
        CHECK(delta < 1.0);
        prev_delta = delta;
    }
    CHECK(worst_f < 1e-6);
    CHECK(worst_d < 1e-6);
    CHECK(worst_w < 1e-6);  // What follows theta* t/(1+t) exactly
    // theta_hat contracts at rate Delta^2: err(t) = theta* exp(-I(t)) with
    // I(t) = t - 2 log(1+t) + t/(1+t)
    const double t_end = 10.0;
    const double I = t_end - 2.0 * std::log(1.0 + t_end) + t_end / (1.0 + t_end);
    CHECK(std::abs((theta_star - X[2]) - theta_star * std::exp(-I)) < 1e-6);
}

TEST_CASE("scalar closed form holds for general gains: F = 1/(f0 + gamma t)") {
    const double gamma = 3.0, f0 = 0.5, theta_star = -1.2;
    LsDremEstimator est(scalar_mapping(), gamma, f0, MatrixXd::Identity(1, 1), VectorXd::Zero(1),
                        VectorXd::Zero(1));
    VectorXd X(est.size());
    est.init_state(as_span(X));
    Rk4Stepper stepper(est.size());
    const VectorXd phi = VectorXd::Ones(1);
    OdeRhs rhs = [&](double, const VectorXd& x, VectorXd& dx) {
        est.deriv(as_span(x), theta_star, phi, as_span(dx));
    };
    const double dt = 1e-4;
    double worst = 0.0;
    for (long k = 0; k < 50000; ++k) {
        stepper.step(rhs, k * dt, dt, X);
        const double tt = (k + 1) * dt;
        double delta;
        est.mixed_signals(as_span(X), &delta, nullptr);
        worst = std::max(worst, std::abs(X[1] - 1.0 / (f0 + gamma * tt)));
        worst = std::max(worst, std::abs(delta - gamma * tt / (f0 + gamma * tt)));
    }
    CHECK(worst < 1e-6);
}

TEST_CASE("zero regressor freezes the LS stage; Delta(0) = 0 freezes theta") {
    NlpreMapping m;
    m.s = 3;
    m.ell = 2;
    m.T_W = MatrixXd::Ones(2, 3);
    m.W = [](const VectorXd& th) {
        VectorXd w(3);
        w << th[0], th[1], th[0] * th[1];
        return w;
    };
    VectorXd W0(3);
    W0 << 0.3, -0.2, 0.9;
    VectorXd th0(2);
    th0 << 1.0, -2.0;
    LsDremEstimator est(m, 5.0, 2.0, MatrixXd::Identity(2, 2), W0, th0);
    VectorXd X(est.size()), dX(est.size());
    est.init_state(as_span(X));

    double delta;
    est.mixed_signals(as_span(X), &delta, nullptr);
    CHECK(delta == 0.0);  // I - f0 F(0) is the zero matrix

    est.deriv(as_span(X), 1.23, VectorXd::Zero(3), as_span(dX));
    CHECK(dX.cwiseAbs().maxCoeff() == 0.0);  // phi = 0 and Delta = 0
}

TEST_CASE("F stays symmetric PD and lambda_max is nonincreasing under excitation") {
    NlpreMapping m;
    m.s = 2;
    m.ell = 2;
    m.T_W = MatrixXd::Identity(2, 2);
    m.W = [](const VectorXd& th) { return th; };
    LsDremEstimator est(m, 3.0, 0.5, MatrixXd::Identity(2, 2), VectorXd::Zero(2),
                        VectorXd::Zero(2));
    VectorXd X(est.size());
    est.init_state(as_span(X));
    VectorXd theta_star(2);
    theta_star << 1.0, -0.5;

    Rk4Stepper stepper(est.size());
    VectorXd phi(2);
    double t_now = 0.0;
    OdeRhs rhs = [&](double t, const VectorXd& x, VectorXd& dx) {
        phi << std::sin(t), std::cos(2.0 * t);
        est.deriv(as_span(x), phi.dot(theta_star), phi, as_span(dx));
    };
    const double dt = 1e-3;
    double prev_max = std::numeric_limits<double>::infinity();
    for (long k = 0; k < 20000; ++k) {
        stepper.step(rhs, t_now, dt, X);
        t_now += dt;
        const double asym = est.resymmetrize_F(as_span(X));
        CHECK(asym < 1e-9);
        if (k % 500 == 0) {
            const MatrixXd F = est.F(as_span(X));
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(F);
            CHECK(es.eigenvalues().minCoeff() > 0.0);
            CHECK(es.eigenvalues().maxCoeff() <= prev_max + 1e-9);
            prev_max = es.eigenvalues().maxCoeff();
        }
    }
    // d(F^-1)/dt = gamma phi phi' integrates to gamma * Gram
    const MatrixXd Finv = est.F(as_span(X)).inverse();
    CHECK(Finv(0, 0) > 1.0 / 0.5);  // grew beyond f0^-1... F^{-1}(0) = f0 I
}

TEST_CASE("estimator_errors reports componentwise absolute errors") {
    VectorXd a(2), b(2);
    a << 1.0, 2.0;
    b << 1.0, 2.0;
    auto e = estimator_errors(a, b);
    CHECK(e.norm == 0.0);
    CHECK(e.component.maxCoeff() == 0.0);
    b << 0.5, 2.5;
    e = estimator_errors(a, b);
    CHECK(e.component[0] == doctest::Approx(0.5));
    CHECK(e.component[1] == doctest::Approx(0.5));
    CHECK_THROWS_AS(estimator_errors(a, VectorXd::Zero(3)), ConfigError);
}

TEST_CASE("gradient stage holds an exact initial estimate") {
    // c0 = c_true and exact regression data: the residual stays ~0 and c
    // never moves beyond integration noise.
    const double c_true = 5.0, lam = 10.0;
    GradientStage g(lam, 500.0, c_true);
    std::array<double, 4> X{}, dX{};
    g.init_state(X);

    // synthetic trajectory xdot(t) with xddot = rhs_known + c*m_raw
    Rk4Stepper stepper(4);
    VectorXd S = Eigen::Map<VectorXd>(X.data(), 4);
    OdeRhs rhs = [&](double t, const VectorXd& x, VectorXd& dx) {
        const double xdot = std::sin(t);
        const double m_raw = 0.5 + 0.3 * std::cos(2.0 * t);
        const double rhs_known = std::cos(t) - c_true * m_raw;  // xddot - c m
        std::array<double, 4> dxa{};
        g.deriv({x.data(), 4}, xdot, rhs_known, m_raw, dxa);
        for (int i = 0; i < 4; ++i) dx[i] = dxa[i];
    };
    const double dt = 1e-4;
    for (long k = 0; k < 50000; ++k) stepper.step(rhs, k * dt, dt, S);
    CHECK(std::abs(S[3] - c_true) < 1e-4);
}

TEST_CASE("gradient stage converges from zero on an excited regression") {
    const double c_true = 5.0, lam = 10.0;
    GradientStage g(lam, 500.0, 0.0);
    VectorXd S = VectorXd::Zero(4);
    Rk4Stepper stepper(4);
    OdeRhs rhs = [&](double t, const VectorXd& x, VectorXd& dx) {
        const double xdot = std::sin(t);
        const double m_raw = 0.5 + 0.3 * std::cos(2.0 * t);
        const double rhs_known = std::cos(t) - c_true * m_raw;
        std::array<double, 4> dxa{};
        g.deriv({x.data(), 4}, xdot, rhs_known, m_raw, dxa);
        for (int i = 0; i < 4; ++i) dx[i] = dxa[i];
    };
    const double dt = 1e-4;
    for (long k = 0; k < 100000; ++k) stepper.step(rhs, k * dt, dt, S);
    CHECK(std::abs(S[3] - c_true) / c_true < 0.01);
}

TEST_SUITE_END();
