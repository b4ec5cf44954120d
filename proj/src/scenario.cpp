#include "dremid/scenario.hpp"

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>

#include <Eigen/Eigenvalues>

#include "dremid/plots.hpp"

namespace dremid {

MappingSpec mapping_from_config(const ScenarioConfig& cfg) {
    MappingSpec spec;
    if (cfg.is_class1()) {
        spec.kind = MappingKind::ClassI;
        spec.n_eta = 1;
        spec.p_eta = 1;
        spec.G = [](const VectorXd& eta) { return eta; };
        spec.grad_G = [](const VectorXd&) { return MatrixXd::Identity(1, 1); };
        spec.T_G = cfg.t_g * MatrixXd::Identity(1, 1);
    } else {
        spec.kind = MappingKind::ClassII;
        spec.n_eta = 3;
        spec.p_eta = 3;
        spec.G = [](const VectorXd& eta) { return eta; };
        spec.grad_G = [](const VectorXd&) { return MatrixXd::Identity(3, 3); };
        spec.T_G = cfg.t_g * MatrixXd::Identity(3, 3);
    }
    spec.rho_G = cfg.rho_g;
    return spec;
}

ParameterBounds bounds_from_config(const ScenarioConfig& cfg) {
    ParameterBounds b;
    const int ell = cfg.is_class1() ? 3 : 4;
    if (cfg.bounds_lo.empty()) throw ConfigError("bounds.lo: required for verification");
    if (static_cast<int>(cfg.bounds_lo.size()) != ell)
        throw ConfigError("bounds.lo: wrong length for this model");
    b.lo = Eigen::Map<const VectorXd>(cfg.bounds_lo.data(), ell);
    b.hi = Eigen::Map<const VectorXd>(cfg.bounds_hi.data(), ell);
    b.grid_per_dim = cfg.grid_per_dim;
    b.random_samples = cfg.random_samples;
    b.seed = cfg.sample_seed;
    return b;
}

ExtendedMapping extended_mapping_from_config(const ScenarioConfig& cfg) {
    MappingSpec spec = mapping_from_config(cfg);
    if (cfg.is_class1()) {
        double alpha = cfg.alpha;
        if (cfg.alpha_auto) alpha = 2.0 * alpha_min(spec, bounds_from_config(cfg));
        return ExtendedMapping::class1(std::move(spec), alpha, cfg.sign_theta1);
    }
    return ExtendedMapping::class2(std::move(spec));
}

namespace {

struct Instrumentation {
    double mon_start = 0.0;
    double gate = 0.0;
    IeMonitor monitor;
    double max_resid = 0.0;
    bool delta_monotone = true, delta_in_range = true, fmax_monotone = true;
    double prev_delta = 0.0, prev_fmax = std::numeric_limits<double>::infinity();
    double ie_time = -1.0;
    double max_f_asym = 0.0;

    explicit Instrumentation(int s) : monitor(s) {}
};

void finish_summary(const ScenarioConfig& cfg, const Instrumentation& ins, RunSummary& sum,
                    const RunTrace& trace) {
    sum.resid_gate = ins.gate;
    sum.max_resid_post_gate = ins.max_resid;
    sum.delta_monotone = ins.delta_monotone;
    sum.delta_in_range = ins.delta_in_range;
    sum.fmax_monotone = ins.fmax_monotone;
    sum.ie_time = ins.ie_time;
    sum.ie_min_eig = ins.monitor.min_eig();
    sum.max_f_asym = ins.max_f_asym;
    if (!trace.delta.empty()) sum.delta_end = trace.delta.back();

    if (!trace.theta_hat.empty()) {
        sum.theta_final = trace.theta_hat.back();
        const auto err = estimator_errors(sum.theta_final, sum.theta_true);
        sum.final_err = err.component;
        sum.final_err_norm = err.norm;
        // slope of log|theta_err| over the final third of the estimation window
        const double t0 = cfg.estimator_enabled ? cfg.switch_on : 0.0;
        const double tail_start = cfg.t_end - (cfg.t_end - t0) / 3.0;
        std::vector<double> ts, logs;
        for (std::size_t i = 0; i < trace.t.size(); ++i) {
            if (trace.t[i] < tail_start) continue;
            const double e = (trace.theta_hat[i] - sum.theta_true).norm();
            ts.push_back(trace.t[i]);
            logs.push_back(std::log(std::max(e, 1e-300)));
        }
        if (ts.size() >= 2) sum.decay_slope = linefit_slope(ts, logs);
    }
}

RunResult run_class1(const ScenarioConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    ClassISystem sys = make_class1_synthetic(cfg.c1_theta1, cfg.c1_theta2, cfg.c1_theta3);
    Class1Regressor reg(sys, cfg.lambda);
    const ExtendedMapping map = extended_mapping_from_config(cfg);
    const int s = map.s();

    std::unique_ptr<LsDremEstimator> est;
    if (cfg.estimator_enabled) {
        const MatrixXd Gamma = cfg.gamma_theta * MatrixXd::Identity(map.ell(), map.ell());
        est = std::make_unique<LsDremEstimator>(make_nlpre(map), cfg.gamma_w, cfg.f0, Gamma,
                                                VectorXd::Zero(s), VectorXd::Zero(map.ell()));
    }

    const int n = sys.n;
    const int off_reg = n;
    const int off_est = off_reg + reg.size();
    const int dim = off_est + (est ? est->size() : 0);

    VectorXd X = VectorXd::Zero(dim);
    X[0] = cfg.c1_x0;
    reg.init_state({X.data() + off_reg, static_cast<std::size_t>(reg.size())});
    if (est) est->init_state({X.data() + off_est, static_cast<std::size_t>(est->size())});

    RunResult res;
    RunSummary& sum = res.summary;
    sum.theta_true = sys.true_theta();
    const VectorXd W_true = map.eval_W(sum.theta_true);

    Instrumentation ins(s);
    ins.gate = cfg.effective_resid_gate();
    ins.mon_start = cfg.estimator_enabled ? cfg.switch_on : 0.0;

    bool est_on = false;
    VectorXd u_vec(1);
    Rk4Stepper stepper(dim);

    OdeRhs rhs = [&](double t, const VectorXd& Xs, VectorXd& dX) {
        dX.setZero();
        u_vec[0] = cfg.excitation(t);
        const VectorXd x = Xs.head(n);
        const VectorXd y = output_class1(sys, x, u_vec);
        const auto sig = reg.signals(x, u_vec, y[0]);
        dX.head(n) = rhs_class1(sys, x, u_vec);
        reg.deriv({Xs.data() + off_reg, static_cast<std::size_t>(reg.size())}, sig,
                  {dX.data() + off_reg, static_cast<std::size_t>(reg.size())});
        if (est && est_on) {
            double Y;
            VectorXd phi;
            reg.outputs({Xs.data() + off_reg, static_cast<std::size_t>(reg.size())}, sig, &Y,
                        &phi);
            est->deriv({Xs.data() + off_est, static_cast<std::size_t>(est->size())}, Y, phi,
                       {dX.data() + off_est, static_cast<std::size_t>(est->size())});
        }
    };

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    RunTrace& trace = res.trace;

    auto record = [&](double t) {
        trace.t.push_back(t);
        trace.x.push_back(X[0]);
        u_vec[0] = cfg.excitation(t);
        trace.u.push_back(u_vec[0]);
        const VectorXd x = X.head(n);
        const VectorXd y = output_class1(sys, x, u_vec);
        trace.aux.push_back(y[0]);
        const auto sig = reg.signals(x, u_vec, y[0]);
        double Y;
        VectorXd phi;
        reg.outputs({X.data() + off_reg, static_cast<std::size_t>(reg.size())}, sig, &Y, &phi);
        trace.Y.push_back(Y);
        trace.phi.push_back(phi);
        trace.resid.push_back(Y - phi.dot(W_true));
        if (est) {
            std::span<const double> es{X.data() + off_est, static_cast<std::size_t>(est->size())};
            double delta;
            est->mixed_signals(es, &delta, nullptr);
            trace.delta.push_back(delta);
            trace.theta_hat.push_back(est->theta_hat(es));
            if (cfg.verbose_w) trace.W_hat.push_back(est->W_hat(es));
            trace.gram_min_eig.push_back(ins.monitor.min_eig());
            // sampled invariants
            if (delta < -1e-12 || delta >= 1.0) ins.delta_in_range = false;
            if (delta < ins.prev_delta - 1e-9 * (1.0 + std::abs(ins.prev_delta)))
                ins.delta_monotone = false;
            ins.prev_delta = delta;
            Eigen::SelfAdjointEigenSolver<MatrixXd> esf(est->F(es), Eigen::EigenvaluesOnly);
            const double fmax = esf.eigenvalues().maxCoeff();
            if (fmax > ins.prev_fmax + 1e-9 * (1.0 + ins.prev_fmax)) ins.fmax_monotone = false;
            ins.prev_fmax = fmax;
            if (ins.ie_time < 0.0 && ins.monitor.min_eig() >= cfg.ie_cc) ins.ie_time = t;
        }
    };

    try {
        record(0.0);
        for (long k = 0; k < n_steps; ++k) {
            const double t = k * cfg.dt;
            est_on = cfg.estimator_enabled && (t >= cfg.switch_on - 0.5 * cfg.dt);
            stepper.step(rhs, t, cfg.dt, X);
            const double t_new = (k + 1) * cfg.dt;
            if (!X.allFinite()) throw SignalError("non-finite state");
            if (est)
                ins.max_f_asym = std::max(
                    ins.max_f_asym,
                    est->resymmetrize_F({X.data() + off_est, static_cast<std::size_t>(est->size())}));

            // per-step residual tracking and excitation accumulation
            u_vec[0] = cfg.excitation(t_new);
            const VectorXd x = X.head(n);
            const VectorXd y = output_class1(sys, x, u_vec);
            const auto sig = reg.signals(x, u_vec, y[0]);
            double Y;
            VectorXd phi;
            reg.outputs({X.data() + off_reg, static_cast<std::size_t>(reg.size())}, sig, &Y, &phi);
            if (t_new > ins.gate)
                ins.max_resid =
                    std::max(ins.max_resid, std::abs(Y - phi.dot(W_true)) / (1.0 + std::abs(Y)));
            if (t_new >= ins.mon_start) ins.monitor.update(phi, cfg.dt);

            if ((k + 1) % cfg.decimation == 0 || k + 1 == n_steps) record(t_new);
        }
        sum.ok = true;
    } catch (const std::exception& ex) {
        sum.ok = false;
        sum.abort_reason = ex.what();
        sum.abort_t = trace.t.empty() ? 0.0 : trace.t.back();
    }

    finish_summary(cfg, ins, sum, trace);
    res.final_aug_state = X;
    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

RunResult run_shank(const ScenarioConfig& cfg) {
    const auto t_start = std::chrono::steady_clock::now();
    ClassIISystem sys = make_shank_class2(cfg.shank);
    Class2Regressor reg(sys, cfg.lambda);
    const ExtendedMapping map = extended_mapping_from_config(cfg);
    const int s = map.s();

    std::unique_ptr<LsDremEstimator> est;
    if (cfg.estimator_enabled) {
        const MatrixXd Gamma = cfg.gamma_theta * MatrixXd::Identity(map.ell(), map.ell());
        est = std::make_unique<LsDremEstimator>(make_nlpre(map), cfg.gamma_w, cfg.f0, Gamma,
                                                VectorXd::Zero(s), VectorXd::Zero(map.ell()));
    }
    std::unique_ptr<GradientStage> grad;
    if (cfg.grad_enabled) {
        if (!est) throw ConfigError("gradient stage requires the estimator");
        grad = std::make_unique<GradientStage>(cfg.grad_lambda, cfg.grad_gain);
    }

    ReferenceGenerator ref = cfg.ref;
    if (ref.max_eig_real() >= 0.0)
        throw ConfigError("reference generator matrix is not Hurwitz");
    TrackingController ctrl = cfg.ctrl;

    // layout: [x, xdot | ref(3) | ctrl z_int | regressor | estimator | grad]
    const int off_ref = 2;
    const int off_ctrl = 5;
    const int off_reg = 6;
    const int off_est = off_reg + reg.size();
    const int off_grad = off_est + (est ? est->size() : 0);
    const int dim = off_grad + (grad ? GradientStage::size() : 0);

    VectorXd X = VectorXd::Zero(dim);
    X[0] = cfg.shank_x0_auto ? shank_equilibrium(cfg.shank) : cfg.shank_x0;
    X[1] = cfg.shank_xdot0;
    reg.init_state({X.data() + off_reg, static_cast<std::size_t>(reg.size())});
    if (est) est->init_state({X.data() + off_est, static_cast<std::size_t>(est->size())});
    if (grad) grad->init_state({X.data() + off_grad, static_cast<std::size_t>(GradientStage::size())});

    ctrl.r0 = ctrl.r_of(X[0], X[1], X[2], X[3]);  // reference starts at the origin

    RunResult res;
    RunSummary& sum = res.summary;
    sum.theta_true = sys.true_theta();
    sum.k1_true = sys.exp_coeff;
    const VectorXd W_true = map.eval_W(sum.theta_true);

    Instrumentation ins(s);
    ins.gate = cfg.effective_resid_gate();
    ins.mon_start = cfg.estimator_enabled ? cfg.switch_on : 0.0;

    bool est_on = false, grad_active = false;
    double max_grad_m = 0.0;
    Rk4Stepper stepper(dim);

    auto u_of = [&](const VectorXd& Xs, double* r_out = nullptr) {
        const double r = ctrl.r_of(Xs[0], Xs[1], Xs[2], Xs[3]);
        if (r_out) *r_out = r;
        return ctrl.u_of(r, Xs[off_ctrl]);
    };

    OdeRhs rhs = [&](double t, const VectorXd& Xs, VectorXd& dX) {
        dX.setZero();
        const double x = Xs[0], xdot = Xs[1];
        if (std::abs(x - cfg.shank.q0) < cfg.shank.q0_floor)
            throw SingularityError("|x - q0| below floor");
        double r;
        const double u = u_of(Xs, &r);
        const double v = u / cfg.shank.J;

        const Eigen::Vector2d dplant = rhs_class2(sys, x, xdot, v);
        dX[0] = dplant[0];
        dX[1] = dplant[1];
        dX.segment<3>(off_ref) = ref.deriv(Xs.segment<3>(off_ref), t);
        dX[off_ctrl] = ctrl.z_int_deriv(r);
        reg.deriv({Xs.data() + off_reg, static_cast<std::size_t>(reg.size())}, x, xdot, v,
                  {dX.data() + off_reg, static_cast<std::size_t>(reg.size())});
        if (est && est_on) {
            double Y;
            VectorXd phi;
            reg.outputs({Xs.data() + off_reg, static_cast<std::size_t>(reg.size())}, x, xdot, v,
                        &Y, &phi);
            est->deriv({Xs.data() + off_est, static_cast<std::size_t>(est->size())}, Y, phi,
                       {dX.data() + off_est, static_cast<std::size_t>(est->size())});
        }
        if (grad && grad_active) {
            std::span<const double> es{X.data() + off_est, static_cast<std::size_t>(est->size())};
            const VectorXd th = est->theta_hat(es);  // step-start estimates (certainty equiv.)
            const double rhs_known =
                sys.f1(x) + sys.f2(x, xdot).dot(sys.G(th.tail(sys.n_eta))) + v;
            const double m_raw = sys.h3(x) * std::exp(th[0] * sys.h4(x));
            grad->deriv({Xs.data() + off_grad, static_cast<std::size_t>(GradientStage::size())},
                        xdot, rhs_known, m_raw,
                        {dX.data() + off_grad, static_cast<std::size_t>(GradientStage::size())});
        }
    };

    const long n_steps = std::lround(cfg.t_end / cfg.dt);
    RunTrace& trace = res.trace;

    auto record = [&](double t) {
        trace.t.push_back(t);
        trace.x.push_back(X[0]);
        trace.xdot.push_back(X[1]);
        trace.xd.push_back(X[off_ref]);
        trace.xdotd.push_back(X[off_ref + 1]);
        const double u = u_of(X);
        const double v = u / cfg.shank.J;
        trace.u.push_back(u);
        trace.aux.push_back(v);
        double Y;
        VectorXd phi;
        reg.outputs({X.data() + off_reg, static_cast<std::size_t>(reg.size())}, X[0], X[1], v, &Y,
                    &phi);
        trace.Y.push_back(Y);
        trace.phi.push_back(phi);
        trace.resid.push_back(Y - phi.dot(W_true));
        if (est) {
            std::span<const double> es{X.data() + off_est, static_cast<std::size_t>(est->size())};
            double delta;
            est->mixed_signals(es, &delta, nullptr);
            trace.delta.push_back(delta);
            trace.theta_hat.push_back(est->theta_hat(es));
            if (cfg.verbose_w) trace.W_hat.push_back(est->W_hat(es));
            trace.gram_min_eig.push_back(ins.monitor.min_eig());
            if (delta < -1e-12 || delta >= 1.0) ins.delta_in_range = false;
            if (delta < ins.prev_delta - 1e-9 * (1.0 + std::abs(ins.prev_delta)))
                ins.delta_monotone = false;
            ins.prev_delta = delta;
            Eigen::SelfAdjointEigenSolver<MatrixXd> esf(est->F(es), Eigen::EigenvaluesOnly);
            const double fmax = esf.eigenvalues().maxCoeff();
            if (fmax > ins.prev_fmax + 1e-9 * (1.0 + ins.prev_fmax)) ins.fmax_monotone = false;
            ins.prev_fmax = fmax;
            if (ins.ie_time < 0.0 && ins.monitor.min_eig() >= cfg.ie_cc) ins.ie_time = t;
        }
        if (grad)
            trace.k1_hat.push_back(X[off_grad + 3]);
    };

    try {
        record(0.0);
        for (long k = 0; k < n_steps; ++k) {
            const double t = k * cfg.dt;
            est_on = cfg.estimator_enabled && (t >= cfg.switch_on - 0.5 * cfg.dt);
            grad_active = grad && (t >= cfg.grad_on - 0.5 * cfg.dt);
            stepper.step(rhs, t, cfg.dt, X);
            const double t_new = (k + 1) * cfg.dt;
            if (!X.allFinite()) throw SignalError("non-finite state");
            if (est)
                ins.max_f_asym = std::max(
                    ins.max_f_asym,
                    est->resymmetrize_F({X.data() + off_est, static_cast<std::size_t>(est->size())}));

            const double u = u_of(X);
            const double v = u / cfg.shank.J;
            double Y;
            VectorXd phi;
            reg.outputs({X.data() + off_reg, static_cast<std::size_t>(reg.size())}, X[0], X[1], v,
                        &Y, &phi);
            if (t_new > ins.gate)
                ins.max_resid =
                    std::max(ins.max_resid, std::abs(Y - phi.dot(W_true)) / (1.0 + std::abs(Y)));
            if (t_new >= ins.mon_start) ins.monitor.update(phi, cfg.dt);
            if (grad && grad_active) max_grad_m = std::max(max_grad_m, std::abs(X[off_grad + 2]));

            if ((k + 1) % cfg.decimation == 0 || k + 1 == n_steps) record(t_new);
        }
        sum.ok = true;
    } catch (const std::exception& ex) {
        sum.ok = false;
        sum.abort_reason = ex.what();
        sum.abort_t = trace.t.empty() ? 0.0 : trace.t.back();
    }

    finish_summary(cfg, ins, sum, trace);
    if (grad) {
        sum.grad_ran = true;
        sum.k1_hat_final = X[off_grad + 3];
        sum.grad_stalled = max_grad_m < 1e-9;
    }
    res.final_aug_state = X;
    sum.wall_seconds =
        std::chrono::duration<double>(std::chrono::steady_clock::now() - t_start).count();
    return res;
}

std::string fmt(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

}  // namespace

RunResult run_scenario(const ScenarioConfig& cfg) {
    auto errs = validate_config(cfg);
    if (!errs.empty()) {
        std::string msg = "invalid config:";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return cfg.is_class1() ? run_class1(cfg) : run_shank(cfg);
}

std::string effective_out_dir(const ScenarioConfig& cfg) {
    if (const char* env = std::getenv("DREMID_OUT_DIR")) return env;
    return cfg.out_dir;
}

std::string summary_text(const ScenarioConfig& cfg, const RunSummary& s) {
    std::string o;
    o += "model = " + cfg.model + "\n";
    o += "ok = " + std::string(s.ok ? "true" : "false") + "\n";
    if (!s.ok) {
        o += "abort_reason = " + s.abort_reason + "\n";
        o += "abort_t = " + fmt(s.abort_t) + "\n";
    }
    for (int i = 0; i < s.theta_true.size(); ++i)
        o += "theta_true_" + std::to_string(i + 1) + " = " + fmt(s.theta_true[i]) + "\n";
    for (int i = 0; i < s.theta_final.size(); ++i)
        o += "theta_hat_" + std::to_string(i + 1) + " = " + fmt(s.theta_final[i]) + "\n";
    for (int i = 0; i < s.final_err.size(); ++i)
        o += "final_err_" + std::to_string(i + 1) + " = " + fmt(s.final_err[i]) + "\n";
    o += "final_err_norm = " + fmt(s.final_err_norm) + "\n";
    o += "decay_slope = " + fmt(s.decay_slope) + "\n";
    o += "ie_min_eig = " + fmt(s.ie_min_eig) + "\n";
    o += "ie_time = " + fmt(s.ie_time) + "\n";
    o += "delta_end = " + fmt(s.delta_end) + "\n";
    o += "resid_gate = " + fmt(s.resid_gate) + "\n";
    o += "max_resid_post_gate = " + fmt(s.max_resid_post_gate) + "\n";
    const double resid_tol = cfg.is_class1() ? 1e-6 : 1e-5;
    o += "nlpre_consistent = " +
         std::string(s.ok && s.max_resid_post_gate <= resid_tol ? "true" : "false") + "\n";
    o += "delta_monotone = " + std::string(s.delta_monotone ? "true" : "false") + "\n";
    o += "delta_in_range = " + std::string(s.delta_in_range ? "true" : "false") + "\n";
    o += "fmax_monotone = " + std::string(s.fmax_monotone ? "true" : "false") + "\n";
    o += "max_f_asym = " + fmt(s.max_f_asym) + "\n";
    if (s.grad_ran) {
        o += "k1_hat = " + fmt(s.k1_hat_final) + "\n";
        o += "k1_true = " + fmt(s.k1_true) + "\n";
        o += "grad_stalled = " + std::string(s.grad_stalled ? "true" : "false") + "\n";
    }
    return o;
}

std::vector<std::string> write_artifacts(const ScenarioConfig& cfg, const RunResult& res) {
    namespace fs = std::filesystem;
    const std::string dir = effective_out_dir(cfg);
    fs::create_directories(dir);
    std::vector<std::string> written;
    const RunTrace& tr = res.trace;
    auto path = [&](const std::string& suffix) { return dir + "/" + cfg.prefix + "_" + suffix; };

    if (cfg.write_trajectory) {
        const std::string p = path("trajectory.csv");
        std::ofstream f(p);
        if (!f) throw ConfigError("cannot write " + p);
        const int s = tr.phi.empty() ? 0 : static_cast<int>(tr.phi.front().size());
        if (cfg.is_class1()) {
            f << "t,x,u,y1,Y";
        } else {
            f << "t,x,xdot,x_d,xdot_d,u,v,Y";
        }
        for (int j = 0; j < s; ++j) f << ",phi_" << (j + 1);
        f << ",resid\n";
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            f << fmt(tr.t[i]) << "," << fmt(tr.x[i]);
            if (!cfg.is_class1()) {
                f << "," << fmt(tr.xdot[i]) << "," << fmt(tr.xd[i]) << "," << fmt(tr.xdotd[i]);
            }
            f << "," << fmt(tr.u[i]) << "," << fmt(tr.aux[i]);
            f << "," << fmt(tr.Y[i]);
            for (int j = 0; j < s; ++j) f << "," << fmt(tr.phi[i][j]);
            f << "," << fmt(tr.resid[i]) << "\n";
        }
        written.push_back(p);
    }

    if (cfg.write_estimator && !tr.theta_hat.empty()) {
        const std::string p = path("estimator.csv");
        std::ofstream f(p);
        if (!f) throw ConfigError("cannot write " + p);
        const int ell = static_cast<int>(tr.theta_hat.front().size());
        f << "t,delta,gram_min_eig";
        for (int j = 0; j < ell; ++j) f << ",theta_hat_" << (j + 1);
        for (int j = 0; j < ell; ++j) f << ",theta_err_" << (j + 1);
        if (!tr.k1_hat.empty()) f << ",k1_hat";
        if (!tr.W_hat.empty())
            for (int j = 0; j < static_cast<int>(tr.W_hat.front().size()); ++j)
                f << ",W_hat_" << (j + 1);
        f << "\n";
        for (std::size_t i = 0; i < tr.t.size(); ++i) {
            f << fmt(tr.t[i]) << "," << fmt(tr.delta[i]) << "," << fmt(tr.gram_min_eig[i]);
            for (int j = 0; j < ell; ++j) f << "," << fmt(tr.theta_hat[i][j]);
            for (int j = 0; j < ell; ++j)
                f << "," << fmt(std::abs(res.summary.theta_true[j] - tr.theta_hat[i][j]));
            if (!tr.k1_hat.empty()) f << "," << fmt(tr.k1_hat[i]);
            if (!tr.W_hat.empty())
                for (int j = 0; j < static_cast<int>(tr.W_hat.front().size()); ++j)
                    f << "," << fmt(tr.W_hat[i][j]);
            f << "\n";
        }
        written.push_back(p);
    }

    {
        const std::string p = path("summary.txt");
        std::ofstream f(p);
        if (!f) throw ConfigError("cannot write " + p);
        f << summary_text(cfg, res.summary);
        written.push_back(p);
    }

    if (cfg.write_plots && !tr.theta_hat.empty()) {
        const int ell = static_cast<int>(tr.theta_hat.front().size());
        for (int j = 0; j < ell; ++j) {
            std::vector<double> err(tr.t.size());
            for (std::size_t i = 0; i < tr.t.size(); ++i)
                err[i] = res.summary.theta_true[j] - tr.theta_hat[i][j];
            const std::string p = path("error_theta_" + std::to_string(j + 1) + ".svg");
            write_svg_plot(p, "parameter error " + std::to_string(j + 1), "t [s]",
                           "theta_" + std::to_string(j + 1) + " - estimate",
                           {{"error", tr.t, err}});
            written.push_back(p);
        }
        if (!tr.k1_hat.empty()) {
            std::vector<double> err(tr.t.size());
            for (std::size_t i = 0; i < tr.t.size(); ++i)
                err[i] = res.summary.k1_true - tr.k1_hat[i];
            const std::string p = path("error_exp_coeff.svg");
            write_svg_plot(p, "exponential coefficient error", "t [s]", "error",
                           {{"error", tr.t, err}});
            written.push_back(p);
        }
    }
    if (cfg.write_plots && !cfg.is_class1() && !tr.t.empty()) {
        {
            const std::string p = path("output.svg");
            write_svg_plot(p, "output tracking", "t [s]", "angle [rad]",
                           {{"x", tr.t, tr.x}, {"x_d", tr.t, tr.xd}});
            written.push_back(p);
        }
        {
            std::vector<double> terr(tr.t.size());
            for (std::size_t i = 0; i < tr.t.size(); ++i) terr[i] = tr.x[i] - tr.xd[i];
            const std::string p = path("tracking_error.svg");
            write_svg_plot(p, "tracking error", "t [s]", "x - x_d [rad]", {{"e", tr.t, terr}});
            written.push_back(p);
        }
    }
    return written;
}

}  // namespace dremid
