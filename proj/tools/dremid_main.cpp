// Command-line front end: scenario execution, LMI/mapping verification and
// parameter sweeps for the exponential-nonlinearity estimator library.

#include <CLI11.hpp>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>

#include "dremid/scenario.hpp"

namespace {

using namespace dremid;

int cmd_run(const std::string& cfg_path) {
    ScenarioConfig cfg = load_config(cfg_path);
    RunResult res = run_scenario(cfg);
    const auto files = write_artifacts(cfg, res);
    std::cout << summary_text(cfg, res.summary);
    for (const auto& f : files) std::cout << "wrote " << f << "\n";
    if (!res.summary.ok) {
        std::cerr << "run aborted at t = " << res.summary.abort_t << ": "
                  << res.summary.abort_reason << "\n";
        return 1;
    }
    return 0;
}

struct CheckReport {
    bool all_ok = true;
    void line(const std::string& name, bool ok, const std::string& detail) {
        std::cout << (ok ? "[PASS] " : "[FAIL] ") << name << ": " << detail << "\n";
        all_ok = all_ok && ok;
    }
};

int cmd_verify(const std::string& cfg_path, double alpha_override, bool alpha_sweep) {
    ScenarioConfig cfg = load_config(cfg_path);
    if (alpha_override > 0.0) {
        cfg.alpha = alpha_override;
        cfg.alpha_auto = false;
    }
    CheckReport rep;
    char buf[256];

    MappingSpec spec = mapping_from_config(cfg);
    ParameterBounds bounds = bounds_from_config(cfg);
    const auto samples = sample_box(bounds);

    // Assumption A2 spot check on the declared (T_G, rho_G).
    {
        double worst = std::numeric_limits<double>::infinity();
        for (const auto& th : samples) {
            const VectorXd eta = th.tail(spec.n_eta);
            const MatrixXd dg = spec.grad_G(eta);
            const MatrixXd S = spec.T_G * dg + dg.transpose() * spec.T_G.transpose();
            Eigen::SelfAdjointEigenSolver<MatrixXd> es(S, Eigen::EigenvaluesOnly);
            worst = std::min(worst, es.eigenvalues().minCoeff());
        }
        std::snprintf(buf, sizeof(buf), "min eig %.6g vs rho_G %.6g", worst, spec.rho_G);
        rep.line("A2 mapping LMI (sampled)", worst >= spec.rho_G * (1.0 - 1e-9), buf);
    }

    double alpha_m = 0.0;
    if (cfg.is_class1()) {
        alpha_m = alpha_min(spec, bounds);
        std::snprintf(buf, sizeof(buf), "alpha_m = %.6g, configured alpha = %.6g", alpha_m,
                      cfg.alpha_auto ? 2.0 * alpha_m : cfg.alpha);
        rep.line("alpha bound", alpha_m > 0.0, buf);
    }

    const ExtendedMapping map = extended_mapping_from_config(cfg);

    {
        const double me = lmi_min_eig(map, samples);
        const MatrixXd T = map.build_T_W();
        const double scale = std::max(1.0, T.cwiseAbs().maxCoeff());
        std::snprintf(buf, sizeof(buf), "min eig %.6g over %zu samples", me, samples.size());
        rep.line("extended mapping LMI (sampled)", me >= 1e-8 * scale, buf);
    }

    if (alpha_sweep && cfg.is_class1()) {
        std::cout << "alpha,min_eig\n";
        for (int i = 1; i <= 24; ++i) {
            const double a = alpha_m * i / 12.0;
            const ExtendedMapping m =
                ExtendedMapping::class1(mapping_from_config(cfg), a, cfg.sign_theta1);
            std::printf("%.9g,%.9g\n", a, lmi_min_eig(m, samples));
        }
    }

    {
        const double err = jac_fd_max_rel_err(map, samples);
        std::snprintf(buf, sizeof(buf), "max relative deviation %.3g", err);
        rep.line("Jacobian vs finite differences", err <= 1e-6, buf);
    }

    {
        // Ground-truth-parameter regression consistency on a short run.
        ScenarioConfig sim = cfg;
        sim.estimator_enabled = false;
        sim.grad_enabled = false;
        sim.switch_on = 0.0;
        sim.t_end = sim.effective_resid_gate() + 1.0;
        sim.write_trajectory = sim.write_estimator = sim.write_plots = false;
        RunResult r = run_scenario(sim);
        const double tol = sim.is_class1() ? 1e-6 : 1e-5;
        std::snprintf(buf, sizeof(buf), "max |Y - phi'W|/(1+|Y|) = %.3g (tol %.1g) past t = %.3g",
                      r.summary.max_resid_post_gate, tol, r.summary.resid_gate);
        rep.line("regression consistency", r.summary.ok && r.summary.max_resid_post_gate <= tol,
                 buf);
    }

    return rep.all_ok ? 0 : 1;
}

int cmd_sweep(const std::string& cfg_path, const std::string& param,
              const std::vector<double>& values) {
    if (values.empty()) {
        std::cerr << "sweep: empty value list\n";
        return 2;
    }
    ScenarioConfig base = load_config(cfg_path);
    struct Row {
        double value;
        RunSummary sum;
        VectorXd final_state;
    };
    std::vector<Row> rows;
    for (double v : values) {
        ScenarioConfig cfg = base;
        set_sweep_param(cfg, param, v);
        char tag[64];
        std::snprintf(tag, sizeof(tag), "%s_%s_%g", base.prefix.c_str(), param.c_str(), v);
        cfg.prefix = tag;
        Row row;
        row.value = v;
        try {
            RunResult res = run_scenario(cfg);
            write_artifacts(cfg, res);
            row.sum = res.summary;
            row.final_state = res.final_aug_state;
        } catch (const std::exception& ex) {
            row.sum.ok = false;
            row.sum.abort_reason = ex.what();
        }
        rows.push_back(std::move(row));
    }

    const std::string dir = effective_out_dir(base);
    std::filesystem::create_directories(dir);
    const std::string merged = dir + "/" + base.prefix + "_sweep_" + param + ".csv";
    std::ofstream f(merged);
    f << "param,value,ok,final_err_norm,delta_end,ie_time,max_resid_post_gate,decay_slope,"
         "wall_seconds\n";
    for (const auto& r : rows) {
        char line[512];
        std::snprintf(line, sizeof(line), "%s,%.17g,%d,%.17g,%.17g,%.17g,%.17g,%.17g,%.6g\n",
                      param.c_str(), r.value, r.sum.ok ? 1 : 0, r.sum.final_err_norm,
                      r.sum.delta_end, r.sum.ie_time, r.sum.max_resid_post_gate, r.sum.decay_slope,
                      r.sum.wall_seconds);
        f << line;
    }
    std::cout << "wrote " << merged << "\n";

    // For dt sweeps, report the implied integration order between runs
    // relative to the finest step (terminal-state Richardson ratios).
    if (param == "dt" && rows.size() >= 2) {
        std::size_t finest = 0;
        for (std::size_t i = 1; i < rows.size(); ++i)
            if (rows[i].value < rows[finest].value) finest = i;
        if (rows[finest].sum.ok) {
            std::vector<std::pair<double, double>> errs;  // (dt, err)
            for (std::size_t i = 0; i < rows.size(); ++i) {
                if (i == finest || !rows[i].sum.ok) continue;
                if (rows[i].final_state.size() != rows[finest].final_state.size()) continue;
                errs.push_back(
                    {rows[i].value, (rows[i].final_state - rows[finest].final_state).norm()});
            }
            std::sort(errs.begin(), errs.end());
            for (std::size_t i = 0; i + 1 < errs.size(); ++i) {
                const double order = std::log(errs[i + 1].second / errs[i].second) /
                                     std::log(errs[i + 1].first / errs[i].first);
                std::printf("order estimate dt %.3g -> %.3g: %.3f\n", errs[i + 1].first,
                            errs[i].first, order);
            }
        }
    }

    for (const auto& r : rows)
        if (!r.sum.ok)
            std::cerr << "sweep child " << param << " = " << r.value
                      << " failed: " << r.sum.abort_reason << "\n";
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"parameter estimation for systems with non-separable exponential terms"};
    app.require_subcommand(1);

    std::string cfg_path;
    auto* run = app.add_subcommand("run", "simulate a scenario and write artifacts");
    run->add_option("config", cfg_path, "scenario config file")->required();

    std::string vcfg;
    double alpha_override = -1.0;
    bool alpha_sweep = false;
    auto* verify = app.add_subcommand("verify", "LMI, Jacobian and regression checks");
    verify->add_option("config", vcfg, "scenario config file")->required();
    verify->add_option("--alpha", alpha_override, "override the configured alpha");
    verify->add_flag("--alpha-sweep", alpha_sweep, "print an alpha sweep table (CSV)");

    std::string scfg, param;
    std::vector<double> values;
    auto* sweep = app.add_subcommand("sweep", "run a batch over one parameter");
    sweep->add_option("config", scfg, "base scenario config file")->required();
    sweep->add_option("--param", param, "parameter name")->required();
    sweep->add_option("--values", values, "comma separated values")->required()->delimiter(',');

    std::string pname, ppath;
    auto* preset = app.add_subcommand("preset", "write a built-in preset config");
    preset->add_option("name", pname, "class1_synthetic | shank")->required();
    preset->add_option("path", ppath, "output config path")->required();

    CLI11_PARSE(app, argc, argv);

    try {
        if (*run) return cmd_run(cfg_path);
        if (*verify) return cmd_verify(vcfg, alpha_override, alpha_sweep);
        if (*sweep) return cmd_sweep(scfg, param, values);
        if (*preset) {
            save_config(preset_by_name(pname), ppath);
            std::cout << "wrote " << ppath << "\n";
            return 0;
        }
    } catch (const std::exception& ex) {
        std::cerr << "error: " << ex.what() << "\n";
        return 2;
    }
    return 0;
}
