#pragma once

#include "dremid/config.hpp"
#include "dremid/estimator.hpp"
#include "dremid/monotone.hpp"
#include "dremid/regressors.hpp"
#include "dremid/systems.hpp"

namespace dremid {

// Decimated time series recorded during a run.
struct RunTrace {
    std::vector<double> t;
    std::vector<double> x, xdot;        // xdot used by class 2 only
    std::vector<double> u;              // physical input
    std::vector<double> aux;            // class 1: y1; class 2: u/J
    std::vector<double> xd, xdotd;      // reference (class 2)
    std::vector<double> Y;
    std::vector<VectorXd> phi;
    std::vector<double> resid;          // Y - phi' W(theta_true)
    std::vector<double> delta;
    std::vector<VectorXd> theta_hat;
    std::vector<VectorXd> W_hat;
    std::vector<double> gram_min_eig;
    std::vector<double> k1_hat;         // gradient stage (class 2)
};

struct RunSummary {
    bool ok = false;
    std::string abort_reason;
    double abort_t = -1.0;

    VectorXd theta_true, theta_final, final_err;
    double final_err_norm = 0.0;
    double decay_slope = 0.0;      // log|theta_err| LS slope over the final third
    double ie_min_eig = 0.0;
    double ie_time = -1.0;         // first time lambda_min(Gram) >= ie_cc
    double delta_end = 0.0;
    double max_resid_post_gate = 0.0;  // max |resid|/(1+|Y|) past the gate
    double resid_gate = 0.0;
    bool delta_monotone = true;
    bool delta_in_range = true;    // 0 <= Delta < 1 throughout
    bool fmax_monotone = true;     // lambda_max(F) nonincreasing on the trace
    double max_f_asym = 0.0;

    double k1_hat_final = 0.0;     // gradient stage estimate (class 2)
    double k1_true = 0.0;          // exp_coeff ground truth
    bool grad_ran = false;
    bool grad_stalled = false;

    double wall_seconds = 0.0;
};

struct RunResult {
    RunSummary summary;
    RunTrace trace;
    VectorXd final_aug_state;  // full augmented state at t_end (order checks)
};

// Builds the mapping declared by the config (Class I scalar-G or Class II
// identity-G with T_G = t_g * I).
MappingSpec mapping_from_config(const ScenarioConfig& cfg);
ExtendedMapping extended_mapping_from_config(const ScenarioConfig& cfg);
ParameterBounds bounds_from_config(const ScenarioConfig& cfg);

// Deterministic fixed-step simulation of the configured scenario: plant,
// controller/reference (class 2), regressor filters and estimator advance as
// one augmented ODE under shared RK4. Aborts (ok = false) on non-finite
// states or singularity-floor violations.
RunResult run_scenario(const ScenarioConfig& cfg);

// CSV / summary / SVG artifact emission for a finished run. Returns the list
// of files written. The output directory can be overridden with the
// DREMID_OUT_DIR environment variable.
std::vector<std::string> write_artifacts(const ScenarioConfig& cfg, const RunResult& res);

// Effective output directory (config value or environment override).
std::string effective_out_dir(const ScenarioConfig& cfg);

// Serialize the summary as deterministic key = value text.
std::string summary_text(const ScenarioConfig& cfg, const RunSummary& s);

}  // namespace dremid
