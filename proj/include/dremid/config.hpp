#pragma once

#include <map>
#include <string>
#include <vector>

#include "dremid/common.hpp"
#include "dremid/systems.hpp"

namespace dremid {

// Declarative description of one experiment. Parsed from flat
// section/key=value text; see presets/ for examples.
struct ScenarioConfig {
    // [scenario]
    std::string model = "class1_synthetic";  // class1_synthetic | shank
    double t_end = 60.0;
    double dt = 1e-4;
    int decimation = 100;  // output every decimation-th step
    double switch_on = 0.0;
    bool estimator_enabled = true;

    // [class1]
    double c1_theta1 = 2.0;
    double c1_theta2 = 3.0;
    double c1_theta3 = 0.5;
    double c1_x0 = 2.0;

    // [input] (class1 excitation)
    Excitation excitation{2.0, {0.75, 0.5}, {1.0, 2.5}, {0.0, 0.0}};

    // [shank]
    ShankParams shank;
    bool shank_x0_auto = true;  // start at the unforced equilibrium angle
    double shank_x0 = 0.0;
    double shank_xdot0 = 0.0;

    // [controller]
    TrackingController ctrl;

    // [reference]
    ReferenceGenerator ref = ReferenceGenerator::shank_default();

    // [filters]
    double lambda = 600.0;

    // [estimator]
    double gamma_w = 1.0;
    double f0 = 1.0;
    double gamma_theta = 1e3;  // Gamma = gamma_theta * I
    double ie_cc = 1e-3;

    // [t_w]
    int sign_theta1 = 1;
    double alpha = 10.0;
    bool alpha_auto = false;  // alpha = 2 * alpha_min over the bounds
    double t_g = 10.0;        // T_G = t_g * I
    double rho_g = 20.0;

    // [bounds] (theta box for verification: theta1 [, theta2], eta...)
    std::vector<double> bounds_lo;
    std::vector<double> bounds_hi;
    int grid_per_dim = 3;
    int random_samples = 64;
    std::uint64_t sample_seed = 12345;

    // [gradient] (class II second stage)
    bool grad_enabled = false;
    double grad_gain = 200.0;
    double grad_lambda = 10.0;
    double grad_on = 30.0;

    // [output]
    std::string out_dir = "out";
    std::string prefix = "run";
    bool write_trajectory = true;
    bool write_estimator = true;
    bool write_plots = true;
    bool verbose_w = false;

    // residual gate for consistency checks; <= 0 selects the per-model
    // default (5/lambda + 0.1 for class 1, 10/lambda for class 2)
    double resid_gate = -1.0;

    bool is_class1() const { return model == "class1_synthetic"; }
    double effective_resid_gate() const {
        if (resid_gate > 0.0) return resid_gate;
        return is_class1() ? 5.0 / lambda + 0.1 : 10.0 / lambda;
    }
};

// Built-in presets.
ScenarioConfig preset_class1_synthetic();
ScenarioConfig preset_shank();
std::vector<std::string> preset_names();
ScenarioConfig preset_by_name(const std::string& name);

// Parse a config file. Collects all problems (with section.key locations)
// and throws ConfigError listing them.
ScenarioConfig load_config(const std::string& path);

// Serialize; load_config(save_config(c)) round-trips.
void save_config(const ScenarioConfig& cfg, const std::string& path);

// Validation used by load_config and before every run.
std::vector<std::string> validate_config(const ScenarioConfig& cfg);

// Set one scalar field by sweep-parameter name (gamma_w, gamma_theta,
// lambda, dt, alpha, t_end, switch_on, grad_gain, f0).
void set_sweep_param(ScenarioConfig& cfg, const std::string& name, double value);

}  // namespace dremid
