#include <doctest.h>

#include <filesystem>
#include <fstream>

#include "dremid/scenario.hpp"

using namespace dremid;
namespace fs = std::filesystem;

TEST_SUITE_BEGIN("cli_config");

namespace {

struct TempDir {
    fs::path dir;
    TempDir() {
        dir = fs::temp_directory_path() / ("dremid_test_" + std::to_string(::getpid()));
        fs::create_directories(dir);
    }
    ~TempDir() { fs::remove_all(dir); }
    std::string file(const std::string& name) const { return (dir / name).string(); }
};

}  // namespace

TEST_CASE("preset configs round-trip through the flat text format") {
    TempDir tmp;
    for (const auto& name : preset_names()) {
        const ScenarioConfig a = preset_by_name(name);
        const std::string p = tmp.file(name + ".cfg");
        save_config(a, p);
        const ScenarioConfig b = load_config(p);
        CHECK(b.model == a.model);
        CHECK(b.t_end == a.t_end);
        CHECK(b.dt == a.dt);
        CHECK(b.lambda == a.lambda);
        CHECK(b.gamma_w == a.gamma_w);
        CHECK(b.gamma_theta == a.gamma_theta);
        CHECK(b.rho_g == a.rho_g);
        CHECK(b.bounds_lo == a.bounds_lo);
        CHECK(b.grad_enabled == a.grad_enabled);
        CHECK(b.ctrl.r_plus_convention == a.ctrl.r_plus_convention);
    }
}

TEST_CASE("config validation catches bad fields with locations") {
    TempDir tmp;
    const std::string p = tmp.file("bad.cfg");
    {
        std::ofstream f(p);
        f << "[scenario]\npreset = class1_synthetic\nt_end = 0\n";
    }
    try {
        load_config(p);
        FAIL("expected ConfigError");
    } catch (const ConfigError& e) {
        CHECK(std::string(e.what()).find("t_end") != std::string::npos);
    }
}

TEST_CASE("unknown keys are rejected") {
    TempDir tmp;
    const std::string p = tmp.file("unk.cfg");
    {
        std::ofstream f(p);
        f << "[scenario]\npreset = class1_synthetic\n[estimator]\ngama_w = 2\n";
    }
    CHECK_THROWS_AS(load_config(p), ConfigError);
}

TEST_CASE("horizon must exceed the estimator switch-on") {
    ScenarioConfig c = preset_class1_synthetic();
    c.t_end = 4.0;  // switch_on = 5
    const auto errs = validate_config(c);
    CHECK(!errs.empty());
}

TEST_CASE("dt-lambda product guard") {
    ScenarioConfig c = preset_class1_synthetic();
    c.dt = 1e-3;  // lambda = 600 -> 0.6
    CHECK(!validate_config(c).empty());
}

TEST_CASE("sweep parameter setter") {
    ScenarioConfig c = preset_class1_synthetic();
    set_sweep_param(c, "gamma_w", 7.5);
    CHECK(c.gamma_w == 7.5);
    set_sweep_param(c, "dt", 5e-5);
    CHECK(c.dt == 5e-5);
    CHECK_THROWS_AS(set_sweep_param(c, "no_such_param", 1.0), ConfigError);
}

TEST_CASE("artifacts: headers, determinism and the output directory override") {
    TempDir tmp;
    ScenarioConfig cfg = preset_class1_synthetic();
    cfg.t_end = 0.4;
    cfg.switch_on = 0.1;
    cfg.gamma_w = 0.02;
    cfg.decimation = 200;
    cfg.out_dir = tmp.file("outA");
    RunResult res = run_scenario(cfg);
    REQUIRE(res.summary.ok);
    const auto files = write_artifacts(cfg, res);
    REQUIRE(files.size() >= 3);

    // stable header contract
    std::ifstream tf(cfg.out_dir + "/class1_trajectory.csv");
    std::string header;
    std::getline(tf, header);
    CHECK(header == "t,x,u,y1,Y,phi_1,phi_2,phi_3,phi_4,phi_5,resid");
    std::ifstream ef(cfg.out_dir + "/class1_estimator.csv");
    std::getline(ef, header);
    CHECK(header ==
          "t,delta,gram_min_eig,theta_hat_1,theta_hat_2,theta_hat_3,theta_err_1,theta_err_2,"
          "theta_err_3");

    // byte-identical on re-run
    ScenarioConfig cfg2 = cfg;
    cfg2.out_dir = tmp.file("outB");
    RunResult res2 = run_scenario(cfg2);
    write_artifacts(cfg2, res2);
    auto slurp = [](const std::string& p) {
        std::ifstream f(p, std::ios::binary);
        return std::string(std::istreambuf_iterator<char>(f), {});
    };
    CHECK(slurp(cfg.out_dir + "/class1_trajectory.csv") ==
          slurp(cfg2.out_dir + "/class1_trajectory.csv"));
    CHECK(slurp(cfg.out_dir + "/class1_estimator.csv") ==
          slurp(cfg2.out_dir + "/class1_estimator.csv"));
    CHECK(slurp(cfg.out_dir + "/class1_summary.txt") ==
          slurp(cfg2.out_dir + "/class1_summary.txt"));

    // environment override wins over the configured directory
    ::setenv("DREMID_OUT_DIR", tmp.file("outEnv").c_str(), 1);
    CHECK(effective_out_dir(cfg) == tmp.file("outEnv"));
    ::unsetenv("DREMID_OUT_DIR");
    CHECK(effective_out_dir(cfg) == cfg.out_dir);
}

TEST_CASE("verbose output adds the extended-estimate columns") {
    TempDir tmp;
    ScenarioConfig cfg = preset_class1_synthetic();
    cfg.t_end = 0.3;
    cfg.switch_on = 0.1;
    cfg.gamma_w = 0.02;
    cfg.verbose_w = true;
    cfg.write_plots = false;
    cfg.out_dir = tmp.file("verbose");
    RunResult res = run_scenario(cfg);
    REQUIRE(res.summary.ok);
    write_artifacts(cfg, res);
    std::ifstream ef(cfg.out_dir + "/class1_estimator.csv");
    std::string header;
    std::getline(ef, header);
    CHECK(header.find("W_hat_1") != std::string::npos);
    CHECK(header.find("W_hat_5") != std::string::npos);
}

TEST_CASE("plots are emitted as self-contained svg") {
    TempDir tmp;
    ScenarioConfig cfg = preset_class1_synthetic();
    cfg.t_end = 0.2;
    cfg.switch_on = 0.05;
    cfg.gamma_w = 0.02;
    cfg.out_dir = tmp.file("plots");
    RunResult res = run_scenario(cfg);
    write_artifacts(cfg, res);
    std::ifstream f(cfg.out_dir + "/class1_error_theta_1.svg");
    REQUIRE(f.good());
    std::string all((std::istreambuf_iterator<char>(f)), {});
    CHECK(all.find("<svg") != std::string::npos);
    CHECK(all.find("polyline") != std::string::npos);
}

TEST_CASE("alpha_auto selects twice the Schur bound over the declared box") {
    ScenarioConfig cfg = preset_class1_synthetic();
    // T_G = 100, rho_G = 200, sup ||T_G G|| = 100, inf |theta1| = 1:
    // alpha_m = 100^2/200 = 50, auto alpha = 100.
    const double am = alpha_min(mapping_from_config(cfg), bounds_from_config(cfg));
    CHECK(am == doctest::Approx(50.0).epsilon(1e-9));
    cfg.alpha_auto = true;
    cfg.alpha = 1.0;  // ignored when auto
    const auto map = extended_mapping_from_config(cfg);
    CHECK(map.alpha() == doctest::Approx(100.0).epsilon(1e-9));
    CHECK(lmi_min_eig(map, sample_box(bounds_from_config(cfg))) > 0.0);
}

TEST_CASE("mapping construction from config matches the model dimensions") {
    const ScenarioConfig c1 = preset_class1_synthetic();
    const auto m1 = extended_mapping_from_config(c1);
    CHECK(m1.ell() == 3);
    CHECK(m1.s() == 5);
    const ScenarioConfig c2 = preset_shank();
    const auto m2 = extended_mapping_from_config(c2);
    CHECK(m2.ell() == 4);
    CHECK(m2.s() == 7);
    // the Class-II builder consumes neither alpha nor sign(theta1)
    ScenarioConfig c2b = c2;
    c2b.alpha = 123.0;
    c2b.sign_theta1 = -1;
    CHECK((extended_mapping_from_config(c2b).build_T_W() - m2.build_T_W()).norm() == 0.0);
}

TEST_SUITE_END();
