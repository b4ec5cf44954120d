#include "dremid/config.hpp"

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace dremid {

ScenarioConfig preset_class1_synthetic() {
    ScenarioConfig c;
    c.model = "class1_synthetic";
    c.t_end = 60.0;
    c.dt = 1e-4;
    c.decimation = 100;
    c.switch_on = 5.0;
    c.excitation = Excitation{2.2, {0.9, 0.7, 0.5}, {0.4, 1.3, 3.1}, {0.0, 1.0, 2.0}};
    c.lambda = 600.0;
    c.gamma_w = 20.0;
    c.f0 = 1.0;
    c.gamma_theta = 1e3;
    c.ie_cc = 2e-4;
    c.sign_theta1 = 1;
    // alpha = 2 * alpha_m for T_G = 100 with tight rho_G over the bound box
    c.alpha = 100.0;
    c.t_g = 100.0;
    c.rho_g = 200.0;
    c.bounds_lo = {1.0, 1.0, 0.1};
    c.bounds_hi = {4.0, 5.0, 1.0};
    c.prefix = "class1";
    return c;
}

ScenarioConfig preset_shank() {
    ScenarioConfig c;
    c.model = "shank";
    c.t_end = 70.0;
    c.dt = 5e-5;
    c.decimation = 200;
    c.switch_on = 0.0;
    c.lambda = 10.0;
    c.gamma_w = 1.25e-2;
    c.f0 = 1e-3;
    c.gamma_theta = 1e5;
    c.ie_cc = 2e-4;
    c.sign_theta1 = 1;  // unused by the Class-II mapping
    c.alpha = 1.0;      // unused by the Class-II mapping
    c.t_g = 1.0;        // T_G = (rho_g/2) I with rho_g = 2
    c.rho_g = 2.0;
    c.bounds_lo = {1.0, 0.05, 0.05, 0.5};
    c.bounds_hi = {4.0, 30.0, 30.0, 30.0};
    c.shank.sgn = SignSpec{SignMode::Exact, 1e-6, 100.0};
    c.ctrl.r_plus_convention = true;  // stabilizing error convention
    c.ctrl.sgn = SignSpec{SignMode::Exact, 1e-6, 50.0};
    c.grad_enabled = true;
    c.grad_gain = 200.0;
    c.grad_lambda = 10.0;
    c.grad_on = 55.0;
    c.prefix = "shank";
    return c;
}

std::vector<std::string> preset_names() { return {"class1_synthetic", "shank"}; }

ScenarioConfig preset_by_name(const std::string& name) {
    if (name == "class1_synthetic") return preset_class1_synthetic();
    if (name == "shank") return preset_shank();
    throw ConfigError("unknown preset: " + name);
}

namespace {

using KvMap = std::map<std::string, std::map<std::string, std::string>>;

std::string trim(const std::string& s) {
    const auto a = s.find_first_not_of(" \t\r\n");
    if (a == std::string::npos) return "";
    const auto b = s.find_last_not_of(" \t\r\n");
    return s.substr(a, b - a + 1);
}

KvMap parse_ini(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file: " + path);
    KvMap out;
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos) line = line.substr(0, hash);
        line = trim(line);
        if (line.empty()) continue;
        if (line.front() == '[') {
            if (line.back() != ']')
                throw ConfigError(path + ":" + std::to_string(lineno) + ": malformed section");
            section = trim(line.substr(1, line.size() - 2));
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key = value");
        out[section][trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    return out;
}

class Reader {
  public:
    explicit Reader(KvMap kv) : kv_(std::move(kv)) {}

    bool has(const std::string& sec, const std::string& key) const {
        auto s = kv_.find(sec);
        return s != kv_.end() && s->second.count(key) > 0;
    }
    std::string raw(const std::string& sec, const std::string& key) {
        used_[sec].insert(key);
        return kv_.at(sec).at(key);
    }
    void get(const std::string& sec, const std::string& key, double& out) {
        if (!has(sec, key)) return;
        try {
            std::size_t pos = 0;
            const std::string v = raw(sec, key);
            out = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument(v);
        } catch (const std::exception&) {
            errors.push_back(sec + "." + key + ": not a number");
        }
    }
    void get(const std::string& sec, const std::string& key, int& out) {
        double d = out;
        get(sec, key, d);
        out = static_cast<int>(d);
    }
    void get(const std::string& sec, const std::string& key, std::uint64_t& out) {
        double d = static_cast<double>(out);
        get(sec, key, d);
        out = static_cast<std::uint64_t>(d);
    }
    void get(const std::string& sec, const std::string& key, bool& out) {
        if (!has(sec, key)) return;
        const std::string v = raw(sec, key);
        if (v == "true" || v == "1")
            out = true;
        else if (v == "false" || v == "0")
            out = false;
        else
            errors.push_back(sec + "." + key + ": expected true/false");
    }
    void get(const std::string& sec, const std::string& key, std::string& out) {
        if (has(sec, key)) out = raw(sec, key);
    }
    void get_list(const std::string& sec, const std::string& key, std::vector<double>& out) {
        if (!has(sec, key)) return;
        out.clear();
        std::stringstream ss(raw(sec, key));
        std::string item;
        while (std::getline(ss, item, ',')) {
            item = trim(item);
            if (item.empty()) continue;
            try {
                out.push_back(std::stod(item));
            } catch (const std::exception&) {
                errors.push_back(sec + "." + key + ": bad list entry '" + item + "'");
            }
        }
    }
    void check_unknown() {
        for (const auto& [sec, keys] : kv_)
            for (const auto& [key, val] : keys)
                if (used_[sec].count(key) == 0) errors.push_back(sec + "." + key + ": unknown key");
    }

    std::vector<std::string> errors;

  private:
    KvMap kv_;
    std::map<std::string, std::set<std::string>> used_;
};

SignSpec read_sign(Reader& r, const std::string& sec, const std::string& prefix, SignSpec def,
                   std::vector<std::string>& errors) {
    std::string mode = def.mode == SignMode::Exact ? "exact" : "tanh";
    r.get(sec, prefix + "mode", mode);
    if (mode == "exact")
        def.mode = SignMode::Exact;
    else if (mode == "tanh")
        def.mode = SignMode::Tanh;
    else
        errors.push_back(sec + "." + prefix + "mode: expected exact|tanh");
    r.get(sec, prefix + "deadband", def.deadband);
    r.get(sec, prefix + "tanh_gain", def.tanh_gain);
    return def;
}

}  // namespace

ScenarioConfig load_config(const std::string& path) {
    Reader r(parse_ini(path));
    ScenarioConfig c;

    std::string base;
    r.get("scenario", "preset", base);
    if (!base.empty()) c = preset_by_name(base);

    r.get("scenario", "model", c.model);
    r.get("scenario", "t_end", c.t_end);
    r.get("scenario", "dt", c.dt);
    r.get("scenario", "decimation", c.decimation);
    r.get("scenario", "switch_on", c.switch_on);
    r.get("scenario", "estimator_enabled", c.estimator_enabled);

    r.get("class1", "theta1", c.c1_theta1);
    r.get("class1", "theta2", c.c1_theta2);
    r.get("class1", "theta3", c.c1_theta3);
    r.get("class1", "x0", c.c1_x0);

    r.get("input", "offset", c.excitation.offset);
    std::vector<double> amp = c.excitation.amp, freq = c.excitation.freq,
                        phase = c.excitation.phase;
    r.get_list("input", "amp", amp);
    r.get_list("input", "freq", freq);
    r.get_list("input", "phase", phase);
    if (amp.size() != freq.size())
        r.errors.push_back("input.freq: amp/freq lists must have equal length");
    phase.resize(amp.size(), 0.0);
    c.excitation.amp = amp;
    c.excitation.freq = freq;
    c.excitation.phase = phase;

    r.get("shank", "J", c.shank.J);
    r.get("shank", "b1", c.shank.b1);
    r.get("shank", "b2", c.shank.b2);
    r.get("shank", "k1", c.shank.k1);
    r.get("shank", "k2", c.shank.k2);
    r.get("shank", "mgl", c.shank.mgl);
    r.get("shank", "q0", c.shank.q0);
    r.get("shank", "q0_floor", c.shank.q0_floor);
    r.get("shank", "x0_auto", c.shank_x0_auto);
    r.get("shank", "x0", c.shank_x0);
    if (r.has("shank", "x0") && !r.has("shank", "x0_auto")) c.shank_x0_auto = false;
    r.get("shank", "xdot0", c.shank_xdot0);
    c.shank.sgn = read_sign(r, "shank", "sign_", c.shank.sgn, r.errors);

    r.get("controller", "mu", c.ctrl.mu);
    r.get("controller", "k1", c.ctrl.kc1);
    r.get("controller", "k2", c.ctrl.kc2);
    r.get("controller", "k3", c.ctrl.kc3);
    std::string rconv = c.ctrl.r_plus_convention ? "standard" : "literal";
    r.get("controller", "r_convention", rconv);
    if (rconv == "standard")
        c.ctrl.r_plus_convention = true;
    else if (rconv == "literal")
        c.ctrl.r_plus_convention = false;
    else
        r.errors.push_back("controller.r_convention: expected standard|literal");
    c.ctrl.sgn = read_sign(r, "controller", "sign_", c.ctrl.sgn, r.errors);

    std::vector<double> wv, wb;
    r.get_list("reference", "w_values", wv);
    r.get_list("reference", "w_breaks", wb);
    if (!wv.empty()) c.ref.w_values = wv;
    if (!wb.empty()) c.ref.w_breaks = wb;

    r.get("filters", "lambda", c.lambda);

    r.get("estimator", "gamma_w", c.gamma_w);
    r.get("estimator", "f0", c.f0);
    r.get("estimator", "gamma_theta", c.gamma_theta);
    r.get("estimator", "ie_cc", c.ie_cc);

    r.get("t_w", "sign_theta1", c.sign_theta1);
    r.get("t_w", "alpha", c.alpha);
    r.get("t_w", "alpha_auto", c.alpha_auto);
    r.get("t_w", "t_g", c.t_g);
    r.get("t_w", "rho_g", c.rho_g);

    r.get_list("bounds", "lo", c.bounds_lo);
    r.get_list("bounds", "hi", c.bounds_hi);
    r.get("bounds", "grid_per_dim", c.grid_per_dim);
    r.get("bounds", "random_samples", c.random_samples);
    r.get("bounds", "seed", c.sample_seed);

    r.get("gradient", "enabled", c.grad_enabled);
    r.get("gradient", "gain", c.grad_gain);
    r.get("gradient", "lambda", c.grad_lambda);
    r.get("gradient", "switch_on", c.grad_on);

    r.get("output", "dir", c.out_dir);
    r.get("output", "prefix", c.prefix);
    r.get("output", "trajectory", c.write_trajectory);
    r.get("output", "estimator", c.write_estimator);
    r.get("output", "plots", c.write_plots);
    r.get("output", "verbose_w", c.verbose_w);
    r.get("output", "resid_gate", c.resid_gate);

    r.check_unknown();
    auto errs = validate_config(c);
    errs.insert(errs.begin(), r.errors.begin(), r.errors.end());
    if (!errs.empty()) {
        std::string msg = "invalid config " + path + ":";
        for (const auto& e : errs) msg += "\n  " + e;
        throw ConfigError(msg);
    }
    return c;
}

std::vector<std::string> validate_config(const ScenarioConfig& c) {
    std::vector<std::string> e;
    if (c.model != "class1_synthetic" && c.model != "shank")
        e.push_back("scenario.model: unknown model '" + c.model + "'");
    if (!(c.t_end > 0.0)) e.push_back("scenario.t_end: must be > 0");
    if (!(c.dt > 0.0)) e.push_back("scenario.dt: must be > 0");
    if (c.decimation < 1) e.push_back("scenario.decimation: must be >= 1");
    if (c.switch_on < 0.0) e.push_back("scenario.switch_on: must be >= 0");
    if (c.estimator_enabled && !(c.t_end > c.switch_on))
        e.push_back("scenario.t_end: horizon must exceed the estimator switch-on time");
    if (!(c.lambda > 0.0)) e.push_back("filters.lambda: must be > 0");
    if (c.dt * c.lambda > 0.1)
        e.push_back("scenario.dt: dt*lambda exceeds 0.1; refine the step or slow the filters");
    if (!(c.gamma_w > 0.0)) e.push_back("estimator.gamma_w: must be > 0");
    if (!(c.f0 > 0.0)) e.push_back("estimator.f0: must be > 0");
    if (!(c.gamma_theta > 0.0)) e.push_back("estimator.gamma_theta: must be > 0");
    if (!(c.ie_cc > 0.0)) e.push_back("estimator.ie_cc: must be > 0");
    if (c.sign_theta1 != 1 && c.sign_theta1 != -1) e.push_back("t_w.sign_theta1: must be +1 or -1");
    if (!(c.alpha > 0.0)) e.push_back("t_w.alpha: must be > 0");
    if (!(c.t_g > 0.0)) e.push_back("t_w.t_g: must be > 0");
    if (!(c.rho_g > 0.0)) e.push_back("t_w.rho_g: must be > 0");
    if (c.bounds_lo.size() != c.bounds_hi.size())
        e.push_back("bounds.lo/hi: length mismatch");
    const int ell = c.is_class1() ? 3 : 4;
    if (!c.bounds_lo.empty() && static_cast<int>(c.bounds_lo.size()) != ell)
        e.push_back("bounds.lo: expected " + std::to_string(ell) + " entries for this model");
    if (c.model == "shank") {
        if (!(c.shank.J > 0.0)) e.push_back("shank.J: must be > 0");
        if (!(c.shank.q0_floor > 0.0)) e.push_back("shank.q0_floor: must be > 0");
        if (c.grad_enabled) {
            if (!(c.grad_gain > 0.0)) e.push_back("gradient.gain: must be > 0");
            if (!(c.grad_lambda > 0.0)) e.push_back("gradient.lambda: must be > 0");
        }
        if (c.ref.w_values.size() != c.ref.w_breaks.size() + 1)
            e.push_back("reference.w_values: need exactly one more value than breaks");
        for (std::size_t i = 1; i < c.ref.w_breaks.size(); ++i)
            if (c.ref.w_breaks[i] <= c.ref.w_breaks[i - 1])
                e.push_back("reference.w_breaks: must be strictly ascending");
    }
    if (c.excitation.amp.size() != c.excitation.freq.size())
        e.push_back("input.amp/freq: length mismatch");
    return e;
}

void save_config(const ScenarioConfig& c, const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot write config file: " + path);
    auto num = [](double v) {
        char buf[40];
        for (int prec : {15, 16, 17}) {
            std::snprintf(buf, sizeof(buf), "%.*g", prec, v);
            if (std::strtod(buf, nullptr) == v) break;
        }
        return std::string(buf);
    };
    auto list = [&num](const std::vector<double>& v) {
        std::string s;
        for (std::size_t i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
        return s;
    };
    auto sign = [&num](std::ofstream& o, const std::string& prefix, const SignSpec& s) {
        o << prefix << "mode = " << (s.mode == SignMode::Exact ? "exact" : "tanh") << "\n";
        o << prefix << "deadband = " << num(s.deadband) << "\n";
        o << prefix << "tanh_gain = " << num(s.tanh_gain) << "\n";
    };

    out << "[scenario]\n";
    out << "model = " << c.model << "\n";
    out << "t_end = " << num(c.t_end) << "\n";
    out << "dt = " << num(c.dt) << "\n";
    out << "decimation = " << c.decimation << "\n";
    out << "switch_on = " << num(c.switch_on) << "\n";
    out << "estimator_enabled = " << (c.estimator_enabled ? "true" : "false") << "\n\n";

    if (c.is_class1()) {
        out << "[class1]\n";
        out << "theta1 = " << num(c.c1_theta1) << "\n";
        out << "theta2 = " << num(c.c1_theta2) << "\n";
        out << "theta3 = " << num(c.c1_theta3) << "\n";
        out << "x0 = " << num(c.c1_x0) << "\n\n";
        out << "[input]\n";
        out << "offset = " << num(c.excitation.offset) << "\n";
        out << "amp = " << list(c.excitation.amp) << "\n";
        out << "freq = " << list(c.excitation.freq) << "\n";
        out << "phase = " << list(c.excitation.phase) << "\n\n";
    } else {
        out << "[shank]\n";
        out << "J = " << num(c.shank.J) << "\n";
        out << "b1 = " << num(c.shank.b1) << "\n";
        out << "b2 = " << num(c.shank.b2) << "\n";
        out << "k1 = " << num(c.shank.k1) << "\n";
        out << "k2 = " << num(c.shank.k2) << "\n";
        out << "mgl = " << num(c.shank.mgl) << "\n";
        out << "q0 = " << num(c.shank.q0) << "\n";
        out << "q0_floor = " << num(c.shank.q0_floor) << "\n";
        out << "x0_auto = " << (c.shank_x0_auto ? "true" : "false") << "\n";
        out << "x0 = " << num(c.shank_x0) << "\n";
        out << "xdot0 = " << num(c.shank_xdot0) << "\n";
        sign(out, "sign_", c.shank.sgn);
        out << "\n[controller]\n";
        out << "mu = " << num(c.ctrl.mu) << "\n";
        out << "k1 = " << num(c.ctrl.kc1) << "\n";
        out << "k2 = " << num(c.ctrl.kc2) << "\n";
        out << "k3 = " << num(c.ctrl.kc3) << "\n";
        out << "r_convention = " << (c.ctrl.r_plus_convention ? "standard" : "literal") << "\n";
        sign(out, "sign_", c.ctrl.sgn);
        out << "\n[reference]\n";
        out << "w_values = " << list(c.ref.w_values) << "\n";
        out << "w_breaks = " << list(c.ref.w_breaks) << "\n\n";
        out << "[gradient]\n";
        out << "enabled = " << (c.grad_enabled ? "true" : "false") << "\n";
        out << "gain = " << num(c.grad_gain) << "\n";
        out << "lambda = " << num(c.grad_lambda) << "\n";
        out << "switch_on = " << num(c.grad_on) << "\n\n";
    }

    out << "[filters]\n";
    out << "lambda = " << num(c.lambda) << "\n\n";
    out << "[estimator]\n";
    out << "gamma_w = " << num(c.gamma_w) << "\n";
    out << "f0 = " << num(c.f0) << "\n";
    out << "gamma_theta = " << num(c.gamma_theta) << "\n";
    out << "ie_cc = " << num(c.ie_cc) << "\n\n";
    out << "[t_w]\n";
    out << "sign_theta1 = " << c.sign_theta1 << "\n";
    out << "alpha = " << num(c.alpha) << "\n";
    out << "alpha_auto = " << (c.alpha_auto ? "true" : "false") << "\n";
    out << "t_g = " << num(c.t_g) << "\n";
    out << "rho_g = " << num(c.rho_g) << "\n\n";
    if (!c.bounds_lo.empty()) {
        out << "[bounds]\n";
        out << "lo = " << list(c.bounds_lo) << "\n";
        out << "hi = " << list(c.bounds_hi) << "\n";
        out << "grid_per_dim = " << c.grid_per_dim << "\n";
        out << "random_samples = " << c.random_samples << "\n";
        out << "seed = " << c.sample_seed << "\n\n";
    }
    out << "[output]\n";
    out << "dir = " << c.out_dir << "\n";
    out << "prefix = " << c.prefix << "\n";
    out << "trajectory = " << (c.write_trajectory ? "true" : "false") << "\n";
    out << "estimator = " << (c.write_estimator ? "true" : "false") << "\n";
    out << "plots = " << (c.write_plots ? "true" : "false") << "\n";
    out << "verbose_w = " << (c.verbose_w ? "true" : "false") << "\n";
    out << "resid_gate = " << num(c.resid_gate) << "\n";
}

void set_sweep_param(ScenarioConfig& cfg, const std::string& name, double value) {
    if (name == "gamma_w")
        cfg.gamma_w = value;
    else if (name == "gamma_theta")
        cfg.gamma_theta = value;
    else if (name == "lambda")
        cfg.lambda = value;
    else if (name == "dt")
        cfg.dt = value;
    else if (name == "alpha")
        cfg.alpha = value;
    else if (name == "t_end")
        cfg.t_end = value;
    else if (name == "switch_on")
        cfg.switch_on = value;
    else if (name == "grad_gain")
        cfg.grad_gain = value;
    else if (name == "f0")
        cfg.f0 = value;
    else
        throw ConfigError("unknown sweep parameter: " + name);
}

}  // namespace dremid
