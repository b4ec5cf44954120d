#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace dremid {

using Eigen::MatrixXd;
using Eigen::VectorXd;

inline std::span<double> as_span(VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}
inline std::span<const double> as_span(const VectorXd& v) {
    return {v.data(), static_cast<std::size_t>(v.size())};
}

// Error raised when a measured signal is non-finite or otherwise unusable.
struct SignalError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Error raised when a model function violates its sign-definiteness floor
// (|h3| or |x - q0| too close to zero).
struct SingularityError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

// Error raised for invalid configuration or dimension mismatches.
struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

inline void require_finite(double v, const char* what) {
    if (!std::isfinite(v)) throw SignalError(std::string("non-finite signal: ") + what);
}

inline void require_finite(const VectorXd& v, const char* what) {
    if (!v.allFinite()) throw SignalError(std::string("non-finite signal: ") + what);
}

// sign() with a dead band: |v| <= eps maps to 0.
inline double sign_deadband(double v, double eps) {
    if (v > eps) return 1.0;
    if (v < -eps) return -1.0;
    return 0.0;
}

// Deterministic 64-bit LCG, used wherever reproducible pseudo-random
// samples are needed (LMI sampling, test point generation).
class Lcg {
  public:
    explicit Lcg(std::uint64_t seed = 0x9e3779b97f4a7c15ull) : state_(seed) {}

    std::uint64_t next_u64() {
        state_ = state_ * 6364136223846793005ull + 1442695040888963407ull;
        std::uint64_t x = state_;
        x ^= x >> 33;
        return x;
    }

    // uniform in [0, 1)
    double next_unit() { return static_cast<double>(next_u64() >> 11) * 0x1.0p-53; }

    // uniform in [lo, hi]
    double next_in(double lo, double hi) { return lo + (hi - lo) * next_unit(); }

  private:
    std::uint64_t state_;
};

// Least-squares line fit y = a + b*x; returns slope b.
inline double linefit_slope(const std::vector<double>& x, const std::vector<double>& y) {
    const std::size_t n = x.size();
    if (n < 2 || y.size() != n) throw ConfigError("linefit needs >= 2 samples");
    double mx = 0, my = 0;
    for (std::size_t i = 0; i < n; ++i) { mx += x[i]; my += y[i]; }
    mx /= static_cast<double>(n);
    my /= static_cast<double>(n);
    double sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < n; ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0) throw ConfigError("linefit: degenerate abscissa");
    return sxy / sxx;
}

}  // namespace dremid
