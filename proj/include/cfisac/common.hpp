#pragma once

#include <complex>
#include <stdexcept>
#include <string>

namespace cfisac {

using cxd = std::complex<double>;

// Physical constants.
inline constexpr double kSpeedOfLight = 299792458.0;     // m/s
inline constexpr double kBoltzmann = 1.381e-23;          // J/K, at the precision the noise model uses
inline constexpr double kNoiseTemperature = 290.0;       // K

inline double db_to_linear(double db) { return std::pow(10.0, db / 10.0); }
inline double linear_to_db(double lin) { return 10.0 * std::log10(lin); }

// Error taxonomy. Contract violations throw; callers that can recover catch by type.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};
struct DomainError : std::runtime_error {
    explicit DomainError(const std::string& what) : std::runtime_error(what) {}
};
struct OffGridDelay : DomainError {
    explicit OffGridDelay(const std::string& what) : DomainError(what) {}
};
struct GridTooSmall : ConfigError {
    explicit GridTooSmall(const std::string& what) : ConfigError(what) {}
};
struct EstimatorDegenerate : std::runtime_error {
    explicit EstimatorDegenerate(const std::string& what) : std::runtime_error(what) {}
};
struct DegenerateScenario : std::runtime_error {
    explicit DegenerateScenario(const std::string& what) : std::runtime_error(what) {}
};
// Requested dense assembly exceeds the desk-scale guard; use the factored operator form.
struct UseFactoredForm : std::runtime_error {
    explicit UseFactoredForm(const std::string& what) : std::runtime_error(what) {}
};
// Full per-lattice-point SE evaluation exceeds the desk-scale guard; use the lower bound.
struct UseLowerBound : std::runtime_error {
    explicit UseLowerBound(const std::string& what) : std::runtime_error(what) {}
};
// Max-min problem has no power allocation meeting the sensing constraint.
// Carries the best achievable sensing SINR at the power boundary as a certificate.
struct Infeasible : std::runtime_error {
    double max_sensing_sinr;
    explicit Infeasible(const std::string& what, double cert)
        : std::runtime_error(what), max_sensing_sinr(cert) {}
};
struct NonMonotone : std::logic_error {
    explicit NonMonotone(const std::string& what) : std::logic_error(what) {}
};

}  // namespace cfisac
