#pragma once

#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "cmag/dynamics.hpp"
#include "cmag/physics.hpp"
#include "cmag/spectra.hpp"

namespace cmag {

struct config_error : std::runtime_error {
    using std::runtime_error::runtime_error;
};

/// Physical dimension of a config value. Interface units are GHz/MHz/mT/mm/ns
/// (plus SI); internal values are SI with angular frequencies in rad/s.
/// Frequencies and rates are quoted as ordinary frequencies (f = omega/2pi),
/// matching how the interface reports them.
enum class Dimension {
    frequency,   // -> rad/s (value * 2pi)
    field,       // -> tesla
    length,      // -> m
    time,        // -> s
    volume,      // -> m^3
    density,     // -> m^-3
    gyromagnetic,// -> rad/s per tesla
    plain        // dimensionless
};

/// Convert "value [unit]" to internal units; throws config_error on a
/// missing or dimension-mismatched unit.
double parse_quantity(const std::string& text, Dimension dim);

/// Multiplicative factor taking a value in `unit` to internal units.
double unit_factor(const std::string& unit, Dimension dim);

/// Flat INI-style config: [section] headers, key = value lines, '#'
/// comments. Unknown sections or keys are rejected at load time.
struct ExperimentConfig {
    std::map<std::string, std::map<std::string, std::string>> sections;

    static ExperimentConfig load(const std::string& path);
    static ExperimentConfig parse(const std::string& text,
                                  const std::string& origin = "<string>");

    bool has(const std::string& section, const std::string& key) const;
    const std::string& raw(const std::string& section,
                           const std::string& key) const;
    double quantity(const std::string& section, const std::string& key,
                    Dimension dim) const;
    double quantity_or(const std::string& section, const std::string& key,
                       Dimension dim, double fallback) const;
    std::string text_or(const std::string& section, const std::string& key,
                        const std::string& fallback) const;

    /// system block -> CoupledSystem. g comes either directly (g_source =
    /// direct) or from geometry and the sphere position (g_source =
    /// geometry); requesting the one that is not configured is an error.
    CoupledSystem build_system() const;

    FrequencyGrid build_grid() const;
    std::vector<double> build_b_range() const;
    DrivePulse build_pulse(double omega_a) const;
    double time_max() const;
    double time_step() const;
    std::size_t decimation() const;
};

} // namespace cmag
