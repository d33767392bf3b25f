#pragma once

#include <complex>
#include <vector>

#include "cmag/physics.hpp"

namespace cmag {

using cplx = std::complex<double>;

struct FrequencyGrid {
    double start = 0.0; // rad/s
    double stop = 0.0;  // rad/s
    std::size_t points = 0;

    void validate() const;
    double at(std::size_t i) const;
    double step() const { return (stop - start) / double(points - 1); }
};

struct ReflectionSpectrum {
    FrequencyGrid grid;
    std::vector<cplx> values;
};

/// Hybridized-mode frequencies under the convention omega - i*kappa:
/// real part = frequency, imaginary part = -decay.
struct NormalModes {
    cplx omega_plus;  // upper branch
    cplx omega_minus; // lower branch
};

struct MitObservables {
    double height = 0.0;    // |r(omega_a)|^2 at window center
    double linewidth = 0.0; // rad/s, FWHM of the transparency window
    bool matched = true;    // false when kappa_a1 != kappa_a/2 (formula
                            // assumes impedance matching)
};

/// Complex reflection coefficient
/// r(w) = -1 + 2 k_a1 / (i(w_a - w) + k_a + g^2 / (i(w_m - w) + k_m)),
/// with w_m taken from the bias field.
cplx reflection(const CoupledSystem& system, double omega);

ReflectionSpectrum spectrum(const CoupledSystem& system,
                            const FrequencyGrid& grid);

/// |r|^2 map, one row per bias field, one column per grid frequency.
std::vector<std::vector<double>> field_map(const CoupledSystem& system,
                                           const std::vector<double>& b_range,
                                           const FrequencyGrid& grid);

/// Eigenvalues of [[w_a - i k_a, g], [g, w_m - i k_m]].
NormalModes normal_modes_rwa(const CoupledSystem& system);

/// Polariton branches including counter-rotating terms: positive roots of
/// (w^2 - w_a^2)(w^2 - w_m^2) = 4 g^2 w_a w_m, with loss rates attached
/// perturbatively from the RWA eigenvector weights. Model-dependent beyond
/// the RWA; throws domain_error when no positive root pair exists.
NormalModes normal_modes_full(const CoupledSystem& system);

/// Closed-form transparency window height (C/(1+C))^2 and linewidth
/// 2(1+C)k_m. Valid on resonance with impedance matching; the `matched`
/// flag is cleared when kappa_a1 != kappa_a/2.
MitObservables mit_observables(const CoupledSystem& system);

/// Purcell-broadened cavity decay: (k_a (1+C), 1+C).
struct PurcellResult {
    double kappa_eff = 0.0; // rad/s
    double factor = 0.0;    // F_P = 1 + C
};
PurcellResult purcell_kappa(const CoupledSystem& system);

/// Group delay tau_g(w) = -d(arg r)/dw, central differences with phase
/// unwrapping. Requires >= 3 grid points.
std::vector<double> group_delay(const ReflectionSpectrum& spectrum);

} // namespace cmag
