#pragma once

#include <array>
#include <stdexcept>

#include "cmag/constants.hpp"

namespace cmag {

/// Rectangular 3D microwave resonator. All quantities SI, angular frequencies
/// in rad/s. Decay rates are amplitude half-linewidths: the field decays as
/// e^{-kappa t}, energy as e^{-2 kappa t}, and a Lorentzian |r|^2 dip has
/// FWHM 2*kappa.
struct CavityMode {
    double omega_a = 0.0;  // resonance, rad/s
    double kappa_a = 0.0;  // total amplitude decay, rad/s
    double kappa_a1 = 0.0; // external (port) amplitude decay, rad/s
    std::array<double, 3> dims{0.0, 0.0, 0.0}; // inner L_x, L_y, L_z, m
    double mode_volume = 0.0;                  // V_a, m^3

    void validate() const;

    /// Cavity with V_a set to the geometric box volume (user-overridable
    /// afterwards; the TE101 energy-weighted volume differs by an O(1)
    /// factor).
    static CavityMode box(double omega_a, double kappa_a, double kappa_a1,
                          std::array<double, 3> dims);
};

/// Uniform-mode magnon resonator (YIG sphere).
struct MagnonMode {
    double omega_m0 = 0.0; // zero-field offset, rad/s (may be <= 0)
    double gamma = constants::yig_gamma; // rad/s per tesla
    double kappa_m = 0.0;                // amplitude decay, rad/s
    double radius = 0.0;                 // sphere radius, m
    double spin_density = constants::yig_spin_density; // m^-3
    double spin = constants::yig_spin;

    void validate() const;
};

struct CoupledSystem {
    CavityMode cavity;
    MagnonMode magnon;
    double g = 0.0;          // coupling strength, rad/s
    double bias_field = 0.0; // B0, tesla

    void validate() const;

    /// Magnon frequency at the stored bias field.
    double omega_m() const;
};

/// Sphere displacement along the long (x) cavity axis, measured from the
/// field maximum at the cavity center.
struct SpherePosition {
    double x = 0.0; // m
};

struct domain_error : std::domain_error {
    using std::domain_error::domain_error;
};

/// Total number of spins N = rho_s * (4/3) pi R^3.
double spin_count(const MagnonMode& magnon);

/// Sphere volume V_m = (4/3) pi R^3.
double sphere_volume(const MagnonMode& magnon);

/// omega_m = gamma * B0 + omega_m0.
double magnon_frequency(const MagnonMode& magnon, double bias_field);

/// Overlap coefficient along the wall-mounted x sweep of the TE101 mode:
/// eta(x) = cos(pi x / L_x). Throws domain_error outside the cavity.
double overlap_eta(const SpherePosition& pos, const CavityMode& cavity);

/// g = (eta/2) * gamma * sqrt(hbar * omega_a * mu0 / V_a) * sqrt(2 N s).
double coupling_strength(const CavityMode& cavity, const MagnonMode& magnon,
                         double eta);

/// Scaling variable f_eff = f * V_m / V_a (Hz). Reporting only; g itself
/// follows the coupling formula, not a linear law in f_eff.
double effective_frequency(const CavityMode& cavity, const MagnonMode& magnon);

} // namespace cmag
