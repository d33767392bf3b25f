#include "cmag/physics.hpp"

#include <cmath>

namespace cmag {

void CavityMode::validate() const {
    if (!(omega_a > 0.0))
        throw domain_error("cavity: omega_a must be positive");
    if (!(kappa_a1 > 0.0) || !(kappa_a1 <= kappa_a))
        throw domain_error("cavity: need 0 < kappa_a1 <= kappa_a");
    for (double d : dims)
        if (!(d > 0.0))
            throw domain_error("cavity: dims must be positive");
    if (!(mode_volume > 0.0))
        throw domain_error("cavity: mode_volume must be positive");
}

CavityMode CavityMode::box(double omega_a, double kappa_a, double kappa_a1,
                           std::array<double, 3> dims) {
    CavityMode c;
    c.omega_a = omega_a;
    c.kappa_a = kappa_a;
    c.kappa_a1 = kappa_a1;
    c.dims = dims;
    c.mode_volume = dims[0] * dims[1] * dims[2];
    c.validate();
    return c;
}

void MagnonMode::validate() const {
    if (!(radius > 0.0))
        throw domain_error("magnon: radius must be positive");
    if (!(spin_density > 0.0))
        throw domain_error("magnon: spin_density must be positive");
    if (!(spin > 0.0))
        throw domain_error("magnon: spin must be positive");
    if (!(kappa_m > 0.0))
        throw domain_error("magnon: kappa_m must be positive");
}

void CoupledSystem::validate() const {
    cavity.validate();
    magnon.validate();
    if (!(g >= 0.0))
        throw domain_error("system: g must be nonnegative");
    if (!(bias_field >= 0.0))
        throw domain_error("system: bias_field must be nonnegative");
}

double CoupledSystem::omega_m() const {
    return magnon_frequency(magnon, bias_field);
}

double sphere_volume(const MagnonMode& magnon) {
    return (4.0 / 3.0) * constants::pi * std::pow(magnon.radius, 3);
}

double spin_count(const MagnonMode& magnon) {
    return magnon.spin_density * sphere_volume(magnon);
}

double magnon_frequency(const MagnonMode& magnon, double bias_field) {
    return magnon.gamma * std::abs(bias_field) + magnon.omega_m0;
}

double overlap_eta(const SpherePosition& pos, const CavityMode& cavity) {
    const double half = cavity.dims[0] / 2.0;
    if (std::abs(pos.x) > half)
        throw domain_error("overlap_eta: position outside cavity");
    return std::cos(constants::pi * pos.x / cavity.dims[0]);
}

double coupling_strength(const CavityMode& cavity, const MagnonMode& magnon,
                         double eta) {
    if (eta < 0.0 || eta > 1.0)
        throw domain_error("coupling_strength: eta must lie in [0, 1]");
    const double n_spins = spin_count(magnon);
    const double vac = std::sqrt(constants::hbar * cavity.omega_a *
                                 constants::mu0 / cavity.mode_volume);
    return 0.5 * eta * magnon.gamma * vac *
           std::sqrt(2.0 * n_spins * magnon.spin);
}

double effective_frequency(const CavityMode& cavity,
                           const MagnonMode& magnon) {
    const double f = cavity.omega_a / constants::two_pi;
    return f * sphere_volume(magnon) / cavity.mode_volume;
}

} // namespace cmag
