#include "cmag/spectra.hpp"

#include <cmath>

#include "cmag/regimes.hpp"

namespace cmag {

namespace {
constexpr cplx I{0.0, 1.0};

cplx reflection_at(double omega, double omega_a, double omega_m,
                   double kappa_a, double kappa_a1, double kappa_m, double g) {
    const cplx magnon_term = g * g / (I * (omega_m - omega) + kappa_m);
    return -1.0 + 2.0 * kappa_a1 /
                      (I * (omega_a - omega) + kappa_a + magnon_term);
}
} // namespace

void FrequencyGrid::validate() const {
    if (!(stop > start))
        throw domain_error("grid: stop must exceed start");
    if (points < 2)
        throw domain_error("grid: need at least 2 points");
}

double FrequencyGrid::at(std::size_t i) const {
    return start + (stop - start) * double(i) / double(points - 1);
}

cplx reflection(const CoupledSystem& system, double omega) {
    return reflection_at(omega, system.cavity.omega_a, system.omega_m(),
                         system.cavity.kappa_a, system.cavity.kappa_a1,
                         system.magnon.kappa_m, system.g);
}

ReflectionSpectrum spectrum(const CoupledSystem& system,
                            const FrequencyGrid& grid) {
    grid.validate();
    ReflectionSpectrum s;
    s.grid = grid;
    s.values.resize(grid.points);
    for (std::size_t i = 0; i < grid.points; ++i)
        s.values[i] = reflection(system, grid.at(i));
    return s;
}

std::vector<std::vector<double>> field_map(const CoupledSystem& system,
                                           const std::vector<double>& b_range,
                                           const FrequencyGrid& grid) {
    grid.validate();
    for (std::size_t i = 1; i < b_range.size(); ++i)
        if (!(b_range[i] > b_range[i - 1]))
            throw domain_error("field_map: B range must be ascending");

    std::vector<std::vector<double>> rows;
    rows.reserve(b_range.size());
    CoupledSystem sys = system;
    for (double b : b_range) {
        sys.bias_field = b;
        std::vector<double> row(grid.points);
        for (std::size_t i = 0; i < grid.points; ++i)
            row[i] = std::norm(reflection(sys, grid.at(i)));
        rows.push_back(std::move(row));
    }
    return rows;
}

NormalModes normal_modes_rwa(const CoupledSystem& system) {
    const cplx wa{system.cavity.omega_a, -system.cavity.kappa_a};
    const cplx wm{system.omega_m(), -system.magnon.kappa_m};
    const cplx mean = 0.5 * (wa + wm);
    const cplx half_det = 0.5 * (wa - wm);
    const cplx root =
        std::sqrt(half_det * half_det + cplx(system.g * system.g));
    // Principal sqrt has Re >= 0, so "+" is the upper branch.
    return {mean + root, mean - root};
}

NormalModes normal_modes_full(const CoupledSystem& system) {
    const double wa = system.cavity.omega_a;
    const double wm = system.omega_m();
    const double g = system.g;

    // Quadratic in u = omega^2.
    const double sum = wa * wa + wm * wm;
    const double disc = (wa * wa - wm * wm) * (wa * wa - wm * wm) +
                        16.0 * g * g * wa * wm;
    const double u_plus = 0.5 * (sum + std::sqrt(disc));
    const double u_minus = 0.5 * (sum - std::sqrt(disc));
    if (!(u_minus > 0.0) || !(u_plus > 0.0))
        throw domain_error(
            "normal_modes_full: no positive-frequency root pair (coupling "
            "too large for this model)");

    // Loss rates attached perturbatively from the lossless RWA eigenvector
    // weights of [[w_a, g], [g, w_m]].
    auto branch_kappa = [&](double lambda) {
        const double d = lambda - wa;
        const double norm = d * d + g * g;
        if (norm == 0.0)
            return system.cavity.kappa_a; // g = 0, cavity-like branch
        const double w_m_weight = d * d / norm;
        const double w_a_weight = g * g / norm;
        return w_a_weight * system.cavity.kappa_a +
               w_m_weight * system.magnon.kappa_m;
    };
    const double mean = 0.5 * (wa + wm);
    const double root =
        std::sqrt(0.25 * (wa - wm) * (wa - wm) + g * g);
    double k_plus, k_minus;
    if (g == 0.0) {
        k_plus = wa >= wm ? system.cavity.kappa_a : system.magnon.kappa_m;
        k_minus = wa >= wm ? system.magnon.kappa_m : system.cavity.kappa_a;
    } else {
        k_plus = branch_kappa(mean + root);
        k_minus = branch_kappa(mean - root);
    }
    return {cplx{std::sqrt(u_plus), -k_plus},
            cplx{std::sqrt(u_minus), -k_minus}};
}

MitObservables mit_observables(const CoupledSystem& system) {
    const double c = cooperativity(system.g, system.cavity.kappa_a,
                                   system.magnon.kappa_m);
    MitObservables obs;
    obs.height = (c / (1.0 + c)) * (c / (1.0 + c));
    obs.linewidth = 2.0 * (1.0 + c) * system.magnon.kappa_m;
    const double matched = 0.5 * system.cavity.kappa_a;
    obs.matched = std::abs(system.cavity.kappa_a1 - matched) <=
                  1e-9 * system.cavity.kappa_a;
    return obs;
}

PurcellResult purcell_kappa(const CoupledSystem& system) {
    const double c = cooperativity(system.g, system.cavity.kappa_a,
                                   system.magnon.kappa_m);
    return {system.cavity.kappa_a * (1.0 + c), 1.0 + c};
}

std::vector<double> group_delay(const ReflectionSpectrum& spectrum) {
    const std::size_t n = spectrum.grid.points;
    if (n < 3 || spectrum.values.size() != n)
        throw domain_error("group_delay: need at least 3 grid points");

    // Unwrapped phase.
    std::vector<double> phase(n);
    phase[0] = std::arg(spectrum.values[0]);
    double offset = 0.0;
    for (std::size_t i = 1; i < n; ++i) {
        const double raw = std::arg(spectrum.values[i]);
        double jump = raw + offset - phase[i - 1];
        while (jump > constants::pi) {
            offset -= constants::two_pi;
            jump -= constants::two_pi;
        }
        while (jump < -constants::pi) {
            offset += constants::two_pi;
            jump += constants::two_pi;
        }
        phase[i] = raw + offset;
    }

    // With the e^{-i omega t} time convention used throughout, the physical
    // delay is +d(phase)/d(omega): a bare overcoupled cavity gives +2/kappa_a.
    const double h = spectrum.grid.step();
    std::vector<double> delay(n);
    delay[0] = (phase[1] - phase[0]) / h;
    delay[n - 1] = (phase[n - 1] - phase[n - 2]) / h;
    for (std::size_t i = 1; i + 1 < n; ++i)
        delay[i] = (phase[i + 1] - phase[i - 1]) / (2.0 * h);
    return delay;
}

} // namespace cmag
