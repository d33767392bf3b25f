#pragma once

#include <complex>
#include <optional>
#include <vector>

#include "cmag/physics.hpp"

namespace cmag {

enum class PulseShape { rectangular, raised_cosine };

/// Drive pulse described in the lab frame by its carrier; the integrator
/// works in the frame rotating at the carrier, where the pulse is the real
/// envelope below. An `impulse` pulse skips the drive entirely and starts
/// from a(0) = 1, m(0) = 0.
struct DrivePulse {
    double carrier = 0.0;   // rad/s
    double amplitude = 0.0; // sqrt(power), arbitrary units
    double t_on = 0.0;      // s
    double t_off = 0.0;     // s
    PulseShape shape = PulseShape::raised_cosine;
    double edge_time = 1e-9; // raised-cosine edge duration, s
    bool impulse = false;

    void validate() const;
    /// Envelope value at time t (0 outside [t_on, t_off]).
    double envelope(double t) const;

    static DrivePulse make_impulse(double carrier);
};

struct TimeTrace {
    std::vector<double> t; // s, uniform step
    std::vector<std::complex<double>> a;   // cavity amplitude (rotating frame)
    std::vector<std::complex<double>> m;   // magnon amplitude
    std::vector<std::complex<double>> out; // output field s_out
    std::vector<double> energy;            // |a|^2
};

/// Integrate the input-output equations of motion
///   da/dt = -(i dw_a + k_a) a - i g m + sqrt(2 k_a1) s_in
///   dm/dt = -(i dw_m + k_m) m - i g a
///   s_out = -s_in + sqrt(2 k_a1) a
/// in the frame rotating at the pulse carrier (dw = detuning from carrier),
/// with fixed-step classical RK4. Rejects dt that does not resolve the
/// fastest rotating-frame scale (dt <= 0.02 * 2pi / max rate). `decimate`
/// stores every k-th step.
TimeTrace simulate(const CoupledSystem& system, const DrivePulse& pulse,
                   double t_max, double dt, std::size_t decimate = 1);

/// Coherent exchange period pi/g. Throws domain_error for g <= 0.
double rabi_period(double g);

/// Cavity energy |a(t)|^2 per bias field; row i corresponds to b_range[i].
std::vector<std::vector<double>> ringdown_map(const CoupledSystem& system,
                                              const DrivePulse& pulse,
                                              const std::vector<double>& b_range,
                                              double t_max, double dt,
                                              std::size_t decimate = 1);

struct LifetimeFit {
    double tau = 0.0;    // energy 1/e time, s
    double tau_stderr = 0.0; // s
    bool poor_fit = false; // oscillatory / non-monotone window
};

/// Least-squares line fit of log(energy) over [t_begin, t_end];
/// tau = -1/slope. Throws domain_error on non-positive energies.
LifetimeFit extract_lifetime(const TimeTrace& trace, double t_begin,
                             double t_end);

} // namespace cmag
