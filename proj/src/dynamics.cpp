#include "cmag/dynamics.hpp"

#include <algorithm>
#include <cmath>

namespace cmag {

namespace {
using cplx = std::complex<double>;
constexpr cplx I{0.0, 1.0};
} // namespace

void DrivePulse::validate() const {
    if (impulse)
        return;
    if (!(t_on >= 0.0) || !(t_off > t_on))
        throw domain_error("pulse: need t_off > t_on >= 0");
    if (!(amplitude >= 0.0))
        throw domain_error("pulse: amplitude must be nonnegative");
    if (!(edge_time >= 0.0))
        throw domain_error("pulse: edge_time must be nonnegative");
}

double DrivePulse::envelope(double t) const {
    if (impulse || t < t_on || t > t_off)
        return 0.0;
    if (shape == PulseShape::rectangular)
        return amplitude;
    const double edge = std::min(edge_time, 0.5 * (t_off - t_on));
    if (edge <= 0.0)
        return amplitude;
    if (t < t_on + edge)
        return amplitude * 0.5 *
               (1.0 - std::cos(constants::pi * (t - t_on) / edge));
    if (t > t_off - edge)
        return amplitude * 0.5 *
               (1.0 - std::cos(constants::pi * (t_off - t) / edge));
    return amplitude;
}

DrivePulse DrivePulse::make_impulse(double carrier) {
    DrivePulse p;
    p.carrier = carrier;
    p.impulse = true;
    return p;
}

TimeTrace simulate(const CoupledSystem& system, const DrivePulse& pulse,
                   double t_max, double dt, std::size_t decimate) {
    system.validate();
    pulse.validate();
    if (!(t_max > 0.0) || !(dt > 0.0))
        throw domain_error("simulate: t_max and dt must be positive");
    if (decimate == 0)
        throw domain_error("simulate: decimate must be >= 1");

    const double delta_a = system.cavity.omega_a - pulse.carrier;
    const double delta_m = system.omega_m() - pulse.carrier;
    // with g = 0 the magnon stays unpopulated and its scales are irrelevant
    const double fastest =
        system.g > 0.0
            ? std::max({system.g, system.cavity.kappa_a,
                        system.magnon.kappa_m, std::abs(delta_a),
                        std::abs(delta_m)})
            : std::max(system.cavity.kappa_a, std::abs(delta_a));
    if (fastest > 0.0 && dt > 0.02 * constants::two_pi / fastest)
        throw domain_error(
            "simulate: dt too large to resolve the fastest rotating-frame "
            "scale (need dt <= 0.02 * 2pi / max rate)");

    const double in_coupling = std::sqrt(2.0 * system.cavity.kappa_a1);
    const cplx coef_a = -(I * delta_a + system.cavity.kappa_a);
    const cplx coef_m = -(I * delta_m + system.magnon.kappa_m);
    const cplx gi = -I * system.g;

    auto deriv = [&](double t, cplx a, cplx m, cplx& da, cplx& dm) {
        const double drive = pulse.envelope(t);
        da = coef_a * a + gi * m + in_coupling * drive;
        dm = coef_m * m + gi * a;
    };

    const auto n_steps = static_cast<std::size_t>(std::ceil(t_max / dt));
    TimeTrace trace;
    const std::size_t n_store = n_steps / decimate + 1;
    trace.t.reserve(n_store);
    trace.a.reserve(n_store);
    trace.m.reserve(n_store);
    trace.out.reserve(n_store);
    trace.energy.reserve(n_store);

    cplx a = pulse.impulse ? cplx{1.0, 0.0} : cplx{0.0, 0.0};
    cplx m{0.0, 0.0};
    auto store = [&](std::size_t step) {
        const double t = double(step) * dt;
        trace.t.push_back(t);
        trace.a.push_back(a);
        trace.m.push_back(m);
        trace.out.push_back(-pulse.envelope(t) + in_coupling * a);
        trace.energy.push_back(std::norm(a));
    };

    store(0);
    for (std::size_t step = 0; step < n_steps; ++step) {
        const double t = double(step) * dt;
        cplx k1a, k1m, k2a, k2m, k3a, k3m, k4a, k4m;
        deriv(t, a, m, k1a, k1m);
        deriv(t + 0.5 * dt, a + 0.5 * dt * k1a, m + 0.5 * dt * k1m, k2a, k2m);
        deriv(t + 0.5 * dt, a + 0.5 * dt * k2a, m + 0.5 * dt * k2m, k3a, k3m);
        deriv(t + dt, a + dt * k3a, m + dt * k3m, k4a, k4m);
        a += dt / 6.0 * (k1a + 2.0 * k2a + 2.0 * k3a + k4a);
        m += dt / 6.0 * (k1m + 2.0 * k2m + 2.0 * k3m + k4m);
        if ((step + 1) % decimate == 0 || step + 1 == n_steps)
            store(step + 1);
    }
    return trace;
}

double rabi_period(double g) {
    if (!(g > 0.0))
        throw domain_error("rabi_period: g must be positive");
    return constants::pi / g;
}

std::vector<std::vector<double>> ringdown_map(const CoupledSystem& system,
                                              const DrivePulse& pulse,
                                              const std::vector<double>& b_range,
                                              double t_max, double dt,
                                              std::size_t decimate) {
    std::vector<std::vector<double>> rows;
    rows.reserve(b_range.size());
    CoupledSystem sys = system;
    for (double b : b_range) {
        sys.bias_field = b;
        rows.push_back(simulate(sys, pulse, t_max, dt, decimate).energy);
    }
    return rows;
}

LifetimeFit extract_lifetime(const TimeTrace& trace, double t_begin,
                             double t_end) {
    std::vector<double> xs, ys;
    for (std::size_t i = 0; i < trace.t.size(); ++i) {
        if (trace.t[i] < t_begin || trace.t[i] > t_end)
            continue;
        if (!(trace.energy[i] > 0.0))
            throw domain_error("extract_lifetime: non-positive energy in window");
        xs.push_back(trace.t[i]);
        ys.push_back(std::log(trace.energy[i]));
    }
    if (xs.size() < 3)
        throw domain_error("extract_lifetime: window contains < 3 samples");

    const auto n = double(xs.size());
    double sx = 0, sy = 0, sxx = 0, sxy = 0;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        sx += xs[i];
        sy += ys[i];
        sxx += xs[i] * xs[i];
        sxy += xs[i] * ys[i];
    }
    const double denom = n * sxx - sx * sx;
    const double slope = (n * sxy - sx * sy) / denom;
    const double intercept = (sy - slope * sx) / n;

    double ss_res = 0.0, ss_tot = 0.0;
    const double y_mean = sy / n;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        const double r = ys[i] - (intercept + slope * xs[i]);
        ss_res += r * r;
        ss_tot += (ys[i] - y_mean) * (ys[i] - y_mean);
    }

    LifetimeFit fit;
    if (!(slope < 0.0)) {
        fit.poor_fit = true;
        fit.tau = 0.0;
        return fit;
    }
    fit.tau = -1.0 / slope;
    const double slope_var = xs.size() > 2
                                 ? (ss_res / (n - 2.0)) * n / denom
                                 : 0.0;
    fit.tau_stderr = std::sqrt(slope_var) / (slope * slope);
    fit.poor_fit = ss_tot > 0.0 && ss_res / ss_tot > 0.05;
    return fit;
}

} // namespace cmag
