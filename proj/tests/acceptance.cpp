// Acceptance suite: ten numbered end-to-end checks against the measured
// devices, one PASS/FAIL line each. Returns nonzero if any check fails.

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <iostream>
#include <random>
#include <string>
#include <vector>

#include "cmag/dynamics.hpp"
#include "cmag/strfmt.hpp"
#include "cmag/estimation.hpp"
#include "cmag/physics.hpp"
#include "cmag/regimes.hpp"
#include "cmag/spectra.hpp"

using namespace cmag;

namespace {

int failures = 0;

void report(int number, bool ok, const std::string& what) {
    std::cout << strfmt("%s criterion %2d: %s\n", ok ? "PASS" : "FAIL",
                        number, what.c_str());
    if (!ok)
        ++failures;
}

CoupledSystem make_system(double f_a_hz, double ka_hz, double ka1_hz,
                          double km_hz, double g_hz, double detuning_hz = 0.0) {
    CoupledSystem sys;
    sys.cavity.omega_a = constants::two_pi * f_a_hz;
    sys.cavity.kappa_a = constants::two_pi * ka_hz;
    sys.cavity.kappa_a1 = constants::two_pi * ka1_hz;
    sys.cavity.dims = {43e-3, 21e-3, 9e-3};
    sys.cavity.mode_volume = 43e-3 * 21e-3 * 9e-3;
    sys.magnon.kappa_m = constants::two_pi * km_hz;
    sys.magnon.radius = 0.18e-3;
    sys.g = constants::two_pi * g_hz;
    sys.bias_field = (sys.cavity.omega_a + constants::two_pi * detuning_hz) /
                     sys.magnon.gamma;
    return sys;
}

struct Node {
    double t;
    double energy;
};
std::vector<Node> energy_nodes(const TimeTrace& trace) {
    std::vector<Node> nodes;
    for (std::size_t i = 1; i + 1 < trace.energy.size(); ++i) {
        if (trace.energy[i] < trace.energy[i - 1] &&
            trace.energy[i] <= trace.energy[i + 1]) {
            const double y0 = trace.energy[i - 1], y1 = trace.energy[i],
                         y2 = trace.energy[i + 1];
            const double denom = y0 - 2.0 * y1 + y2;
            const double shift = denom != 0.0 ? 0.5 * (y0 - y2) / denom : 0.0;
            const double dt = trace.t[i] - trace.t[i - 1];
            nodes.push_back({trace.t[i] + shift * dt, y1});
        }
    }
    return nodes;
}

bool close(double value, double target, double rel) {
    return std::abs(value - target) <= rel * std::abs(target);
}

// ---- criterion bodies -----------------------------------------------------

void criterion_1() {
    auto sys = make_system(7.875e9, 2.67e6, 1.335e6, 2.13e6, 10.8e6);
    auto trace = simulate(sys, DrivePulse::make_impulse(sys.cavity.omega_a),
                          300e-9, 0.05e-9);
    auto nodes = energy_nodes(trace);
    bool ok = nodes.size() >= 4;
    double period = 0.0;
    if (ok) {
        for (std::size_t i = 1; i < 4; ++i)
            period += nodes[i].t - nodes[i - 1].t;
        period /= 3.0;
    }
    ok = ok && close(period, 46.3e-9, 0.01);
    const double extinction_db =
        ok ? 10.0 * std::log10(trace.energy[0] /
                               std::max(nodes[0].energy, 1e-300))
           : 0.0;
    ok = ok && extinction_db > 20.0;
    report(1, ok,
           strfmt("Rabi period %.3g ns (46.3 ns +- 1%%), node "
                       "extinction %.1f dB (> 20 dB)",
                       period * 1e9, extinction_db));
}

void criterion_2() {
    const double c1 = cooperativity(constants::two_pi * 10.8e6,
                                    constants::two_pi * 2.67e6,
                                    constants::two_pi * 2.13e6);
    const double c2 = cooperativity(constants::two_pi * 2500e6,
                                    constants::two_pi * 33e6,
                                    constants::two_pi * 15e6);
    const bool ok = close(c1, 21.0, 0.05) && close(c2, 12600.0, 0.02);
    report(2, ok,
           strfmt("cooperativity %.4g (21 +- 5%%) and %.6g "
                       "(12600 +- 2%%)",
                       c1, c2));
}

void criterion_3() {
    // Purcell device: kappa_a/2pi = 1.07 MHz at C = 0.95
    const double km_hz = 19e6;
    const double g_hz = std::sqrt(0.95 * 1.07e6 * km_hz);
    auto sys = make_system(7.875e9, 1.07e6, 0.535e6, km_hz, g_hz);
    const auto purcell = purcell_kappa(sys);
    const double keff_mhz = purcell.kappa_eff / constants::two_pi / 1e6;
    bool ok = close(keff_mhz, 2.09, 0.01);

    auto pulse = DrivePulse::make_impulse(sys.cavity.omega_a);
    auto tau1 =
        extract_lifetime(simulate(sys, pulse, 250e-9, 0.1e-9), 40e-9, 160e-9);
    auto bare = sys;
    bare.g = 0.0; // cavity alone
    auto tau2 =
        extract_lifetime(simulate(bare, pulse, 300e-9, 0.1e-9), 0.0, 250e-9);
    const double tau_formula = 1.0 / (2.0 * purcell.kappa_eff);
    ok = ok && std::abs(tau1.tau - 33.4e-9) <= 5e-9;
    ok = ok && std::abs(tau_formula - 33.4e-9) <= 5e-9;
    ok = ok && std::abs(tau1.tau - tau_formula) <= 0.1 * tau_formula;
    ok = ok && std::abs(tau2.tau - 69.8e-9) <= 7e-9;
    report(3, ok,
           strfmt("kappa_eff/2pi %.4g MHz (2.09 +- 1%), tau1 %.3g ns "
                       "(33.4 +- 5), 1/(2 kappa_eff) %.3g ns, tau2 %.3g ns "
                       "(69.8 +- 7)",
                       keff_mhz, tau1.tau * 1e9, tau_formula * 1e9,
                       tau2.tau * 1e9));
}

void criterion_4() {
    std::mt19937 rng(4);
    std::uniform_real_distribution<double> log_c(std::log(0.1), std::log(100.0));
    bool height_ok = true, width_ok = true;
    double worst_height = 0.0, worst_width = 0.0;
    for (int trial = 0; trial < 40; ++trial) {
        const double c = std::exp(log_c(rng));
        const double ka_hz = 50e6;
        // keep (1+C)kappa_m five thousand times below kappa_a so the residual
        // cavity background cannot interfere with the transparency window at
        // the half-height crossings
        const double km_hz = ka_hz / (5000.0 * (1.0 + c));
        const double g_hz = std::sqrt(c * ka_hz * km_hz);
        auto sys = make_system(7.875e9, ka_hz, 0.5 * ka_hz, km_hz, g_hz);

        const double height = std::norm(reflection(sys, sys.cavity.omega_a));
        const double expected = (c / (1.0 + c)) * (c / (1.0 + c));
        worst_height = std::max(worst_height, std::abs(height - expected));
        height_ok = height_ok && std::abs(height - expected) <= 1e-12;

        // numeric FWHM of the transparency window
        const double win = 2.0 * (1.0 + c) * constants::two_pi * km_hz;
        FrequencyGrid grid{sys.cavity.omega_a - 4.0 * win,
                           sys.cavity.omega_a + 4.0 * win, 40001};
        auto spec = spectrum(sys, grid);
        const double half = 0.5 * height;
        double lo = 0.0, hi = 0.0;
        for (std::size_t i = 1; i < grid.points; ++i) {
            const double y0 = std::norm(spec.values[i - 1]);
            const double y1 = std::norm(spec.values[i]);
            if (y0 < half && y1 >= half && lo == 0.0)
                lo = grid.at(i - 1) +
                     grid.step() * (half - y0) / (y1 - y0);
            if (y0 >= half && y1 < half)
                hi = grid.at(i - 1) +
                     grid.step() * (y0 - half) / (y0 - y1);
        }
        const double fwhm = hi - lo;
        const double err = std::abs(fwhm - win) / win;
        worst_width = std::max(worst_width, err);
        width_ok = width_ok && err <= 0.02;
    }
    report(4, height_ok && width_ok,
           strfmt("transparency height matches (C/(1+C))^2 (worst "
                       "|err| %.2g <= 1e-12); window FWHM vs 2(1+C)kappa_m "
                       "worst %.2g (<= 2%%)",
                       worst_height, worst_width));
}

void criterion_5() {
    CavityMode xband = CavityMode::box(constants::two_pi * 7.875e9,
                                       constants::two_pi * 2.67e6,
                                       constants::two_pi * 1.335e6,
                                       {43e-3, 21e-3, 9e-3});
    MagnonMode small;
    small.radius = 0.18e-3;
    small.kappa_m = constants::two_pi * 2.13e6;
    const double g1_mhz =
        coupling_strength(xband, small, 1.0) / constants::two_pi / 1e6;

    CavityMode mmwave = CavityMode::box(constants::two_pi * 37.5e9,
                                        constants::two_pi * 33e6,
                                        constants::two_pi * 16e6,
                                        {7.0e-3, 5.0e-3, 3.2e-3}); // 112 mm^3
    MagnonMode large;
    large.radius = 1.25e-3;
    large.kappa_m = constants::two_pi * 15e6;
    const double g2_ghz =
        coupling_strength(mmwave, large, 1.0) / constants::two_pi / 1e9;
    const double n_large = spin_count(large);

    const bool ok = close(g1_mhz, 10.8, 0.25) && close(g2_ghz, 2.5, 0.35) &&
                    close(n_large, 3.45e19, 0.005);
    report(5, ok,
           strfmt("forward design g %.3g MHz (10.8 +- 25%%), %.3g GHz "
                       "(2.5 +- 35%%); spin count %.4g (3.45e19 +- 0.5%%)",
                       g1_mhz, g2_ghz, n_large));
}

void criterion_6() {
    struct Device {
        const char* label;
        double ka_hz, ka1_hz, km_hz, g_hz;
    };
    const Device devices[] = {
        {"strong", 2.67e6, 1.335e6, 2.13e6, 10.8e6},
        {"MIT", 34.9e6, 17.45e6, 0.24e6, 5.4e6},
        {"Purcell", 1.07e6, 0.535e6, 19e6, std::sqrt(0.95 * 1.07e6 * 19e6)},
    };

    bool ok = true;
    std::string detail;
    for (const auto& dev : devices) {
        std::map<std::string, double> truth{
            {"g", constants::two_pi * dev.g_hz},
            {"kappa_a", constants::two_pi * dev.ka_hz},
            {"kappa_a1", constants::two_pi * dev.ka1_hz},
            {"kappa_m", constants::two_pi * dev.km_hz},
            {"omega_a", constants::two_pi * 7.875e9},
            {"omega_m", constants::two_pi * 7.875e9}};

        FitProblem clean;
        clean.model = FitModel::spectrum;
        const double half =
            4.0 * constants::two_pi * std::max(dev.g_hz, dev.ka_hz);
        for (std::size_t i = 0; i < 2001; ++i) {
            clean.x.push_back(truth.at("omega_a") - half +
                              2.0 * half * double(i) / 2000.0);
            clean.y.push_back(eval_fit_model(clean, i, truth).value);
        }
        // the port coupling is calibrated separately in practice; fixing it
        // also removes the conjugate-branch ambiguity of magnitude-only data
        clean.fixed_params["kappa_a1"] = truth.at("kappa_a1");
        for (const auto& [name, v] : truth) {
            if (name == "kappa_a1")
                continue;
            if (name.rfind("omega", 0) == 0)
                clean.free_params[name] = {v - constants::two_pi * 200e6,
                                           v + constants::two_pi * 200e6};
            else
                clean.free_params[name] = {v / 1e3, v * 1e3};
        }

        // +-30% start: rates and g by the fraction, frequencies by the same
        // fraction of the cavity linewidth
        auto perturbed = [&](unsigned seed) {
            std::mt19937 rng(seed);
            std::uniform_real_distribution<double> u(-1.0, 1.0);
            std::map<std::string, double> init;
            for (const auto& [name, v] : truth) {
                if (name.rfind("omega", 0) == 0)
                    init[name] = v + 0.3 * truth.at("kappa_a") *
                                         (u(rng) > 0 ? 1.0 : -1.0);
                else
                    init[name] = v * (1.0 + 0.3 * u(rng));
            }
            return init;
        };

        auto zero = fit(clean, perturbed(1));
        bool clean_ok = zero.converged;
        for (const auto& [name, v] : truth) {
            const double scale =
                name.rfind("omega", 0) == 0 ? truth.at("kappa_a") : v;
            clean_ok = clean_ok &&
                       std::abs(zero.params.at(name) - v) <= 1e-3 * scale;
        }
        bool dev_ok = clean_ok;

        // 200 seeded 1%-noise trials, every parameter within 3 sigma
        int good = 0;
        for (unsigned trial = 0; trial < 200; ++trial) {
            FitProblem noisy = clean;
            std::mt19937 rng(1000 + trial);
            std::normal_distribution<double> noise(0.0, 0.01);
            for (auto& y : noisy.y)
                y += noise(rng);
            auto res = fit(noisy, perturbed(2000 + trial));
            if (!res.converged)
                continue;
            bool within = true;
            for (const auto& [name, v] : truth) {
                if (!res.param_stderr.contains(name))
                    continue; // fixed parameter, reproduced exactly
                within = within && std::abs(res.params.at(name) - v) <=
                                       3.0 * res.param_stderr.at(name);
            }
            if (within)
                ++good;
        }
        dev_ok = dev_ok && good >= 190;
        ok = ok && dev_ok;
        detail += strfmt("%s: noiseless %s, %d/200 noisy within 3 "
                              "sigma; ",
                              dev.label, clean_ok ? "ok" : "FAILED", good);
        if (!dev_ok)
            detail += "(FAILED) ";
    }
    report(6, ok, "fit round-trip +-30% start — " + detail);
}

void criterion_7() {
    CavityMode cavity = CavityMode::box(constants::two_pi * 7.875e9,
                                        constants::two_pi * 2.67e6,
                                        constants::two_pi * 1.335e6,
                                        {43e-3, 21e-3, 9e-3});
    MagnonMode sphere;
    sphere.radius = 0.18e-3;
    sphere.kappa_m = constants::two_pi * 2.13e6;
    const double g0 = coupling_strength(cavity, sphere, overlap_eta({0.0}, cavity));
    bool ok = g0 > 0.0;
    double prev = g0;
    const double lx = cavity.dims[0];
    for (int i = 1; i <= 100; ++i) {
        const double x = 0.5 * lx * double(i) / 100.0;
        const double g =
            coupling_strength(cavity, sphere, overlap_eta({x}, cavity));
        const double expected = std::cos(constants::pi * x / lx);
        ok = ok && std::abs(g / g0 - expected) <= 1e-12;
        ok = ok && g <= prev;
        prev = g;
    }
    ok = ok && prev <= 1e-9 * g0; // zero at the cavity wall
    report(7, ok,
           "position sweep g(x)/g(0) = cos(pi x / L_x), monotone on "
           "[0, L_x/2], zero at the edge");
}

void criterion_8() {
    const double f0 = 10e9;
    const std::vector<double> ladder{1e-3, 1e-2, 0.067, 0.2};
    std::vector<double> dev;
    bool ok = true;
    for (double x : ladder) {
        auto sys = make_system(f0, 1e6, 0.5e6, 1e6, x * f0);
        auto rwa = normal_modes_rwa(sys);
        auto full = normal_modes_full(sys);
        const double split_rwa = rwa.omega_plus.real() - rwa.omega_minus.real();
        const double split_full =
            full.omega_plus.real() - full.omega_minus.real();
        dev.push_back(std::abs(split_full - split_rwa) / split_rwa);
    }
    ok = ok && dev[2] < 0.005; // g/omega = 0.067
    for (std::size_t i = 0; i < ladder.size(); ++i) {
        const double ratio = dev[i] / (ladder[i] * ladder[i]);
        ok = ok && ratio > 0.45 && ratio < 0.60; // quadratic growth
    }
    report(8, ok,
           strfmt("RWA splitting deviation %.3g%% at g/omega = 0.067 "
                       "(< 0.5%%), quadratic in g/omega across the ladder",
                       dev[2] * 100.0));
}

void criterion_9() {
    // passivity over 1e4 random parameter draws
    std::mt19937 rng(9);
    std::uniform_real_distribution<double> log_rate(4.0, 8.0);
    std::uniform_real_distribution<double> u(0.0, 1.0);
    bool passive = true;
    for (int trial = 0; trial < 10000; ++trial) {
        auto sys = make_system(7.875e9, std::pow(10.0, log_rate(rng)), 1.0,
                               std::pow(10.0, log_rate(rng)),
                               std::pow(10.0, log_rate(rng)),
                               (u(rng) - 0.5) * 100e6);
        sys.cavity.kappa_a1 = u(rng) * sys.cavity.kappa_a;
        if (!(sys.cavity.kappa_a1 > 0.0))
            continue;
        const double omega =
            sys.cavity.omega_a + (u(rng) - 0.5) * constants::two_pi * 400e6;
        passive = passive && std::abs(reflection(sys, omega)) <= 1.0 + 1e-12;
    }

    // lossless energy conservation over 10 Rabi periods
    auto lossless = make_system(7.875e9, 1.0, 0.5, 1.0, 10.8e6);
    lossless.cavity.kappa_a = 1e-6;
    lossless.cavity.kappa_a1 = 5e-7;
    lossless.magnon.kappa_m = 1e-6;
    auto trace = simulate(lossless,
                          DrivePulse::make_impulse(lossless.cavity.omega_a),
                          10.0 * rabi_period(lossless.g), 0.01 / lossless.g);
    double worst_drift = 0.0;
    for (std::size_t i = 0; i < trace.t.size(); ++i)
        worst_drift = std::max(
            worst_drift, std::abs(std::norm(trace.a[i]) +
                                  std::norm(trace.m[i]) - 1.0));
    const bool conserved = worst_drift <= 1e-8;

    // spectrum dip locations vs eigenvalue real parts, within one grid step
    auto strong = make_system(7.875e9, 2.67e6, 1.335e6, 2.13e6, 10.8e6);
    FrequencyGrid grid{strong.cavity.omega_a - constants::two_pi * 70e6,
                       strong.cavity.omega_a + constants::two_pi * 70e6, 1001};
    auto spec = spectrum(strong, grid);
    std::vector<double> dips;
    for (std::size_t i = 1; i + 1 < grid.points; ++i) {
        const double y0 = std::norm(spec.values[i - 1]);
        const double y1 = std::norm(spec.values[i]);
        const double y2 = std::norm(spec.values[i + 1]);
        if (y1 < y0 && y1 <= y2 && y1 < 0.5)
            dips.push_back(grid.at(i));
    }
    auto modes = normal_modes_rwa(strong);
    bool dips_ok = dips.size() == 2;
    if (dips_ok) {
        dips_ok = std::abs(dips[0] - modes.omega_minus.real()) <= grid.step() &&
                  std::abs(dips[1] - modes.omega_plus.real()) <= grid.step();
    }

    // analytic Jacobian vs central finite differences
    bool jac_ok = true;
    std::map<std::string, double> p{
        {"g", constants::two_pi * 10.8e6},
        {"kappa_a", constants::two_pi * 2.67e6},
        {"kappa_a1", constants::two_pi * 1.335e6},
        {"kappa_m", constants::two_pi * 2.13e6},
        {"omega_a", constants::two_pi * 7.875e9},
        {"omega_m", constants::two_pi * 7.875e9}};
    std::uniform_real_distribution<double> s(-1.0, 1.0);
    for (int trial = 0; trial < 100; ++trial) {
        auto pt = p;
        for (auto& [name, v] : pt)
            if (name.rfind("omega", 0) == 0)
                v += s(rng) * 3.0 * p.at("kappa_a");
            else
                v *= std::exp(0.5 * s(rng));
        FitProblem probe;
        probe.model = FitModel::spectrum;
        probe.x = {p.at("omega_a") + s(rng) * constants::two_pi * 40e6};
        const auto e = eval_fit_model(probe, 0, pt);
        for (const auto& [name, grad] : e.grad) {
            const double h = name.rfind("omega", 0) == 0
                                 ? 1e-6 * p.at("kappa_a")
                                 : 1e-7 * pt.at(name);
            auto hi = pt, lo = pt;
            hi[name] += h;
            lo[name] -= h;
            const double fd = (eval_fit_model(probe, 0, hi).value -
                               eval_fit_model(probe, 0, lo).value) /
                              (2.0 * h);
            const double scale =
                std::max(std::abs(grad), 1.0 / p.at("kappa_a"));
            jac_ok = jac_ok && std::abs(grad - fd) <= 1e-6 * scale;
        }
    }

    const bool ok = passive && conserved && dips_ok && jac_ok;
    report(9, ok,
           strfmt("passivity 1e4 draws: %s; conservation drift %.2g "
                       "(<= 1e-8); dip/eigenvalue agreement: %s; Jacobian vs "
                       "FD: %s",
                       passive ? "ok" : "violated", worst_drift,
                       dips_ok ? "ok" : "off", jac_ok ? "ok" : "off"));
}

void criterion_10() {
    // Documented exclusions: absolute fabricated-cavity linewidths, the
    // measured 110 ns group-delay value to better than +-30% (the external
    // coupling of that device is unpublished), and higher-order magnon
    // side-modes. Here we verify the model's own matched-port delay formula
    // instead of the unreproducible absolute number.
    auto sys = make_system(7.875e9, 34.9e6, 17.45e6, 0.24e6, 5.4e6);
    const double c = cooperativity(sys.g, sys.cavity.kappa_a,
                                   sys.magnon.kappa_m);
    FrequencyGrid grid{sys.cavity.omega_a - constants::two_pi * 3e6,
                       sys.cavity.omega_a + constants::two_pi * 3e6, 8001};
    auto delays = group_delay(spectrum(sys, grid));
    const double peak = *std::max_element(delays.begin(), delays.end());
    const double formula = 1.0 / ((1.0 + c) * sys.magnon.kappa_m);
    const bool ok = std::abs(peak - formula) <= 0.01 * formula;
    report(10, ok,
           strfmt("excluded targets documented; matched-port delay peak "
                       "%.3g ns equals 1/((1+C)kappa_m) = %.3g ns within "
                       "1%% (measured 110 ns excluded at +-30%%: external "
                       "coupling unpublished)",
                       peak * 1e9, formula * 1e9));
}

} // namespace

int main() {
    criterion_1();
    criterion_2();
    criterion_3();
    criterion_4();
    criterion_5();
    criterion_6();
    criterion_7();
    criterion_8();
    criterion_9();
    criterion_10();
    if (failures == 0) {
        std::cout << "all 10 acceptance criteria passed\n";
        return 0;
    }
    std::cout << failures << " acceptance criteria failed\n";
    return 1;
}
