#include "cmag/regimes.hpp"

#include <algorithm>
#include "cmag/strfmt.hpp"

namespace cmag {

std::string to_string(Regime r) {
    switch (r) {
    case Regime::strong: return "strong";
    case Regime::mit: return "MIT";
    case Regime::purcell: return "Purcell";
    case Regime::weak: return "weak";
    }
    return "?";
}

double cooperativity(double g, double kappa_a, double kappa_m) {
    if (!(kappa_a > 0.0) || !(kappa_m > 0.0))
        throw domain_error("cooperativity: decay rates must be positive");
    return g * g / (kappa_a * kappa_m);
}

RegimeReport classify(const CoupledSystem& system, double usc_threshold) {
    system.validate();
    const double g = system.g;
    const double ka = system.cavity.kappa_a;
    const double km = system.magnon.kappa_m;

    RegimeReport rep;
    rep.cooperativity = cooperativity(g, ka, km);
    rep.purcell_factor = 1.0 + rep.cooperativity;
    rep.coherent = rep.cooperativity >= 1.0;
    rep.usc_threshold = usc_threshold;

    const double omega_ref = std::min(system.cavity.omega_a, system.omega_m());
    rep.g_over_omega = omega_ref > 0.0 ? g / omega_ref : 0.0;
    rep.usc = rep.g_over_omega >= usc_threshold;

    // Ties resolve toward the stronger-coupling label.
    if (g >= ka && g >= km)
        rep.regime = (g > 0.0) ? Regime::strong : Regime::weak;
    else if (g >= km && g < ka)
        rep.regime = Regime::mit;
    else if (g >= ka && g < km)
        rep.regime = Regime::purcell;
    else
        rep.regime = Regime::weak;

    if (g > 0.0 && (g == ka || g == km))
        rep.notes.push_back("tie: g equals a decay rate, resolved toward the "
                            "stronger-coupling label");
    rep.notes.push_back(strfmt("g vs kappa_a: %g %s", g,
                               g > ka ? "> kappa_a" : "<= kappa_a"));
    rep.notes.push_back(strfmt("g vs kappa_m: %g %s", g,
                               g > km ? "> kappa_m" : "<= kappa_m"));
    rep.notes.push_back(strfmt(
        "g/omega = %.4g vs usc_threshold %.4g (literature also uses 0.1)",
        rep.g_over_omega, usc_threshold));
    return rep;
}

} // namespace cmag
