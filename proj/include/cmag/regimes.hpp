#pragma once

#include <string>
#include <vector>

#include "cmag/physics.hpp"

namespace cmag {

enum class Regime { strong, mit, purcell, weak };

std::string to_string(Regime r);

struct RegimeReport {
    Regime regime = Regime::weak;
    bool usc = false;
    bool coherent = false; // C >= 1
    double cooperativity = 0.0;
    double g_over_omega = 0.0;
    double purcell_factor = 1.0; // F_P = 1 + C
    double usc_threshold = 0.0;
    std::vector<std::string> notes; // threshold comparisons, tie notes
};

/// C = g^2 / (kappa_a * kappa_m). Throws domain_error on a zero rate.
double cooperativity(double g, double kappa_a, double kappa_m);

/// Four-way regime label from the rate ordering, plus the orthogonal USC
/// flag g/min(omega_a, omega_m) >= usc_threshold. Exact ties g = kappa
/// resolve toward the stronger-coupling label (noted in the report).
RegimeReport classify(const CoupledSystem& system, double usc_threshold = 0.05);

} // namespace cmag
