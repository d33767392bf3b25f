#pragma once

#include <map>
#include <string>
#include <vector>

#include "cmag/physics.hpp"

namespace cmag {

/// Fit models:
///   spectrum  — |r(omega)|^2 of the single-spectrum reflection formula;
///               parameters omega_a, omega_m, kappa_a, kappa_a1, kappa_m, g.
///   field_map — same reflection model with omega_m = gamma*B + omega_m0,
///               jointly over all rows; parameters omega_a, kappa_a,
///               kappa_a1, kappa_m, g, gamma, omega_m0.
///   decay     — log-energy line log A - 2*kappa*t; parameters amplitude,
///               kappa.
enum class FitModel { spectrum, field_map, decay };

struct ParamBounds {
    double lower = 0.0;
    double upper = 0.0;
};

struct FitProblem {
    FitModel model = FitModel::spectrum;
    std::vector<double> x;       // rad/s (spectrum, field_map) or s (decay)
    std::vector<double> b;       // tesla, field_map only (per point)
    std::vector<double> y;       // |r|^2 or energy
    std::vector<double> weights; // optional, empty = uniform
    std::map<std::string, ParamBounds> free_params;
    std::map<std::string, double> fixed_params;

    void validate() const;
};

struct FitResult {
    std::map<std::string, double> params;
    std::map<std::string, double> param_stderr; // linearized, approximate
    double residual_norm = 0.0;
    int iterations = 0;
    bool converged = false;
    bool singular_jacobian = false; // damped fallback was needed
};

/// Model value and analytic parameter gradient (linear parameter space) at
/// data point i. The gradient keys are the model's parameter names.
struct ModelEval {
    double value = 0.0;
    std::map<std::string, double> grad;
};
ModelEval eval_fit_model(const FitProblem& problem, std::size_t i,
                         const std::map<std::string, double>& params);

/// Damped Gauss-Newton with multiplicative damping (x3 on rejection, /2 on
/// acceptance, initial 1e-3 of the Gauss-Newton diagonal). Rate-like
/// parameters and g are fitted in log-space. Converged when the relative
/// step < 1e-10 or the relative residual decrease < 1e-12; capped at 500
/// iterations. Non-convergence returns converged = false with the
/// best-so-far parameters.
FitResult fit(const FitProblem& problem,
              const std::map<std::string, double>& init);

/// Heuristic starting values from a (omega, |r|^2) spectrum: omega_a from
/// the global minimum, kappa_a from the half-depth width, g from half the
/// dip-pair separation, kappa_m from the transparency-window width.
/// Throws domain_error on featureless data.
std::map<std::string, double> init_guess(const std::vector<double>& omega,
                                         const std::vector<double>& r2);

/// Joint fit of a long-format (B, omega, |r|^2) map sharing
/// (g, kappa_a, kappa_a1, kappa_m, omega_a, gamma, omega_m0).
FitResult fit_field_map(const std::vector<double>& b,
                        const std::vector<double>& omega,
                        const std::vector<double>& r2,
                        const std::map<std::string, double>& init,
                        const std::map<std::string, ParamBounds>& free_params,
                        const std::map<std::string, double>& fixed_params = {});

struct DerivedQuantities {
    double cooperativity = 0.0;
    double purcell_factor = 0.0;
    double splitting = 0.0;   // 2g, rad/s
    double rabi_period = 0.0; // pi/g, s (inf for g = 0)
};

/// C, F_P, 2g and pi/g from a fit result containing g, kappa_a, kappa_m.
DerivedQuantities derived_quantities(const FitResult& result);

} // namespace cmag
