// cmag — coupled magnon / microwave-photon toolkit.
// Subcommands: design, spectrum, map, rabi, ringdown, fit, classify.
// Exit codes: 0 ok, 1 usage, 2 config/data parse, 3 fit non-convergence,
// 4 numeric/domain error.

#include <algorithm>
#include <fstream>
#include <iostream>
#include <memory>
#include <sstream>

#include <CLI11.hpp>

#include "cmag/config.hpp"
#include "cmag/strfmt.hpp"
#include "cmag/dynamics.hpp"
#include "cmag/estimation.hpp"
#include "cmag/physics.hpp"
#include "cmag/regimes.hpp"
#include "cmag/spectra.hpp"
#include "cmag/table.hpp"

namespace {

using namespace cmag;

double mhz(double omega) { return omega / constants::two_pi / 1e6; }
double ghz(double omega) { return omega / constants::two_pi / 1e9; }

struct Output {
    std::string path;
    std::ofstream file;
    std::ostream& stream() {
        if (path.empty())
            return std::cout;
        if (!file.is_open()) {
            file.open(path);
            if (!file)
                throw config_error("cannot open output file '" + path + "'");
        }
        return file;
    }
};

void print_regime(std::ostream& out, const RegimeReport& rep, bool verbose) {
    out << strfmt("regime = %s\n", to_string(rep.regime).c_str());
    out << strfmt("usc = %s\n", rep.usc ? "true" : "false");
    out << strfmt("coherent = %s\n", rep.coherent ? "true" : "false");
    out << strfmt("cooperativity = %.6g\n", rep.cooperativity);
    out << strfmt("purcell_factor = %.6g\n", rep.purcell_factor);
    out << strfmt("g_over_omega = %.6g\n", rep.g_over_omega);
    if (verbose)
        for (const auto& note : rep.notes)
            out << "note: " << note << '\n';
}

int cmd_design(const ExperimentConfig& cfg, Output& out, bool verbose) {
    if (cfg.text_or("system", "g_source", "direct") != "geometry")
        throw config_error("design requires g_source = geometry");
    const CoupledSystem sys = cfg.build_system();
    auto& os = out.stream();

    double eta = 1.0;
    if (cfg.has("system", "eta"))
        eta = cfg.quantity("system", "eta", Dimension::plain);
    else if (cfg.has("system", "sphere_x"))
        eta = overlap_eta(
            {cfg.quantity("system", "sphere_x", Dimension::length)},
            sys.cavity);

    os << strfmt("spin_count = %.6g\n", spin_count(sys.magnon));
    os << strfmt("eta = %.6g\n", eta);
    os << strfmt("g = %.6g MHz\n", mhz(sys.g));
    os << strfmt("f_eff = %.6g GHz\n",
                 effective_frequency(sys.cavity, sys.magnon) / 1e9);
    const double usc_threshold =
        cfg.quantity_or("task", "usc_threshold", Dimension::plain, 0.05);
    print_regime(os, classify(sys, usc_threshold), verbose);

    if (cfg.has("sweep", "sweep_diameter_start")) {
        const double d0 =
            cfg.quantity("sweep", "sweep_diameter_start", Dimension::length);
        const double d1 =
            cfg.quantity("sweep", "sweep_diameter_stop", Dimension::length);
        const auto pts = static_cast<std::size_t>(cfg.quantity_or(
            "sweep", "sweep_diameter_points", Dimension::plain, 21));
        Table table;
        table.add("diameter", "mm");
        table.add("f_eff", "GHz");
        table.add("g", "MHz");
        CoupledSystem swept = sys;
        for (std::size_t i = 0; i < pts; ++i) {
            const double d = d0 + (d1 - d0) * double(i) / double(pts - 1);
            swept.magnon.radius = 0.5 * d;
            const double g = coupling_strength(swept.cavity, swept.magnon, eta);
            table.append_row(
                {d * 1e3, effective_frequency(swept.cavity, swept.magnon) / 1e9,
                 mhz(g)});
        }
        table.write(os);
    }
    return 0;
}

int cmd_spectrum(const ExperimentConfig& cfg, Output& out) {
    const CoupledSystem sys = cfg.build_system();
    const FrequencyGrid grid = cfg.build_grid();
    const ReflectionSpectrum spec = spectrum(sys, grid);
    const auto delay = group_delay(spec);

    Table table;
    table.add("freq", "GHz");
    table.add("R2");
    table.add("arg_r", "rad");
    table.add("group_delay", "ns");
    for (std::size_t i = 0; i < grid.points; ++i)
        table.append_row({ghz(grid.at(i)), std::norm(spec.values[i]),
                          std::arg(spec.values[i]), delay[i] * 1e9});
    table.write(out.stream());
    return 0;
}

int cmd_map(const ExperimentConfig& cfg, Output& out) {
    const CoupledSystem sys = cfg.build_system();
    const FrequencyGrid grid = cfg.build_grid();
    const auto b_range = cfg.build_b_range();
    const auto rows = field_map(sys, b_range, grid);

    Table table;
    table.add("B", "mT");
    table.add("freq", "GHz");
    table.add("R2");
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < grid.points; ++c)
            table.append_row({b_range[r] * 1e3, ghz(grid.at(c)), rows[r][c]});
    table.write(out.stream());
    return 0;
}

int cmd_rabi(const ExperimentConfig& cfg, Output& out) {
    const CoupledSystem sys = cfg.build_system();
    const DrivePulse pulse = cfg.build_pulse(sys.cavity.omega_a);
    const TimeTrace trace = simulate(sys, pulse, cfg.time_max(),
                                     cfg.time_step(), cfg.decimation());
    Table table;
    table.add("t", "ns");
    table.add("energy");
    table.add("out_power");
    for (std::size_t i = 0; i < trace.t.size(); ++i)
        table.append_row({trace.t[i] * 1e9, trace.energy[i],
                          std::norm(trace.out[i])});
    table.write(out.stream());
    return 0;
}

int cmd_ringdown(const ExperimentConfig& cfg, Output& out) {
    const CoupledSystem sys = cfg.build_system();
    const DrivePulse pulse = cfg.build_pulse(sys.cavity.omega_a);
    const auto b_range = cfg.build_b_range();
    const double dt = cfg.time_step();
    const auto decimate = cfg.decimation();
    const auto rows =
        ringdown_map(sys, pulse, b_range, cfg.time_max(), dt, decimate);

    Table table;
    table.add("B", "mT");
    table.add("t", "ns");
    table.add("energy");
    for (std::size_t r = 0; r < rows.size(); ++r)
        for (std::size_t c = 0; c < rows[r].size(); ++c)
            table.append_row({b_range[r] * 1e3,
                              double(c) * dt * double(decimate) * 1e9,
                              rows[r][c]});
    table.write(out.stream());
    return 0;
}

Dimension column_dimension(const std::string& name) {
    if (name == "freq")
        return Dimension::frequency;
    if (name == "B")
        return Dimension::field;
    if (name == "t")
        return Dimension::time;
    return Dimension::plain;
}

std::vector<double> converted(const Table::Column& col) {
    const double f = unit_factor(col.unit, column_dimension(col.name));
    std::vector<double> v = col.values;
    for (double& x : v)
        x *= f;
    return v;
}

int cmd_fit(const ExperimentConfig& cfg, const std::string& data_path,
            Output& out, bool verbose) {
    const Table data = Table::load(data_path);

    FitProblem problem;
    const auto* freq = data.find("freq");
    const auto* r2 = data.find("R2");
    const auto* bias = data.find("B");
    const auto* time_col = data.find("t");
    const auto* energy = data.find("energy");

    if (freq && r2 && bias) {
        problem.model = FitModel::field_map;
        problem.x = converted(*freq);
        problem.b = converted(*bias);
        problem.y = r2->values;
    } else if (freq && r2) {
        problem.model = FitModel::spectrum;
        problem.x = converted(*freq);
        problem.y = r2->values;
    } else if (time_col && energy) {
        problem.model = FitModel::decay;
        problem.x = converted(*time_col);
        problem.y = energy->values;
    } else {
        throw config_error(data_path +
                           ": need columns (freq, R2), (B, freq, R2) or "
                           "(t, energy)");
    }

    // Starting values: task overrides, else heuristics from the data.
    std::map<std::string, double> init;
    if (problem.model != FitModel::decay) {
        if (problem.model == FitModel::field_map) {
            init["gamma"] = constants::yig_gamma;
            init["omega_m0"] = 0.0;
        }
        try {
            auto guess = init_guess(problem.x, problem.y);
            init.insert(guess.begin(), guess.end());
        } catch (const domain_error&) {
            // fall through; explicit task inits may still cover everything
        }
        if (problem.model == FitModel::field_map)
            init.erase("omega_m");
        // g is fitted in log space and must start strictly positive
        if (init.contains("g") && init.contains("kappa_a") &&
            !(init.at("g") > 0.0))
            init["g"] = 0.01 * init.at("kappa_a");
    } else {
        init["amplitude"] = *std::max_element(problem.y.begin(),
                                              problem.y.end());
        init["kappa"] = 1.0 / (problem.x.back() - problem.x.front() + 1e-300);
    }

    const auto dim_of = [](const std::string& name) {
        if (name == "amplitude")
            return Dimension::plain;
        if (name == "gamma")
            return Dimension::gyromagnetic;
        return Dimension::frequency;
    };
    const std::vector<std::string> all_names =
        problem.model == FitModel::spectrum
            ? std::vector<std::string>{"g", "kappa_a", "kappa_a1", "kappa_m",
                                       "omega_a", "omega_m"}
        : problem.model == FitModel::field_map
            ? std::vector<std::string>{"g", "gamma", "kappa_a", "kappa_a1",
                                       "kappa_m", "omega_a", "omega_m0"}
            : std::vector<std::string>{"amplitude", "kappa"};

    for (const auto& name : all_names)
        if (cfg.has("task", "init_" + name))
            init[name] = cfg.quantity("task", "init_" + name, dim_of(name));

    // Free-parameter set: task 'free' list, else every model parameter.
    std::vector<std::string> free_names = all_names;
    if (cfg.has("task", "free")) {
        free_names.clear();
        std::istringstream in(cfg.raw("task", "free"));
        std::string name;
        while (in >> name)
            free_names.push_back(name);
    }

    const double span =
        problem.x.empty() ? 1.0 : problem.x.back() - problem.x.front();
    for (const auto& name : free_names) {
        if (!init.contains(name))
            throw config_error("fit: no starting value for '" + name +
                               "' (set [task] init_" + name + ")");
        ParamBounds bounds;
        if (cfg.has("task", "bound_" + name)) {
            std::istringstream in(cfg.raw("task", "bound_" + name));
            double lov, hiv;
            std::string unit;
            if (!(in >> lov >> hiv))
                throw config_error("[task] bound_" + name +
                                   ": expected 'lo hi [unit]'");
            in >> unit;
            const double f = unit_factor(unit, dim_of(name));
            bounds = {lov * f, hiv * f};
        } else if (name == "omega_a" || name == "omega_m") {
            bounds = {init[name] - std::abs(span), init[name] + std::abs(span)};
        } else if (name == "omega_m0") {
            bounds = {-constants::two_pi * 50e9, constants::two_pi * 50e9};
        } else {
            const double v = std::max(init[name], 1e-300);
            bounds = {v / 1e4, v * 1e4};
        }
        problem.free_params[name] = bounds;
    }
    for (const auto& name : all_names)
        if (!problem.free_params.contains(name)) {
            if (!init.contains(name))
                throw config_error("fit: no value for fixed parameter '" +
                                   name + "'");
            problem.fixed_params[name] = init[name];
        }

    const FitResult result = fit(problem, init);

    auto& os = out.stream();
    os << "# fit report\n";
    os << strfmt("model = %s\n",
                 problem.model == FitModel::spectrum    ? "spectrum"
                 : problem.model == FitModel::field_map ? "field_map"
                                                        : "decay");
    os << strfmt("converged = %s\n", result.converged ? "true" : "false");
    os << strfmt("iterations = %d\n", result.iterations);
    os << strfmt("residual_norm = %.6g\n", result.residual_norm);
    if (result.singular_jacobian)
        os << "warning = singular Jacobian, damped fallback used\n";
    for (const auto& [name, value] : result.params) {
        const Dimension d = dim_of(name);
        const double scale =
            d == Dimension::frequency ? 1.0 / (constants::two_pi * 1e6)
            : d == Dimension::gyromagnetic ? 1.0 / (constants::two_pi * 1e9)
                                           : 1.0;
        const std::string unit = d == Dimension::frequency      ? " MHz"
                                 : d == Dimension::gyromagnetic ? " GHz/T"
                                                                : "";
        const auto se = result.param_stderr.find(name);
        if (se != result.param_stderr.end())
            os << strfmt("%s = %.10g +- %.3g%s\n", name.c_str(),
                         value * scale, se->second * scale, unit.c_str());
        else
            os << strfmt("%s = %.10g%s\n", name.c_str(), value * scale,
                         unit.c_str());
    }
    if (result.params.contains("g") && result.params.contains("kappa_a") &&
        result.params.contains("kappa_m")) {
        const auto derived = derived_quantities(result);
        os << strfmt("cooperativity = %.6g\n", derived.cooperativity);
        os << strfmt("purcell_factor = %.6g\n", derived.purcell_factor);
        os << strfmt("splitting = %.6g MHz\n", mhz(derived.splitting));
        os << strfmt("rabi_period = %.6g ns\n",
                     derived.rabi_period * 1e9);
        // regime label from the fitted rates
        const double g = result.params.at("g");
        const double ka = result.params.at("kappa_a");
        const double km = result.params.at("kappa_m");
        const char* label = (g >= ka && g >= km) ? "strong"
                            : (g >= km)          ? "MIT"
                            : (g >= ka)          ? "Purcell"
                                                 : "weak";
        os << strfmt("regime = %s\n", label);
    }
    if (verbose)
        os << strfmt("# data points: %zu\n", problem.x.size());
    return result.converged ? 0 : 3;
}

int cmd_classify(const ExperimentConfig& cfg, Output& out, bool verbose) {
    const CoupledSystem sys = cfg.build_system();
    const double usc_threshold =
        cfg.quantity_or("task", "usc_threshold", Dimension::plain, 0.05);
    print_regime(out.stream(), classify(sys, usc_threshold), verbose);
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"coupled magnon / microwave-photon toolkit"};
    app.require_subcommand(1);

    std::string config_path, out_path, data_path;
    bool verbose = false;
    app.add_option("--config", config_path, "experiment config file")
        ->required();
    app.add_option("--out", out_path, "output file (default stdout)");
    app.add_flag("--verbose", verbose, "verbose reports");

    auto* design = app.add_subcommand("design", "forward design from geometry");
    auto* spectrum_cmd = app.add_subcommand("spectrum", "reflection spectrum");
    auto* map_cmd = app.add_subcommand("map", "bias-field spectrum map");
    auto* rabi = app.add_subcommand("rabi", "time-domain trace");
    auto* ringdown = app.add_subcommand("ringdown", "ringdown vs bias field");
    auto* fit_cmd = app.add_subcommand("fit", "parameter extraction");
    fit_cmd->add_option("--data", data_path, "columnar data file")->required();
    auto* classify_cmd = app.add_subcommand("classify", "regime report");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : 1;
    }

    try {
        const ExperimentConfig cfg = ExperimentConfig::load(config_path);
        Output out{out_path, {}};
        if (design->parsed())
            return cmd_design(cfg, out, verbose);
        if (spectrum_cmd->parsed())
            return cmd_spectrum(cfg, out);
        if (map_cmd->parsed())
            return cmd_map(cfg, out);
        if (rabi->parsed())
            return cmd_rabi(cfg, out);
        if (ringdown->parsed())
            return cmd_ringdown(cfg, out);
        if (fit_cmd->parsed())
            return cmd_fit(cfg, data_path, out, verbose);
        if (classify_cmd->parsed())
            return cmd_classify(cfg, out, verbose);
        return 1;
    } catch (const cmag::config_error& e) {
        std::cerr << "config/data error: " << e.what() << '\n';
        return 2;
    } catch (const cmag::domain_error& e) {
        std::cerr << "domain error: " << e.what() << '\n';
        return 4;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << '\n';
        return 4;
    }
}
