#include "cmag/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

namespace cmag {

namespace {

std::string trim(const std::string& s) {
    auto begin = s.find_first_not_of(" \t\r");
    auto end = s.find_last_not_of(" \t\r");
    if (begin == std::string::npos)
        return {};
    return s.substr(begin, end - begin + 1);
}

double unit_scale_impl(const std::string& unit, Dimension dim) {
    using enum Dimension;
    static const std::map<Dimension, std::map<std::string, double>> table{
        {frequency,
         {{"Hz", constants::two_pi},
          {"kHz", constants::two_pi * 1e3},
          {"MHz", constants::two_pi * 1e6},
          {"GHz", constants::two_pi * 1e9}}},
        {field, {{"T", 1.0}, {"mT", 1e-3}, {"uT", 1e-6}}},
        {length, {{"m", 1.0}, {"mm", 1e-3}, {"um", 1e-6}}},
        {time, {{"s", 1.0}, {"ms", 1e-3}, {"us", 1e-6}, {"ns", 1e-9}}},
        {volume, {{"m^3", 1.0}, {"mm^3", 1e-9}}},
        {density, {{"m^-3", 1.0}}},
        {gyromagnetic,
         {{"Hz/T", constants::two_pi},
          {"MHz/T", constants::two_pi * 1e6},
          {"GHz/T", constants::two_pi * 1e9}}},
    };
    if (dim == plain) {
        if (!unit.empty())
            throw config_error("unexpected unit '" + unit +
                               "' on a dimensionless value");
        return 1.0;
    }
    const auto& units = table.at(dim);
    const auto it = units.find(unit);
    if (it == units.end()) {
        std::string allowed;
        for (const auto& [u, _] : units)
            allowed += (allowed.empty() ? "" : ", ") + u;
        throw config_error("unit '" + unit + "' invalid here (expected one of " +
                           allowed + ")");
    }
    return it->second;
}

// Known keys per section; anything else is rejected.
const std::map<std::string, std::set<std::string>>& known_keys() {
    static const std::map<std::string, std::set<std::string>> keys{
        {"system",
         {"omega_a", "kappa_a", "kappa_a1", "dims", "mode_volume", "omega_m0",
          "gamma", "kappa_m", "radius", "spin_density", "spin", "g_source",
          "g", "sphere_x", "eta", "bias_field"}},
        {"sweep",
         {"freq_start", "freq_stop", "freq_points", "b_start", "b_stop",
          "b_points", "t_max", "dt", "pulse_carrier", "pulse_amplitude",
          "pulse_on", "pulse_off", "pulse_shape", "pulse_edge",
          "sweep_diameter_start", "sweep_diameter_stop",
          "sweep_diameter_points"}},
        {"task",
         {"usc_threshold", "free", "init_g", "init_kappa_a", "init_kappa_a1",
          "init_kappa_m", "init_omega_a", "init_omega_m", "init_gamma",
          "init_omega_m0", "init_amplitude", "init_kappa", "bound_g",
          "bound_kappa_a", "bound_kappa_a1", "bound_kappa_m", "bound_omega_a",
          "bound_omega_m", "bound_gamma", "bound_omega_m0", "bound_amplitude",
          "bound_kappa"}},
        {"output", {"decimation", "precision"}},
    };
    return keys;
}

} // namespace

double unit_factor(const std::string& unit, Dimension dim) {
    return unit_scale_impl(unit, dim);
}

double parse_quantity(const std::string& text, Dimension dim) {
    std::istringstream in(trim(text));
    double value = 0.0;
    if (!(in >> value))
        throw config_error("cannot parse number from '" + text + "'");
    std::string unit;
    in >> unit;
    std::string extra;
    if (in >> extra)
        throw config_error("trailing tokens in quantity '" + text + "'");
    return value * unit_factor(unit, dim);
}

ExperimentConfig ExperimentConfig::parse(const std::string& text,
                                         const std::string& origin) {
    ExperimentConfig cfg;
    std::istringstream in(text);
    std::string line, section;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        const auto hash = line.find('#');
        if (hash != std::string::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const std::string where =
            origin + ":" + std::to_string(lineno) + ": ";
        if (line.front() == '[') {
            if (line.back() != ']')
                throw config_error(where + "malformed section header");
            section = trim(line.substr(1, line.size() - 2));
            if (!known_keys().contains(section))
                throw config_error(where + "unknown section [" + section + "]");
            cfg.sections[section];
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos)
            throw config_error(where + "expected key = value");
        if (section.empty())
            throw config_error(where + "key outside any [section]");
        const std::string key = trim(line.substr(0, eq));
        const std::string value = trim(line.substr(eq + 1));
        if (!known_keys().at(section).contains(key))
            throw config_error(where + "unknown key '" + key + "' in [" +
                               section + "]");
        if (cfg.sections[section].contains(key))
            throw config_error(where + "duplicate key '" + key + "'");
        cfg.sections[section][key] = value;
    }
    return cfg;
}

ExperimentConfig ExperimentConfig::load(const std::string& path) {
    std::ifstream file(path);
    if (!file)
        throw config_error("cannot open config file '" + path + "'");
    std::stringstream buffer;
    buffer << file.rdbuf();
    return parse(buffer.str(), path);
}

bool ExperimentConfig::has(const std::string& section,
                           const std::string& key) const {
    const auto s = sections.find(section);
    return s != sections.end() && s->second.contains(key);
}

const std::string& ExperimentConfig::raw(const std::string& section,
                                         const std::string& key) const {
    const auto s = sections.find(section);
    if (s == sections.end() || !s->second.contains(key))
        throw config_error("missing required key '" + key + "' in [" +
                           section + "]");
    return s->second.at(key);
}

double ExperimentConfig::quantity(const std::string& section,
                                  const std::string& key,
                                  Dimension dim) const {
    try {
        return parse_quantity(raw(section, key), dim);
    } catch (const config_error& e) {
        throw config_error("[" + section + "] " + key + ": " + e.what());
    }
}

double ExperimentConfig::quantity_or(const std::string& section,
                                     const std::string& key, Dimension dim,
                                     double fallback) const {
    return has(section, key) ? quantity(section, key, dim) : fallback;
}

std::string ExperimentConfig::text_or(const std::string& section,
                                      const std::string& key,
                                      const std::string& fallback) const {
    return has(section, key) ? raw(section, key) : fallback;
}

CoupledSystem ExperimentConfig::build_system() const {
    CoupledSystem sys;
    sys.cavity.omega_a = quantity("system", "omega_a", Dimension::frequency);
    sys.cavity.kappa_a = quantity("system", "kappa_a", Dimension::frequency);
    sys.cavity.kappa_a1 = quantity_or("system", "kappa_a1",
                                      Dimension::frequency,
                                      0.5 * sys.cavity.kappa_a);
    if (has("system", "dims")) {
        std::istringstream in(raw("system", "dims"));
        double lx, ly, lz;
        std::string unit;
        if (!(in >> lx >> ly >> lz >> unit))
            throw config_error("[system] dims: expected 'Lx Ly Lz unit'");
        const double scale = unit_factor(unit, Dimension::length);
        sys.cavity.dims = {lx * scale, ly * scale, lz * scale};
    }
    sys.cavity.mode_volume = quantity_or(
        "system", "mode_volume", Dimension::volume,
        sys.cavity.dims[0] * sys.cavity.dims[1] * sys.cavity.dims[2]);

    sys.magnon.omega_m0 =
        quantity_or("system", "omega_m0", Dimension::frequency, 0.0);
    sys.magnon.gamma = quantity_or("system", "gamma", Dimension::gyromagnetic,
                                   constants::yig_gamma);
    sys.magnon.kappa_m = quantity("system", "kappa_m", Dimension::frequency);
    sys.magnon.radius = quantity("system", "radius", Dimension::length);
    sys.magnon.spin_density = quantity_or(
        "system", "spin_density", Dimension::density, constants::yig_spin_density);
    sys.magnon.spin =
        quantity_or("system", "spin", Dimension::plain, constants::yig_spin);

    sys.bias_field = quantity_or("system", "bias_field", Dimension::field, 0.0);

    const std::string source = text_or("system", "g_source", "direct");
    if (source == "direct") {
        if (has("system", "eta") || has("system", "sphere_x"))
            throw config_error("[system] g_source = direct conflicts with "
                               "eta / sphere_x");
        sys.g = quantity("system", "g", Dimension::frequency);
    } else if (source == "geometry") {
        if (has("system", "g"))
            throw config_error(
                "[system] g_source = geometry conflicts with a direct g");
        double eta;
        if (has("system", "eta"))
            eta = quantity("system", "eta", Dimension::plain);
        else
            eta = overlap_eta(
                {quantity_or("system", "sphere_x", Dimension::length, 0.0)},
                sys.cavity);
        sys.g = coupling_strength(sys.cavity, sys.magnon, eta);
    } else {
        throw config_error("[system] g_source must be direct or geometry");
    }
    sys.validate();
    return sys;
}

FrequencyGrid ExperimentConfig::build_grid() const {
    FrequencyGrid grid;
    grid.start = quantity("sweep", "freq_start", Dimension::frequency);
    grid.stop = quantity("sweep", "freq_stop", Dimension::frequency);
    grid.points = static_cast<std::size_t>(
        quantity_or("sweep", "freq_points", Dimension::plain, 2001));
    grid.validate();
    return grid;
}

std::vector<double> ExperimentConfig::build_b_range() const {
    const double start = quantity("sweep", "b_start", Dimension::field);
    const double stop = quantity("sweep", "b_stop", Dimension::field);
    const auto points = static_cast<std::size_t>(
        quantity_or("sweep", "b_points", Dimension::plain, 101));
    if (!(stop > start) || points < 2)
        throw config_error("[sweep] invalid B range");
    std::vector<double> b(points);
    for (std::size_t i = 0; i < points; ++i)
        b[i] = start + (stop - start) * double(i) / double(points - 1);
    return b;
}

DrivePulse ExperimentConfig::build_pulse(double omega_a) const {
    DrivePulse pulse;
    pulse.carrier =
        quantity_or("sweep", "pulse_carrier", Dimension::frequency, omega_a);
    const std::string shape = text_or("sweep", "pulse_shape", "impulse");
    if (shape == "impulse") {
        pulse.impulse = true;
        return pulse;
    }
    if (shape == "rectangular")
        pulse.shape = PulseShape::rectangular;
    else if (shape == "raised-cosine")
        pulse.shape = PulseShape::raised_cosine;
    else
        throw config_error("[sweep] pulse_shape must be impulse, rectangular "
                           "or raised-cosine");
    pulse.amplitude =
        quantity_or("sweep", "pulse_amplitude", Dimension::plain, 1.0);
    pulse.t_on = quantity_or("sweep", "pulse_on", Dimension::time, 0.0);
    pulse.t_off = quantity("sweep", "pulse_off", Dimension::time);
    pulse.edge_time = quantity_or("sweep", "pulse_edge", Dimension::time, 1e-9);
    pulse.validate();
    return pulse;
}

double ExperimentConfig::time_max() const {
    return quantity("sweep", "t_max", Dimension::time);
}

double ExperimentConfig::time_step() const {
    return quantity("sweep", "dt", Dimension::time);
}

std::size_t ExperimentConfig::decimation() const {
    const double d = quantity_or("output", "decimation", Dimension::plain, 1.0);
    if (!(d >= 1.0))
        throw config_error("[output] decimation must be >= 1");
    return static_cast<std::size_t>(d);
}

} // namespace cmag
