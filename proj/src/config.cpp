#include "sdc/config.hpp"

#include <cerrno>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "sdc/errors.hpp"

namespace sdc {

namespace {

namespace pt = boost::property_tree;

const std::map<std::string, std::set<std::string>> kSchema{
    {"physical",
     {"mass_amu", "wavenumber_per_m", "recoil_frequency_rad_s", "coupling_rad_s", "detuning_rad_s",
      "aux_coupling_rad_s", "rabi_frequency_rad_s", "laser_phase_rad", "photon_number", "finesse",
      "lattice_wavelength_m"}},
    {"protocol", {"phase_mode", "encode_phase_rad", "decoder", "postselect_policy", "seed"}},
    {"numerics", {"n_max", "l_range"}},
    {"output", {"format", "path", "verbosity"}},
};

std::string key_name(const std::string &section, const std::string &key)
{
    return section + "." + key;
}

double to_double(const std::string &where, const std::string &text)
{
    const char *begin = text.c_str();
    char *end = nullptr;
    errno = 0;
    const double value = std::strtod(begin, &end);
    if (end == begin || *end != '\0' || errno == ERANGE || !std::isfinite(value)) {
        throw ConfigError(where + ": expected a finite number, got '" + text + "'");
    }
    return value;
}

long long to_integer(const std::string &where, const std::string &text)
{
    const char *begin = text.c_str();
    char *end = nullptr;
    errno = 0;
    const long long value = std::strtoll(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        throw ConfigError(where + ": expected an integer, got '" + text + "'");
    }
    return value;
}

std::uint64_t to_unsigned(const std::string &where, const std::string &text)
{
    if (!text.empty() && text.front() == '-') {
        throw ConfigError(where + ": expected a non-negative integer, got '" + text + "'");
    }
    const char *begin = text.c_str();
    char *end = nullptr;
    errno = 0;
    const unsigned long long value = std::strtoull(begin, &end, 10);
    if (end == begin || *end != '\0' || errno == ERANGE) {
        throw ConfigError(where + ": expected a non-negative integer, got '" + text + "'");
    }
    return value;
}

std::string fmt_double(double v)
{
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

void require_positive(const char *name, double value)
{
    if (!(value > 0.0)) {
        throw ConfigError(std::string(name) + " must be positive, got " + fmt_double(value));
    }
}

} // namespace

PhaseMode parse_phase_mode(std::string_view text)
{
    if (text == "full") {
        return PhaseMode::Full;
    }
    if (text == "paper") {
        return PhaseMode::Paper;
    }
    throw ConfigError("phase_mode must be 'full' or 'paper', got '" + std::string(text) + "'");
}

DecoderKind parse_decoder(std::string_view text)
{
    if (text == "oracle") {
        return DecoderKind::Oracle;
    }
    if (text == "paper-literal") {
        return DecoderKind::PaperLiteral;
    }
    throw ConfigError("decoder must be 'oracle' or 'paper-literal', got '" + std::string(text) + "'");
}

PostselectPolicy parse_policy(std::string_view text)
{
    if (text == to_string(PostselectPolicy::AliceGroundBobExcited)) {
        return PostselectPolicy::AliceGroundBobExcited;
    }
    if (text == to_string(PostselectPolicy::AllOutcomesCorrected)) {
        return PostselectPolicy::AllOutcomesCorrected;
    }
    throw ConfigError("postselect_policy must be 'g_A-e_B-only' or 'all-outcomes-corrected', got '" +
                      std::string(text) + "'");
}

PhysicalParams RunConfig::physical() const
{
    PhysicalParams p;
    p.mass_kg = mass_amu * units::amu;
    p.wavenumber = wavenumber ? *wavenumber : PhysicalParams::wavenumber_from_recoil(p.mass_kg, *recoil_frequency);
    p.coupling = coupling;
    p.detuning = detuning;
    p.photon_number = photon_number;
    p.aux_coupling = aux_coupling;
    p.rabi_frequency = rabi_frequency;
    p.laser_phase = laser_phase;
    return p;
}

BraggConfig RunConfig::bragg() const
{
    BraggConfig b;
    b.n_max = n_max;
    b.l_min = l_min;
    b.l_max = l_max;
    return b;
}

SdcConfig RunConfig::sdc() const
{
    SdcConfig c;
    c.params = physical();
    c.bragg = bragg();
    c.phase_mode = phase_mode;
    c.encode_phase = encode_phase;
    c.decoder = decoder;
    c.policy = policy;
    c.seed = seed;
    c.keep_snapshots = verbosity > 0;
    return c;
}

void RunConfig::validate() const
{
    if (wavenumber.has_value() == recoil_frequency.has_value()) {
        throw ConfigError("give exactly one of physical.wavenumber_per_m and physical.recoil_frequency_rad_s");
    }
    require_positive("physical.mass_amu", mass_amu);
    if (wavenumber) {
        require_positive("physical.wavenumber_per_m", *wavenumber);
    } else {
        require_positive("physical.recoil_frequency_rad_s", *recoil_frequency);
    }
    require_positive("physical.coupling_rad_s", coupling);
    if (detuning == 0.0) {
        throw ConfigError("physical.detuning_rad_s must be nonzero: the Bragg optics run off-resonance");
    }
    require_positive("physical.detuning_rad_s", detuning);
    require_positive("physical.aux_coupling_rad_s", aux_coupling);
    require_positive("physical.rabi_frequency_rad_s", rabi_frequency);
    if (!std::isfinite(laser_phase)) {
        throw ConfigError("physical.laser_phase_rad must be finite");
    }
    if (photon_number < 1) {
        throw ConfigError("physical.photon_number must be at least 1");
    }
    if (finesse) {
        require_positive("physical.finesse", *finesse);
    }
    if (lattice_wavelength) {
        require_positive("physical.lattice_wavelength_m", *lattice_wavelength);
    }
    if (format != "json" && format != "csv") {
        throw ConfigError("output.format must be 'json' or 'csv', got '" + format + "'");
    }
    if (verbosity < 0) {
        throw ConfigError("output.verbosity must be non-negative");
    }
    try {
        sdc().validate();
    } catch (const Error &e) {
        throw ConfigError(e.what());
    }
}

RunConfig RunConfig::rb85()
{
    RunConfig c;
    c.mass_amu = 85.0;
    c.recoil_frequency = 2.4e4;
    c.coupling = units::two_pi * 16.4e6;
    c.detuning = units::two_pi * 1e9;
    c.aux_coupling = c.coupling;
    c.rabi_frequency = units::two_pi * 1e6;
    c.finesse = 4.4e4;
    c.lattice_wavelength = 780e-9;
    return c;
}

DerivedQuantities derive(const RunConfig &config)
{
    const PhysicalParams p = config.physical();
    return {p.recoil_frequency(), p.wavenumber, p.bragg_rabi(), p.beta(), p.detuning / p.recoil_frequency()};
}

RunConfig parse_config(std::string_view text)
{
    pt::ptree tree;
    try {
        std::istringstream in{std::string(text)};
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error &e) {
        throw ConfigError("malformed config: " + std::string(e.what()));
    }

    std::map<std::string, std::string> values;
    for (const auto &[section, body] : tree) {
        const auto schema = kSchema.find(section);
        if (schema == kSchema.end()) {
            throw ConfigError("unknown section '" + section + "'");
        }
        for (const auto &[key, node] : body) {
            if (!schema->second.contains(key)) {
                throw ConfigError("unknown key '" + key_name(section, key) + "'");
            }
            values[key_name(section, key)] = node.get_value<std::string>();
        }
    }

    auto take = [&](const char *name) -> std::optional<std::string> {
        const auto it = values.find(name);
        if (it == values.end()) {
            return std::nullopt;
        }
        return it->second;
    };
    auto required = [&](const char *name) {
        auto v = take(name);
        if (!v) {
            throw ConfigError(std::string("missing required key '") + name + "'");
        }
        return *v;
    };
    auto number = [&](const char *name) { return to_double(name, required(name)); };
    auto optional_number = [&](const char *name) -> std::optional<double> {
        auto v = take(name);
        return v ? std::optional(to_double(name, *v)) : std::nullopt;
    };

    RunConfig c;
    c.mass_amu = number("physical.mass_amu");
    c.wavenumber = optional_number("physical.wavenumber_per_m");
    c.recoil_frequency = optional_number("physical.recoil_frequency_rad_s");
    c.coupling = number("physical.coupling_rad_s");
    c.detuning = number("physical.detuning_rad_s");
    c.aux_coupling = optional_number("physical.aux_coupling_rad_s").value_or(c.coupling);
    c.rabi_frequency = optional_number("physical.rabi_frequency_rad_s").value_or(units::two_pi * 1e6);
    c.laser_phase = optional_number("physical.laser_phase_rad").value_or(-std::numbers::pi / 2.0);
    if (auto v = take("physical.photon_number")) {
        c.photon_number = static_cast<int>(to_integer("physical.photon_number", *v));
    }
    c.finesse = optional_number("physical.finesse");
    c.lattice_wavelength = optional_number("physical.lattice_wavelength_m");

    if (auto v = take("protocol.phase_mode")) {
        c.phase_mode = parse_phase_mode(*v);
    }
    c.encode_phase = optional_number("protocol.encode_phase_rad").value_or(std::numbers::pi);
    if (auto v = take("protocol.decoder")) {
        c.decoder = parse_decoder(*v);
    }
    if (auto v = take("protocol.postselect_policy")) {
        c.policy = parse_policy(*v);
    }
    if (auto v = take("protocol.seed")) {
        c.seed = to_unsigned("protocol.seed", *v);
    }

    if (auto v = take("numerics.n_max")) {
        c.n_max = static_cast<int>(to_integer("numerics.n_max", *v));
    }
    if (auto v = take("numerics.l_range")) {
        const auto colon = v->find(':');
        if (colon == std::string::npos) {
            throw ConfigError("numerics.l_range must look like 'l_min:l_max', got '" + *v + "'");
        }
        c.l_min = static_cast<int>(to_integer("numerics.l_range", v->substr(0, colon)));
        c.l_max = static_cast<int>(to_integer("numerics.l_range", v->substr(colon + 1)));
    }

    if (auto v = take("output.format")) {
        c.format = *v;
    }
    if (auto v = take("output.path")) {
        c.path = *v;
    }
    if (auto v = take("output.verbosity")) {
        c.verbosity = static_cast<int>(to_integer("output.verbosity", *v));
    }

    c.validate();
    return c;
}

RunConfig load_config(const std::filesystem::path &path)
{
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path.string() + "'");
    }
    std::ostringstream text;
    text << in.rdbuf();
    return parse_config(text.str());
}

std::string emit_config(const RunConfig &c)
{
    std::ostringstream out;
    out << "[physical]\n";
    out << "mass_amu = " << fmt_double(c.mass_amu) << "\n";
    if (c.wavenumber) {
        out << "wavenumber_per_m = " << fmt_double(*c.wavenumber) << "\n";
    }
    if (c.recoil_frequency) {
        out << "recoil_frequency_rad_s = " << fmt_double(*c.recoil_frequency) << "\n";
    }
    out << "coupling_rad_s = " << fmt_double(c.coupling) << "\n";
    out << "detuning_rad_s = " << fmt_double(c.detuning) << "\n";
    out << "aux_coupling_rad_s = " << fmt_double(c.aux_coupling) << "\n";
    out << "rabi_frequency_rad_s = " << fmt_double(c.rabi_frequency) << "\n";
    out << "laser_phase_rad = " << fmt_double(c.laser_phase) << "\n";
    out << "photon_number = " << c.photon_number << "\n";
    if (c.finesse) {
        out << "finesse = " << fmt_double(*c.finesse) << "\n";
    }
    if (c.lattice_wavelength) {
        out << "lattice_wavelength_m = " << fmt_double(*c.lattice_wavelength) << "\n";
    }
    out << "\n[protocol]\n";
    out << "phase_mode = " << to_string(c.phase_mode) << "\n";
    out << "encode_phase_rad = " << fmt_double(c.encode_phase) << "\n";
    out << "decoder = " << to_string(c.decoder) << "\n";
    out << "postselect_policy = " << to_string(c.policy) << "\n";
    out << "seed = " << c.seed << "\n";
    out << "\n[numerics]\n";
    out << "n_max = " << c.n_max << "\n";
    out << "l_range = " << c.l_min << ":" << c.l_max << "\n";
    out << "\n[output]\n";
    out << "format = " << c.format << "\n";
    out << "path = " << c.path << "\n";
    out << "verbosity = " << c.verbosity << "\n";
    return out.str();
}

} // namespace sdc
