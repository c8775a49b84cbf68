#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "sdc/protocol.hpp"

namespace sdc {

// Environment variable naming the config file used when --config is absent.
inline constexpr const char *kConfigEnvVar = "SDC_CONFIG";

/**
 * Everything a bench run reads from its config document.
 *
 * The document is INI-style with four sections: [physical], [protocol],
 * [numerics] and [output]. See docs/config.md for the key list.
 */
struct RunConfig
{
    // [physical]
    double mass_amu = 85.0;
    std::optional<double> wavenumber;            // 1/m
    std::optional<double> recoil_frequency;      // rad/s
    double coupling = 0.0;                       // rad/s
    double detuning = 0.0;                       // rad/s
    double aux_coupling = 0.0;                   // rad/s
    double rabi_frequency = 0.0;                 // rad/s
    double laser_phase = -std::numbers::pi / 2.0;
    int photon_number = 1;
    std::optional<double> finesse;
    std::optional<double> lattice_wavelength;    // m

    // [protocol]
    PhaseMode phase_mode = PhaseMode::Full;
    double encode_phase = std::numbers::pi;
    DecoderKind decoder = DecoderKind::Oracle;
    PostselectPolicy policy = PostselectPolicy::AliceGroundBobExcited;
    std::uint64_t seed = 0;

    // [numerics]
    int n_max = 3;
    int l_min = -3;
    int l_max = 1;

    // [output]
    std::string format = "json";
    std::string path;
    int verbosity = 0;

    PhysicalParams physical() const;
    BraggConfig bragg() const;
    SdcConfig sdc() const;
    void validate() const;

    // Rb-85 figures: recoil 2.4e4 rad/s, mu = 2 pi 16.4 MHz, Delta = 2 pi 1 GHz, finesse 4.4e4.
    static RunConfig rb85();

    bool operator==(const RunConfig &) const = default;
};

struct DerivedQuantities
{
    double recoil_frequency;
    double wavenumber;
    double bragg_rabi;
    double beta;
    double detuning_over_recoil;
};

DerivedQuantities derive(const RunConfig &config);

RunConfig parse_config(std::string_view text);
RunConfig load_config(const std::filesystem::path &path);

// Serializes every field so that parse_config(emit_config(c)) == c.
std::string emit_config(const RunConfig &config);

PhaseMode parse_phase_mode(std::string_view text);
DecoderKind parse_decoder(std::string_view text);
PostselectPolicy parse_policy(std::string_view text);

} // namespace sdc
