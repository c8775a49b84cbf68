#include "sdc/report.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <sstream>

namespace sdc {

namespace {

constexpr double kZeroFloor = 1e-12;

double clean(double x)
{
    return std::abs(x) < kZeroFloor ? 0.0 : x;
}

Json distribution_to_json(const std::map<std::string, double> &distribution)
{
    Json out = Json::object();
    for (const auto &[bits, p] : distribution) {
        out[bits] = round_probability(p);
    }
    return out;
}

Json envelope(const char *command)
{
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = command;
    return doc;
}

} // namespace

double round_probability(double p)
{
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", clean(p));
    return std::strtod(buf, nullptr);
}

Json complex_to_json(cplx z)
{
    return {{"re", clean(z.real())}, {"im", clean(z.imag())}};
}

Json state_to_json(const CompositeState &state)
{
    Json subsystems = Json::array();
    for (const auto &s : state.subsystems()) {
        subsystems.push_back({{"name", s.name}, {"kind", std::string(to_string(s.kind))}, {"labels", s.labels}});
    }
    Json amplitudes = Json::array();
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        const cplx a = state.amplitudes()(static_cast<Eigen::Index>(k));
        Json entry = {{"labels", state.basis_labels(k)}};
        entry.update(complex_to_json(a));
        amplitudes.push_back(std::move(entry));
    }
    return {{"subsystems", std::move(subsystems)}, {"amplitudes", std::move(amplitudes)}};
}

Json config_to_json(const RunConfig &c)
{
    Json physical;
    physical["mass_amu"] = c.mass_amu;
    physical["wavenumber_per_m"] = c.wavenumber ? Json(*c.wavenumber) : Json(nullptr);
    physical["recoil_frequency_rad_s"] = c.recoil_frequency ? Json(*c.recoil_frequency) : Json(nullptr);
    physical["coupling_rad_s"] = c.coupling;
    physical["detuning_rad_s"] = c.detuning;
    physical["aux_coupling_rad_s"] = c.aux_coupling;
    physical["rabi_frequency_rad_s"] = c.rabi_frequency;
    physical["laser_phase_rad"] = c.laser_phase;
    physical["photon_number"] = c.photon_number;
    physical["finesse"] = c.finesse ? Json(*c.finesse) : Json(nullptr);
    physical["lattice_wavelength_m"] = c.lattice_wavelength ? Json(*c.lattice_wavelength) : Json(nullptr);

    const DerivedQuantities d = derive(c);
    Json derived;
    derived["recoil_frequency_rad_s"] = d.recoil_frequency;
    derived["wavenumber_per_m"] = d.wavenumber;
    derived["bragg_rabi_rad_s"] = d.bragg_rabi;
    derived["beta_rad_s"] = d.beta;
    derived["detuning_over_recoil"] = d.detuning_over_recoil;

    Json protocol;
    protocol["phase_mode"] = to_string(c.phase_mode);
    protocol["encode_phase_rad"] = c.encode_phase;
    protocol["decoder"] = to_string(c.decoder);
    protocol["postselect_policy"] = to_string(c.policy);
    protocol["seed"] = c.seed;

    Json numerics;
    numerics["n_max"] = c.n_max;
    numerics["l_range"] = {c.l_min, c.l_max};

    return {{"physical", std::move(physical)},
            {"derived", std::move(derived)},
            {"protocol", std::move(protocol)},
            {"numerics", std::move(numerics)}};
}

Json report_to_json(const SdcReport &r, const RunConfig &config)
{
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    doc["command"] = "run";
    doc["message"] = r.message.str();
    doc["decoded_bits"] = r.decoded ? Json(r.decoded->str()) : Json(nullptr);
    doc["encode_phase"] = r.encode_phase;
    doc["encoded_state_fidelity"] = round_probability(r.encoded_state_fidelity);
    doc["aux_probability"] = round_probability(r.aux_probability);
    doc["blackbox1_outcome"] = r.blackbox1_outcome;
    doc["blackbox1_probability"] = round_probability(r.blackbox1_probability);
    doc["heralded_yield"] = round_probability(r.heralded_yield);
    doc["outcome_basis"] = r.outcome_basis;
    doc["outcome_distribution"] = distribution_to_json(r.outcome_distribution);
    doc["decoder"] = to_string(r.decoder);
    doc["phase_mode"] = to_string(r.phase_mode);
    doc["postselect_policy"] = to_string(r.policy);
    doc["seed"] = r.seed;
    if (!r.snapshots.empty()) {
        Json snapshots = Json::array();
        for (const auto &s : r.snapshots) {
            snapshots.push_back({{"stage", s.stage}, {"state", state_to_json(s.state)}});
        }
        doc["snapshots"] = std::move(snapshots);
    }
    doc["config"] = config_to_json(config);
    return doc;
}

Json confusion_to_json(const ConfusionMatrix &m, const RunConfig &config)
{
    Json doc = envelope("confusion");
    doc["decoder"] = to_string(m.decoder);
    Json labels = Json::array();
    for (const Message msg : kAllMessages) {
        labels.push_back(msg.str());
    }
    doc["labels"] = std::move(labels);
    Json rows = Json::array();
    for (const auto &row : m.probabilities) {
        Json r = Json::array();
        for (double p : row) {
            r.push_back(round_probability(p));
        }
        rows.push_back(std::move(r));
    }
    doc["matrix"] = std::move(rows);
    Json undecided = Json::array();
    Json tied = Json::array();
    for (std::size_t i = 0; i < 4; ++i) {
        undecided.push_back(round_probability(m.undecided[i]));
        tied.push_back(m.tied[i]);
    }
    doc["undecided"] = std::move(undecided);
    doc["tied"] = std::move(tied);
    doc["config"] = config_to_json(config);
    return doc;
}

Json sweep_to_json(const std::vector<SweepPoint> &sweep, const RunConfig &config)
{
    Json doc = envelope("sweep-alpha");
    Json points = Json::array();
    for (const auto &p : sweep) {
        points.push_back({{"alpha", p.alpha}, {"success_probability", round_probability(p.success_probability)}});
    }
    doc["points"] = std::move(points);
    doc["config"] = config_to_json(config);
    return doc;
}

Json verify_to_json(const std::vector<VerifyRow> &rows, const RunConfig &config)
{
    Json doc = envelope("verify");
    Json table = Json::array();
    for (const auto &row : rows) {
        table.push_back({{"detuning_ratio", row.ratio},
                         {"bragg_rabi_rad_s", row.report.alpha},
                         {"points", row.report.times.size()},
                         {"max_population_deviation", round_probability(row.report.max_deviation)},
                         {"max_leakage", round_probability(row.report.max_leakage)}});
    }
    doc["rows"] = std::move(table);
    doc["config"] = config_to_json(config);
    return doc;
}

Json prepare_to_json(const std::string &stage, const CompositeState &state, const RunConfig &config,
                     std::optional<double> heralding_probability)
{
    Json doc = envelope("prepare");
    doc["stage"] = stage;
    doc["heralding_probability"] =
        heralding_probability ? Json(round_probability(*heralding_probability)) : Json(nullptr);
    doc["state"] = state_to_json(state);
    doc["config"] = config_to_json(config);
    return doc;
}

std::string emit_json(const Json &document)
{
    return document.dump(2) + "\n";
}

std::string emit_sweep_csv(const std::vector<SweepPoint> &sweep)
{
    std::ostringstream out;
    out << "alpha,success_probability\n";
    char buf[64];
    for (const auto &p : sweep) {
        std::snprintf(buf, sizeof buf, "%.17g,%.12g\n", p.alpha, round_probability(p.success_probability));
        out << buf;
    }
    return out.str();
}

} // namespace sdc
