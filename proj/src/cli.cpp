#include "sdc/cli.hpp"

#include <cmath>
#include <cstdlib>
#include <fstream>
#include <optional>
#include <ostream>
#include <sstream>

#include "CLI11.hpp"

#include "sdc/config.hpp"
#include "sdc/errors.hpp"
#include "sdc/report.hpp"

namespace sdc {

namespace {

struct Overrides
{
    std::string config_path;
    std::string out_path;
    std::string format;
    std::string phase_mode;
    std::string decoder;
    std::string policy;
    std::optional<double> encode_phase;
    std::optional<std::uint64_t> seed;
    bool verbose = false;
};

double parse_grid_value(const std::string &token)
{
    std::string text = token;
    double scale = 1.0;
    if (text.size() >= 2 && text.compare(text.size() - 2, 2, "pi") == 0) {
        scale = std::numbers::pi;
        text.resize(text.size() - 2);
        if (text.empty() || text == "+") {
            return scale;
        }
        if (text == "-") {
            return -scale;
        }
    }
    char *end = nullptr;
    const double value = std::strtod(text.c_str(), &end);
    if (text.empty() || *end != '\0' || !std::isfinite(value)) {
        throw ConfigError("bad grid value '" + token + "'");
    }
    return value * scale;
}

RunConfig resolve_config(const Overrides &o)
{
    RunConfig config;
    if (!o.config_path.empty()) {
        config = load_config(o.config_path);
    } else if (const char *env = std::getenv(kConfigEnvVar); env != nullptr && *env != '\0') {
        config = load_config(env);
    } else {
        config = RunConfig::rb85();
    }
    if (!o.format.empty()) {
        config.format = o.format;
    }
    if (!o.out_path.empty()) {
        config.path = o.out_path;
    }
    if (!o.phase_mode.empty()) {
        config.phase_mode = parse_phase_mode(o.phase_mode);
    }
    if (!o.decoder.empty()) {
        config.decoder = parse_decoder(o.decoder);
    }
    if (!o.policy.empty()) {
        config.policy = parse_policy(o.policy);
    }
    if (o.encode_phase) {
        config.encode_phase = *o.encode_phase;
    }
    if (o.seed) {
        config.seed = *o.seed;
    }
    if (o.verbose) {
        config.verbosity = std::max(config.verbosity, 1);
    }
    config.validate();
    return config;
}

void deliver(const std::string &text, const RunConfig &config, std::ostream &out)
{
    if (config.path.empty()) {
        out << text;
        return;
    }
    std::ofstream file(config.path, std::ios::binary);
    if (!file) {
        throw ConfigError("cannot write output file '" + config.path + "'");
    }
    file << text;
}

void require_json(const RunConfig &config, const char *command)
{
    if (config.format != "json") {
        throw ConfigError(std::string("csv output is only available for sweep-alpha, not ") + command);
    }
}

void report_error(std::ostream &err, const char *type, const std::string &message,
                  const std::string &stage = {})
{
    Json doc;
    doc["schema_version"] = kSchemaVersion;
    Json error;
    error["type"] = type;
    if (!stage.empty()) {
        error["stage"] = stage;
    }
    error["message"] = message;
    doc["error"] = std::move(error);
    err << emit_json(doc);
}

} // namespace

std::vector<double> parse_grid(const std::string &spec)
{
    std::vector<std::string> parts;
    std::stringstream in(spec);
    for (std::string part; std::getline(in, part, ':');) {
        parts.push_back(part);
    }
    if (parts.size() != 3) {
        throw ConfigError("grid must look like a:b:n, got '" + spec + "'");
    }
    const double a = parse_grid_value(parts[0]);
    const double b = parse_grid_value(parts[1]);
    char *end = nullptr;
    const long n = std::strtol(parts[2].c_str(), &end, 10);
    if (parts[2].empty() || *end != '\0' || n < 1) {
        throw ConfigError("grid point count must be a positive integer, got '" + parts[2] + "'");
    }
    if (n == 1) {
        return {a};
    }
    std::vector<double> grid(static_cast<std::size_t>(n));
    for (long i = 0; i < n; ++i) {
        grid[static_cast<std::size_t>(i)] = a + (b - a) * static_cast<double>(i) / static_cast<double>(n - 1);
    }
    grid.back() = b;
    return grid;
}

int run_command(const std::vector<std::string> &args, std::ostream &out, std::ostream &err)
{
    CLI::App app{"Superdense-coding simulator over Bragg-diffracted hyperentangled atoms", "sdc_bench"};
    app.require_subcommand(1);
    // Global options may also follow the subcommand.
    app.fallthrough();

    Overrides o;
    app.add_option("--config", o.config_path, "INI config file (default: $SDC_CONFIG, then built-in Rb-85)");
    app.add_option("--out", o.out_path, "write the document here instead of stdout");
    app.add_option("--format", o.format, "json or csv")->check(CLI::IsMember({"json", "csv"}));
    app.add_option("--phase-mode", o.phase_mode, "full or paper")->check(CLI::IsMember({"full", "paper"}));
    app.add_option("--decoder", o.decoder, "oracle or paper-literal")
        ->check(CLI::IsMember({"oracle", "paper-literal"}));
    app.add_option("--policy", o.policy, "g_A-e_B-only or all-outcomes-corrected")
        ->check(CLI::IsMember({"g_A-e_B-only", "all-outcomes-corrected"}));
    app.add_option("--encode-phase", o.encode_phase, "encode phase alpha in rad");
    app.add_option("--seed", o.seed, "RNG seed for sampled measurements");
    app.add_flag("--verbose", o.verbose, "include per-stage state snapshots");

    std::string message;
    auto *run = app.add_subcommand("run", "one end-to-end protocol run");
    run->add_option("--message", message, "two bits, e.g. 01")->required();

    auto *confusion = app.add_subcommand("confusion", "4x4 decode probability matrix");

    std::string grid_spec;
    auto *sweep = app.add_subcommand("sweep-alpha", "oracle decode success versus encode phase");
    sweep->add_option("--grid", grid_spec, "a:b:n, values may end in pi")->required();

    std::vector<double> ratios;
    int points = 41;
    auto *verify = app.add_subcommand("verify", "analytic Bragg propagator versus full-Hamiltonian evolution");
    verify->add_option("--detuning-ratios", ratios, "Delta / (mu sqrt n), comma separated")
        ->required()
        ->delimiter(',');
    verify->add_option("--points", points, "time grid points on [0, pi / 2 alpha]")->check(CLI::Range(2, 100000));

    std::string stage;
    auto *prepare = app.add_subcommand("prepare", "dump a prepared state");
    prepare->add_option("--stage", stage, "hypersup or bell")->required()->check(CLI::IsMember({"hypersup", "bell"}));

    auto *show = app.add_subcommand("show-config", "print the resolved config as INI");

    std::vector<const char *> argv;
    argv.reserve(args.size());
    for (const auto &a : args) {
        argv.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(argv.size()), argv.data());
    } catch (const CLI::ParseError &e) {
        return app.exit(e, out, err);
    }

    RunConfig config;
    try {
        config = resolve_config(o);
        if (!sweep->parsed()) {
            require_json(config, app.get_subcommands().front()->get_name().c_str());
        }
    } catch (const Error &e) {
        report_error(err, "config", e.what());
        return kExitConfigError;
    }

    try {
        if (run->parsed()) {
            const SdcReport report = run_sdc(Message::parse(message), config.sdc());
            deliver(emit_json(report_to_json(report, config)), config, out);
        } else if (confusion->parsed()) {
            deliver(emit_json(confusion_to_json(confusion_matrix(config.sdc()), config)), config, out);
        } else if (sweep->parsed()) {
            const auto table = discrimination_sweep(config.sdc(), parse_grid(grid_spec));
            deliver(config.format == "csv" ? emit_sweep_csv(table) : emit_json(sweep_to_json(table, config)), config,
                    out);
        } else if (verify->parsed()) {
            std::vector<VerifyRow> rows;
            for (double ratio : ratios) {
                if (!(ratio > 0.0)) {
                    throw ConfigError("detuning ratios must be positive");
                }
                PhysicalParams p = config.physical();
                p.detuning = ratio * p.coupling * std::sqrt(static_cast<double>(p.photon_number));
                const double t_end = mirror_time(p);
                std::vector<double> grid(static_cast<std::size_t>(points));
                for (int i = 0; i < points; ++i) {
                    grid[static_cast<std::size_t>(i)] = t_end * i / (points - 1);
                }
                rows.push_back({ratio, compare_analytic_numeric(p, config.bragg(), grid)});
            }
            deliver(emit_json(verify_to_json(rows, config)), config, out);
        } else if (prepare->parsed()) {
            const SdcConfig sdc = config.sdc();
            if (stage == "hypersup") {
                deliver(emit_json(prepare_to_json(stage, prepare_hypersuperposition(sdc), config, std::nullopt)),
                        config, out);
            } else {
                const PairPreparation pair = prepare_hyperentangled_pair(sdc);
                deliver(emit_json(prepare_to_json(stage, pair.state, config, pair.aux_probability)), config, out);
            }
        } else if (show->parsed()) {
            deliver(emit_config(config), config, out);
        }
    } catch (const StageError &e) {
        report_error(err, "stage", e.what(), e.stage());
        return kExitRunError;
    } catch (const ConfigError &e) {
        report_error(err, "config", e.what());
        return kExitConfigError;
    } catch (const DecodeError &e) {
        report_error(err, "decode", e.what(), "decode");
        return kExitRunError;
    } catch (const std::exception &e) {
        report_error(err, "runtime", e.what());
        return kExitRunError;
    }
    return 0;
}

} // namespace sdc
