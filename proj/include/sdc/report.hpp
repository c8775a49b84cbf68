#pragma once

#include <string>
#include <vector>

#include "json.hpp"

#include "sdc/config.hpp"
#include "sdc/dynamics.hpp"
#include "sdc/protocol.hpp"

namespace sdc {

using Json = nlohmann::ordered_json;

inline constexpr int kSchemaVersion = 1;

// Rounds to 12 significant digits.
double round_probability(double p);

Json complex_to_json(cplx z);
Json state_to_json(const CompositeState &state);
Json config_to_json(const RunConfig &config);

Json report_to_json(const SdcReport &report, const RunConfig &config);
Json confusion_to_json(const ConfusionMatrix &matrix, const RunConfig &config);
Json sweep_to_json(const std::vector<SweepPoint> &sweep, const RunConfig &config);

struct VerifyRow
{
    double ratio;
    DeviationReport report;
};

Json verify_to_json(const std::vector<VerifyRow> &rows, const RunConfig &config);
Json prepare_to_json(const std::string &stage, const CompositeState &state, const RunConfig &config,
                     std::optional<double> heralding_probability);

// Pretty-printed JSON with a trailing newline.
std::string emit_json(const Json &document);

// Header `alpha,success_probability`.
std::string emit_sweep_csv(const std::vector<SweepPoint> &sweep);

} // namespace sdc
