#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "sdc/dynamics.hpp"
#include "sdc/elements.hpp"
#include "sdc/qstate.hpp"

namespace sdc {

enum class DecoderKind { PaperLiteral, Oracle };
enum class PostselectPolicy { AliceGroundBobExcited, AllOutcomesCorrected };

std::string_view to_string(DecoderKind kind);
std::string_view to_string(PostselectPolicy policy);
std::string_view to_string(PhaseMode mode);

struct SdcConfig
{
    PhysicalParams params = PhysicalParams::rb85_defaults();
    BraggConfig bragg;
    PhaseMode phase_mode = PhaseMode::Full;
    double encode_phase = std::numbers::pi;
    DecoderKind decoder = DecoderKind::Oracle;
    PostselectPolicy policy = PostselectPolicy::AliceGroundBobExcited;
    std::uint64_t seed = 0;
    bool keep_snapshots = false;

    void validate() const;
};

struct Snapshot
{
    std::string stage;
    CompositeState state;
};

/// Atom in (|g> + |e>)/sqrt2 with momentum P0 crosses a vacuum cavity
/// resonantly for t = 2 pi / beta. Returns the (internal, momentum) state
/// with the cavity, still in |0>, traced out.
CompositeState prepare_hypersuperposition(const SdcConfig &config);

struct PairPreparation
{
    // (internal_1, internal_2, momentum_1, momentum_2)
    CompositeState state;
    double aux_probability = 0.0;
    std::vector<Snapshot> stages;
};

/// Two ground-state atoms cross a cavity in (|0> + |1>)/sqrt2 at the mirror
/// time, an auxiliary atom swaps the cavity excitation out and is heralded in
/// |g_s> after a Ramsey zone, and a pi pulse lifts the P-2 arm of both atoms
/// to |e>. Every intermediate state is recorded in `stages`.
PairPreparation prepare_hyperentangled_pair(const SdcConfig &config);

// Hands atom 1 to Alice and atom 2 to Bob; only subsystem names change.
CompositeState share(const CompositeState &pair);

CompositeState encode(const CompositeState &shared_pair, Message message, const SdcConfig &config);

struct Blackbox1Result
{
    double probability = 0.0;
    std::string alice_outcome;
    std::string bob_outcome;
    bool corrected = false;
    // (momentum_A, momentum_B)
    CompositeState momentum_state;
};

// Ramsey zones on both internal levels followed by detection of the given outcome.
// With `correct`, branches whose outcomes agree get a P-2 sign flip on Bob's momentum
// so that every branch carries the same momentum Bell state as (g_A, e_B).
Blackbox1Result blackbox1_branch(const CompositeState &encoded, std::string_view alice_outcome,
                                 std::string_view bob_outcome, bool correct);

// Runs Blackbox 1 under the configured post-selection policy.
Blackbox1Result blackbox1(const CompositeState &encoded, const SdcConfig &config);

struct Blackbox2Result
{
    // keyed by readout bits, Alice first
    std::map<std::string, double> distribution;
    std::optional<Message> decoded;
};

Blackbox2Result blackbox2_paper(const CompositeState &momentum_bell, const SdcConfig &config);

// Momentum Bell states each message leaves behind in the (g_A, e_B) branch.
std::array<CompositeState, 4> decoder_candidates(double encode_phase);

struct OracleDecode
{
    Message bits;
    double overlap = 0.0;
};

OracleDecode decode_oracle(const CompositeState &momentum_bell, const SdcConfig &config);

struct CandidateMeasurement
{
    std::array<double, 4> probabilities{};
    // Weight outside the span of the candidates.
    double undecided = 0.0;
};

// Square-root measurement over the four candidates; optimal discrimination
// for the equiprobable candidate sets produced here.
CandidateMeasurement measure_candidates(const CompositeState &momentum_bell, double encode_phase);

struct SdcReport
{
    Message message;
    double encode_phase = 0.0;
    double encoded_state_fidelity = 0.0;
    double aux_probability = 0.0;
    double blackbox1_probability = 0.0;
    double heralded_yield = 0.0;
    std::string blackbox1_outcome;
    std::optional<Message> decoded;
    std::string outcome_basis;
    std::map<std::string, double> outcome_distribution;
    DecoderKind decoder = DecoderKind::Oracle;
    PhaseMode phase_mode = PhaseMode::Full;
    PostselectPolicy policy = PostselectPolicy::AliceGroundBobExcited;
    std::uint64_t seed = 0;
    std::vector<Snapshot> snapshots;
};

SdcReport run_sdc(Message message, const SdcConfig &config);

struct ConfusionMatrix
{
    DecoderKind decoder = DecoderKind::Oracle;
    // rows: sent message, columns: decoded message
    std::array<std::array<double, 4>, 4> probabilities{};
    std::array<double, 4> undecided{};
    // Literal decoder: the most probable readout of that row is not unique.
    std::array<bool, 4> tied{};
};

ConfusionMatrix confusion_matrix(const SdcConfig &config);

struct SweepPoint
{
    double alpha;
    double success_probability;
};

std::vector<SweepPoint> discrimination_sweep(const SdcConfig &config, const std::vector<double> &alpha_grid);

} // namespace sdc
