#pragma once

#include <array>
#include <compare>
#include <numbers>
#include <string>
#include <string_view>

#include "sdc/dynamics.hpp"
#include "sdc/qstate.hpp"

namespace sdc {

// A two-bit message. The first bit is read from Alice's momentum, the second
// from Bob's; P0 encodes 0 and P-2 encodes 1.
struct Message
{
    int first = 0;
    int second = 0;

    static Message parse(std::string_view bits);
    static Message from_index(int index);
    int index() const { return 2 * first + second; }
    std::string str() const;

    auto operator<=>(const Message &) const = default;
};

inline constexpr std::array<Message, 4> kAllMessages{Message{0, 0}, Message{0, 1}, Message{1, 0}, Message{1, 1}};

enum class GateKind { Identity, Not, Phase, PhaseNot };

std::string_view to_string(GateKind kind);
GateKind gate_for(Message message);

struct EncodingGate
{
    GateKind kind = GateKind::Identity;
    // Phase written onto the interacting arm as exp(i encode_phase); kept in [0, 2 pi].
    double encode_phase = std::numbers::pi;
};

struct AtomSubsystems
{
    std::size_t internal;
    std::size_t momentum;
};

// 50/50 Bragg beamsplitter (alpha t = pi/4) on a {P0, P-2} momentum factor.
CompositeState apply_beamsplitter(const CompositeState &state, std::size_t momentum, const PhysicalParams &params,
                                  PhaseMode mode = PhaseMode::Full);

// Bragg mirror (alpha t = pi/2).
CompositeState apply_mirror(const CompositeState &state, std::size_t momentum, const PhysicalParams &params,
                            PhaseMode mode = PhaseMode::Full);

// Dispersive interaction time that leaves exp(i phase) on |e, n> for the configured photon number.
double dispersive_time_for_phase(const PhysicalParams &params, double phase);

/// Phase picked up only by the amplitudes of one spatial arm in one internal
/// level: the arm with momentum label `arm` traverses a dispersive cavity long
/// enough to imprint exp(i phase) on its |e> component.
CompositeState apply_arm_phase(const CompositeState &state, AtomSubsystems atom, std::string_view arm,
                               double phase, const PhysicalParams &params);

CompositeState apply_encoding_gate(const CompositeState &state, AtomSubsystems alice, const EncodingGate &gate,
                                   const PhysicalParams &params, PhaseMode mode = PhaseMode::Full);

// Internal-level propagator applied only where the atom's momentum is `arm`;
// result acts on (internal, momentum pair).
Propagator momentum_conditioned(const Propagator &internal_op, std::string_view arm);

// Single-atom reference kets on (internal, momentum pair).
CompositeState table1_state(Message message, double encode_phase);

// Two-atom reference kets on (internal_A, internal_B, momentum_A, momentum_B).
CompositeState table2_state(Message message, double encode_phase);

} // namespace sdc
