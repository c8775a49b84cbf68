#include "sdc/elements.hpp"

#include <cmath>

#include "sdc/errors.hpp"

namespace sdc {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

const std::string kP0 = momentum_label(0);
const std::string kPm2 = momentum_label(-2);

void check_phase(double phase)
{
    if (!std::isfinite(phase) || phase < 0.0 || phase > 2.0 * pi) {
        throw ParameterError("encode phase must lie in [0, 2 pi]");
    }
}

void check_pair(const CompositeState &state, std::size_t momentum)
{
    const auto &s = state.subsystem(momentum);
    if (s.kind != SubsystemKind::AtomMomentum || s.dimension() != 2) {
        throw DimensionError("subsystem '" + s.name + "' is not a {P0, P-2} momentum pair");
    }
}

// (F, S): first and second kets of the reference row, as (internal, momentum) labels.
struct RowKets
{
    std::string f_momentum;
    std::string s_momentum;
    cplx s_coefficient;
};

RowKets row_kets(Message message, double encode_phase)
{
    const bool flipped = message.second == 1;
    const cplx phase = message.first == 1 ? std::exp(I * encode_phase) : cplx(1.0);
    return {flipped ? kPm2 : kP0, flipped ? kP0 : kPm2, -I * phase};
}

} // namespace

Message Message::parse(std::string_view bits)
{
    if (bits.size() != 2 || (bits[0] != '0' && bits[0] != '1') || (bits[1] != '0' && bits[1] != '1')) {
        throw ParameterError("message must be two bits, got '" + std::string(bits) + "'");
    }
    return {bits[0] - '0', bits[1] - '0'};
}

Message Message::from_index(int index)
{
    if (index < 0 || index > 3) {
        throw ParameterError("message index out of range");
    }
    return {index / 2, index % 2};
}

std::string Message::str() const
{
    return std::string{static_cast<char>('0' + first), static_cast<char>('0' + second)};
}

std::string_view to_string(GateKind kind)
{
    switch (kind) {
    case GateKind::Identity: return "identity";
    case GateKind::Not: return "not";
    case GateKind::Phase: return "phase";
    case GateKind::PhaseNot: return "phase-not";
    }
    return "unknown";
}

GateKind gate_for(Message message)
{
    static constexpr std::array<GateKind, 4> table{GateKind::Identity, GateKind::Not, GateKind::Phase,
                                                   GateKind::PhaseNot};
    return table[static_cast<std::size_t>(message.index())];
}

CompositeState apply_beamsplitter(const CompositeState &state, std::size_t momentum, const PhysicalParams &params,
                                  PhaseMode mode)
{
    check_pair(state, momentum);
    if (params.photon_number < 1) {
        throw ParameterError("beamsplitter needs at least one cavity photon");
    }
    return apply_local(state, offresonant_bragg_propagator(params, beamsplitter_time(params), mode), {momentum});
}

CompositeState apply_mirror(const CompositeState &state, std::size_t momentum, const PhysicalParams &params,
                            PhaseMode mode)
{
    check_pair(state, momentum);
    if (params.photon_number < 1) {
        throw ParameterError("mirror needs at least one cavity photon");
    }
    return apply_local(state, offresonant_bragg_propagator(params, mirror_time(params), mode), {momentum});
}

double dispersive_time_for_phase(const PhysicalParams &params, double phase)
{
    check_phase(phase);
    if (params.detuning == 0.0) {
        throw ParameterError("phase gate needs a nonzero detuning");
    }
    const double rate = (params.photon_number + 1) * params.coupling * params.coupling / params.detuning;
    if (rate == 0.0) {
        throw ParameterError("phase gate needs a nonzero coupling");
    }
    // exp(-i rate t) == exp(i phase) with t >= 0
    return rate > 0.0 ? (2.0 * pi - phase) / rate : phase / -rate;
}

Propagator momentum_conditioned(const Propagator &internal_op, std::string_view arm)
{
    if (internal_op.targets.size() != 1 || internal_op.targets[0].kind != SubsystemKind::AtomInternal) {
        throw DimensionError("momentum_conditioned expects a single internal-level propagator");
    }
    const std::size_t arm_index = momentum_pair("").index_of(arm);
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(4, 4);
    for (int r = 0; r < 2; ++r) {
        for (int c = 0; c < 2; ++c) {
            u(2 * r + static_cast<int>(arm_index), 2 * c + static_cast<int>(arm_index)) = internal_op.matrix(r, c);
        }
    }
    return {std::move(u),
            {{SubsystemKind::AtomInternal, 2}, {SubsystemKind::AtomMomentum, 2}},
            internal_op.provenance,
            internal_op.elapsed};
}

CompositeState apply_arm_phase(const CompositeState &state, AtomSubsystems atom, std::string_view arm,
                               double phase, const PhysicalParams &params)
{
    check_pair(state, atom.momentum);
    const double t = dispersive_time_for_phase(params, phase);
    const int n = std::max(params.photon_number, 0);
    const int n_max = std::max(n, 1);
    const Propagator cavity = dispersive_phase_propagator(params, t, n_max);
    // Cavity stays in |n>; only the |e, n> entry of the diagonal reaches the arm's |e> amplitudes.
    const int e_n = (n_max + 1) + n;
    const cplx factor = cavity.matrix(e_n, e_n);

    Propagator on_e{Eigen::MatrixXcd::Identity(2, 2), {{SubsystemKind::AtomInternal, 2}}, Provenance::Analytic, t};
    on_e.matrix(1, 1) = factor;
    return apply_local(state, momentum_conditioned(on_e, arm), {atom.internal, atom.momentum});
}

CompositeState apply_encoding_gate(const CompositeState &state, AtomSubsystems alice, const EncodingGate &gate,
                                   const PhysicalParams &params, PhaseMode mode)
{
    check_phase(gate.encode_phase);
    if (state.subsystem(alice.internal).kind != SubsystemKind::AtomInternal) {
        throw DimensionError("subsystem '" + state.subsystem(alice.internal).name + "' is not an internal level");
    }
    check_pair(state, alice.momentum);
    switch (gate.kind) {
    case GateKind::Identity:
        return state;
    case GateKind::Not:
        return apply_mirror(state, alice.momentum, params, mode);
    case GateKind::Phase:
        return apply_arm_phase(state, alice, kPm2, gate.encode_phase, params);
    case GateKind::PhaseNot: {
        const CompositeState flipped = apply_mirror(state, alice.momentum, params, mode);
        return apply_arm_phase(flipped, alice, kP0, gate.encode_phase, params);
    }
    }
    throw ParameterError("unknown gate kind");
}

CompositeState table1_state(Message message, double encode_phase)
{
    const RowKets row = row_kets(message, encode_phase);
    return make_state({internal_levels("internal"), momentum_pair("momentum")},
                      {{{"g", row.f_momentum}, 1.0}, {{"e", row.s_momentum}, row.s_coefficient}});
}

CompositeState table2_state(Message message, double encode_phase)
{
    const RowKets row = row_kets(message, encode_phase);
    return make_state({internal_levels("internal_A"), internal_levels("internal_B"), momentum_pair("momentum_A"),
                       momentum_pair("momentum_B")},
                      {{{"g", "g", row.f_momentum, kP0}, 1.0}, {{"e", "e", row.s_momentum, kPm2}, row.s_coefficient}});
}

} // namespace sdc
