#include "sdc/protocol.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "sdc/errors.hpp"
#include "sdc/tolerances.hpp"

namespace sdc {

namespace {

constexpr double pi = std::numbers::pi;

const std::string kP0 = momentum_label(0);
const std::string kPm2 = momentum_label(-2);

// Any failure inside `body` is reported against the pipeline stage that raised it.
template <typename F>
auto in_stage(const std::string &stage, F &&body) -> decltype(body())
{
    try {
        return body();
    } catch (const StageError &) {
        throw;
    } catch (const std::exception &e) {
        throw StageError(stage, e.what());
    }
}

// Removes a factor that must be left in a definite basis state (a traced-out cavity).
CompositeState factor_out(const CompositeState &state, std::size_t subsystem, std::string_view label)
{
    const auto selected = postselect(state, subsystem, label);
    if (selected.probability < 1.0 - kTolerances.decode_overlap) {
        throw StateError("subsystem '" + state.subsystem(subsystem).name + "' is still entangled (weight " +
                         std::to_string(selected.probability) + " in '" + std::string(label) + "')");
    }
    return selected.collapsed;
}

Propagator momentum_sign_flip()
{
    Eigen::MatrixXcd z = Eigen::MatrixXcd::Identity(2, 2);
    z(1, 1) = -1.0;
    return {std::move(z), {{SubsystemKind::AtomMomentum, 2}}, Provenance::Analytic, 0.0};
}

std::string readout_bits(const BasisLabels &momenta)
{
    std::string bits;
    for (const auto &label : momenta) {
        bits.push_back(label == kP0 ? '0' : '1');
    }
    return bits;
}

void check_momentum_pair_state(const CompositeState &state)
{
    if (state.subsystem_count() != 2) {
        throw DimensionError("expected a two-atom momentum state");
    }
    for (const auto &s : state.subsystems()) {
        if (s.kind != SubsystemKind::AtomMomentum || s.dimension() != 2) {
            throw DimensionError("subsystem '" + s.name + "' is not a {P0, P-2} momentum pair");
        }
    }
}

} // namespace

std::string_view to_string(DecoderKind kind)
{
    return kind == DecoderKind::Oracle ? "oracle" : "paper-literal";
}

std::string_view to_string(PostselectPolicy policy)
{
    return policy == PostselectPolicy::AliceGroundBobExcited ? "g_A-e_B-only" : "all-outcomes-corrected";
}

std::string_view to_string(PhaseMode mode)
{
    return mode == PhaseMode::Full ? "full" : "paper";
}

void SdcConfig::validate() const
{
    params.validate();
    bragg.validate(params);
    if (!std::isfinite(encode_phase) || encode_phase < 0.0 || encode_phase > 2.0 * pi) {
        throw ParameterError("encode phase must lie in [0, 2 pi]");
    }
}

CompositeState prepare_hypersuperposition(const SdcConfig &config)
{
    return in_stage("prepare", [&] {
        config.validate();
        const auto &p = config.params;
        if (p.coupling == 0.0) {
            throw ParameterError("zero coupling: the cavity cannot imprint momentum");
        }
        const int n_max = config.bragg.n_max;
        CompositeState state =
            make_state({internal_levels("internal"), momentum_pair("momentum"), fock_space("cavity", n_max)},
                       {{{"g", kP0, "0"}, 1.0}, {{"e", kP0, "0"}, 1.0}});
        const Propagator u = resonant_vacuum_propagator(p, hypersuperposition_time(p), n_max, config.phase_mode);
        state = apply_local(state, u, {0, 1, 2});
        return factor_out(state, 2, "0");
    });
}

PairPreparation prepare_hyperentangled_pair(const SdcConfig &config)
{
    return in_stage("prepare", [&] {
        config.validate();
        const auto &p = config.params;
        if (p.coupling == 0.0) {
            throw ParameterError("zero coupling: no atom-cavity entanglement is generated");
        }
        if (p.aux_coupling <= 0.0) {
            throw ParameterError("auxiliary coupling must be positive");
        }
        if (p.rabi_frequency <= 0.0) {
            throw ParameterError("classical Rabi frequency must be positive");
        }
        const int n_max = config.bragg.n_max;

        PairPreparation out;
        auto record = [&](const char *stage, const CompositeState &s) { out.stages.push_back({stage, s}); };

        CompositeState state = make_state({internal_levels("internal_1"), internal_levels("internal_2"),
                                           momentum_pair("momentum_1"), momentum_pair("momentum_2"),
                                           fock_space("cavity", n_max), internal_levels("internal_aux")},
                                          {{{"g", "g", kP0, kP0, "0", "g"}, 1.0}, {{"g", "g", kP0, kP0, "1", "g"}, 1.0}});
        record("initial", state);

        // Mirror condition for the one-photon sector; the vacuum sector is untouched.
        PhysicalParams single = p;
        single.photon_number = 1;
        const Propagator pass = cavity_bragg_propagator(p, mirror_time(single), n_max, config.phase_mode);
        const std::size_t cavity = state.index_of("cavity");
        state = apply_local(state, pass, {state.index_of("momentum_1"), cavity});
        record("atom-1-pass", state);
        state = apply_local(state, pass, {state.index_of("momentum_2"), cavity});
        record("atom-2-pass", state);

        // Three-quarter Rabi swap: |g_s, 1> -> +i |e_s, 0>.
        const double swap_time = 3.0 * pi / (2.0 * p.aux_coupling);
        state = apply_local(state, jc_swap_propagator(p.aux_coupling, swap_time, n_max),
                            {state.index_of("internal_aux"), cavity});
        record("aux-swap", state);
        state = factor_out(state, cavity, "0");

        state = apply_local(state, ramsey_unitary(), {state.index_of("internal_aux")});
        record("aux-ramsey", state);
        const auto heralded = postselect(state, state.index_of("internal_aux"), "g");
        out.aux_probability = heralded.probability;
        state = heralded.collapsed;
        record("aux-heralded", state);

        const Propagator lift = momentum_conditioned(
            classical_pi_pulse(p.rabi_frequency, p.laser_phase, pi / p.rabi_frequency), kPm2);
        state = apply_local(state, lift, {state.index_of("internal_1"), state.index_of("momentum_1")});
        state = apply_local(state, lift, {state.index_of("internal_2"), state.index_of("momentum_2")});
        record("hyperentangled", state);

        out.state = state;
        return out;
    });
}

CompositeState share(const CompositeState &pair)
{
    CompositeState out = pair;
    for (const auto &[from, to] : {std::pair{"internal_1", "internal_A"}, std::pair{"internal_2", "internal_B"},
                                   std::pair{"momentum_1", "momentum_A"}, std::pair{"momentum_2", "momentum_B"}}) {
        out = out.renamed(out.index_of(from), to);
    }
    return out;
}

CompositeState encode(const CompositeState &shared_pair, Message message, const SdcConfig &config)
{
    const AtomSubsystems alice{shared_pair.index_of("internal_A"), shared_pair.index_of("momentum_A")};
    return apply_encoding_gate(shared_pair, alice, {gate_for(message), config.encode_phase}, config.params,
                               config.phase_mode);
}

Blackbox1Result blackbox1_branch(const CompositeState &encoded, std::string_view alice_outcome,
                                 std::string_view bob_outcome, bool correct)
{
    const Propagator ramsey = ramsey_unitary();
    CompositeState state = apply_local(encoded, ramsey, {encoded.index_of("internal_A")});
    state = apply_local(state, ramsey, {state.index_of("internal_B")});

    const auto alice = postselect(state, state.index_of("internal_A"), alice_outcome);
    const auto bob = postselect(alice.collapsed, alice.collapsed.index_of("internal_B"), bob_outcome);

    Blackbox1Result out{alice.probability * bob.probability, std::string(alice_outcome), std::string(bob_outcome),
                        false, bob.collapsed};
    // Agreeing outcomes leave the opposite relative sign on the P-2_B ket.
    if (correct && alice_outcome == bob_outcome) {
        out.momentum_state =
            apply_local(out.momentum_state, momentum_sign_flip(), {out.momentum_state.index_of("momentum_B")});
        out.corrected = true;
    }
    return out;
}

Blackbox1Result blackbox1(const CompositeState &encoded, const SdcConfig &config)
{
    if (config.policy == PostselectPolicy::AliceGroundBobExcited) {
        return blackbox1_branch(encoded, "g", "e", false);
    }
    const Propagator ramsey = ramsey_unitary();
    CompositeState state = apply_local(encoded, ramsey, {encoded.index_of("internal_A")});
    state = apply_local(state, ramsey, {state.index_of("internal_B")});
    const auto alice = sample_measurement(state, state.index_of("internal_A"), config.seed);
    const auto bob = sample_measurement(alice.collapsed, alice.collapsed.index_of("internal_B"), config.seed + 1);
    return blackbox1_branch(encoded, alice.outcome, bob.outcome, true);
}

Blackbox2Result blackbox2_paper(const CompositeState &momentum_bell, const SdcConfig &config)
{
    check_momentum_pair_state(momentum_bell);
    CompositeState state = apply_beamsplitter(momentum_bell, 0, config.params, config.phase_mode);
    state = apply_beamsplitter(state, 1, config.params, config.phase_mode);

    Blackbox2Result out;
    for (std::size_t k = 0; k < state.dimension(); ++k) {
        out.distribution[readout_bits(state.basis_labels(k))] =
            std::norm(state.amplitudes()(static_cast<Eigen::Index>(k)));
    }
    const auto best = std::max_element(out.distribution.begin(), out.distribution.end(),
                                       [](const auto &a, const auto &b) { return a.second < b.second; });
    const auto ties = std::count_if(out.distribution.begin(), out.distribution.end(), [&](const auto &entry) {
        return best->second - entry.second <= kTolerances.decode_overlap;
    });
    if (ties == 1) {
        out.decoded = Message::parse(best->first);
    }
    return out;
}

std::array<CompositeState, 4> decoder_candidates(double encode_phase)
{
    std::array<CompositeState, 4> out;
    for (const Message m : kAllMessages) {
        out[static_cast<std::size_t>(m.index())] =
            blackbox1_branch(table2_state(m, encode_phase), "g", "e", false).momentum_state;
    }
    return out;
}

OracleDecode decode_oracle(const CompositeState &momentum_bell, const SdcConfig &config)
{
    check_momentum_pair_state(momentum_bell);
    const auto candidates = decoder_candidates(config.encode_phase);
    std::vector<OracleDecode> hits;
    double best = 0.0;
    for (const Message m : kAllMessages) {
        const double overlap = phase_invariant_fidelity(candidates[static_cast<std::size_t>(m.index())], momentum_bell);
        best = std::max(best, overlap);
        if (overlap >= 1.0 - kTolerances.decode_overlap) {
            hits.push_back({m, overlap});
        }
    }
    if (hits.empty()) {
        throw DecodeError("no candidate Bell state reaches the overlap threshold (best " + std::to_string(best) + ")");
    }
    if (hits.size() > 1) {
        throw DecodeError("candidate Bell states are degenerate at this encode phase; " + std::to_string(hits.size()) +
                          " candidates match");
    }
    return hits.front();
}

CandidateMeasurement measure_candidates(const CompositeState &momentum_bell, double encode_phase)
{
    check_momentum_pair_state(momentum_bell);
    const auto candidates = decoder_candidates(encode_phase);
    Eigen::MatrixXcd gram = Eigen::MatrixXcd::Zero(4, 4);
    for (const auto &c : candidates) {
        gram += 0.25 * c.amplitudes() * c.amplitudes().adjoint();
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(gram);
    Eigen::VectorXd inv_sqrt = Eigen::VectorXd::Zero(4);
    for (Eigen::Index i = 0; i < 4; ++i) {
        if (eig.eigenvalues()(i) > kTolerances.probability_floor) {
            inv_sqrt(i) = 1.0 / std::sqrt(eig.eigenvalues()(i));
        }
    }
    const Eigen::MatrixXcd whitening =
        eig.eigenvectors() * inv_sqrt.cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();

    CandidateMeasurement out;
    double total = 0.0;
    for (std::size_t j = 0; j < 4; ++j) {
        const cplx amp = candidates[j].amplitudes().dot(whitening * momentum_bell.amplitudes());
        out.probabilities[j] = 0.25 * std::norm(amp);
        total += out.probabilities[j];
    }
    out.undecided = std::max(0.0, 1.0 - total);
    return out;
}

SdcReport run_sdc(Message message, const SdcConfig &config)
{
    SdcReport report;
    report.message = message;
    report.encode_phase = config.encode_phase;
    report.decoder = config.decoder;
    report.phase_mode = config.phase_mode;
    report.policy = config.policy;
    report.seed = config.seed;

    const PairPreparation prep = prepare_hyperentangled_pair(config);
    report.aux_probability = prep.aux_probability;
    const CompositeState shared = share(prep.state);
    const CompositeState encoded = in_stage("encode", [&] { return encode(shared, message, config); });
    report.encoded_state_fidelity = phase_invariant_fidelity(encoded, table2_state(message, config.encode_phase));

    const Blackbox1Result bb1 = in_stage("blackbox1", [&] { return blackbox1(encoded, config); });
    report.blackbox1_probability = bb1.probability;
    report.blackbox1_outcome = bb1.alice_outcome + "," + bb1.bob_outcome;
    const double bb1_yield = config.policy == PostselectPolicy::AllOutcomesCorrected ? 1.0 : bb1.probability;
    report.heralded_yield = prep.aux_probability * bb1_yield;

    if (config.decoder == DecoderKind::Oracle) {
        report.decoded = in_stage("decode", [&] { return decode_oracle(bb1.momentum_state, config); }).bits;
        const auto measured = measure_candidates(bb1.momentum_state, config.encode_phase);
        report.outcome_basis = "bell";
        for (const Message m : kAllMessages) {
            report.outcome_distribution[m.str()] = measured.probabilities[static_cast<std::size_t>(m.index())];
        }
    } else {
        const auto bb2 = in_stage("blackbox2", [&] { return blackbox2_paper(bb1.momentum_state, config); });
        report.decoded = bb2.decoded;
        report.outcome_basis = "momentum";
        report.outcome_distribution = bb2.distribution;
    }

    if (config.keep_snapshots) {
        report.snapshots = prep.stages;
        report.snapshots.push_back({"shared", shared});
        report.snapshots.push_back({"encoded", encoded});
        report.snapshots.push_back({"blackbox1", bb1.momentum_state});
    }
    return report;
}

ConfusionMatrix confusion_matrix(const SdcConfig &config)
{
    ConfusionMatrix out;
    out.decoder = config.decoder;
    const CompositeState shared = share(prepare_hyperentangled_pair(config).state);

    for (const Message sent : kAllMessages) {
        const auto row = static_cast<std::size_t>(sent.index());
        const CompositeState encoded = in_stage("encode", [&] { return encode(shared, sent, config); });

        std::vector<Blackbox1Result> branches;
        if (config.policy == PostselectPolicy::AliceGroundBobExcited) {
            branches.push_back(blackbox1_branch(encoded, "g", "e", false));
            branches.back().probability = 1.0;
        } else {
            for (const char *a : {"g", "e"}) {
                for (const char *b : {"g", "e"}) {
                    branches.push_back(blackbox1_branch(encoded, a, b, true));
                }
            }
        }

        for (const auto &branch : branches) {
            const double weight = branch.probability;
            if (config.decoder == DecoderKind::PaperLiteral) {
                const auto bb2 = blackbox2_paper(branch.momentum_state, config);
                for (const auto &[bits, prob] : bb2.distribution) {
                    out.probabilities[row][static_cast<std::size_t>(Message::parse(bits).index())] += weight * prob;
                }
                out.tied[row] = out.tied[row] || !bb2.decoded.has_value();
            } else {
                const auto measured = measure_candidates(branch.momentum_state, config.encode_phase);
                for (std::size_t col = 0; col < 4; ++col) {
                    out.probabilities[row][col] += weight * measured.probabilities[col];
                }
                out.undecided[row] += weight * measured.undecided;
            }
        }
    }
    return out;
}

std::vector<SweepPoint> discrimination_sweep(const SdcConfig &config, const std::vector<double> &alpha_grid)
{
    if (alpha_grid.empty()) {
        throw ParameterError("alpha grid is empty");
    }
    std::vector<SweepPoint> out;
    out.reserve(alpha_grid.size());
    for (double alpha : alpha_grid) {
        SdcConfig cell = config;
        cell.encode_phase = alpha;
        cell.decoder = DecoderKind::Oracle;
        const auto cm = confusion_matrix(cell);
        double success = 0.0;
        for (std::size_t i = 0; i < 4; ++i) {
            success += 0.25 * cm.probabilities[i][i];
        }
        out.push_back({alpha, success});
    }
    return out;
}

} // namespace sdc
