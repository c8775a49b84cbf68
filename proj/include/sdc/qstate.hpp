#pragma once

#include <complex>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <Eigen/Dense>

namespace sdc {

using cplx = std::complex<double>;
using BasisLabels = std::vector<std::string>;

enum class SubsystemKind { AtomInternal, AtomMomentum, CavityFock };

std::string_view to_string(SubsystemKind kind);

/**
 * One tensor factor of a composite Hilbert space.
 *
 * Momentum factors also carry the Bragg lattice index l of every basis state,
 * so P0 and P-2 are looked up by label rather than by position.
 */
struct SubsystemSpec
{
    SubsystemKind kind = SubsystemKind::AtomInternal;
    std::string name;
    std::vector<std::string> labels;
    std::vector<int> momentum_orders;

    std::size_t dimension() const { return labels.size(); }
    std::size_t index_of(std::string_view label) const;
    void validate() const;

    bool operator==(const SubsystemSpec &) const = default;
};

SubsystemSpec internal_levels(std::string name, std::string ground = "g", std::string excited = "e");
SubsystemSpec momentum_lattice(std::string name, int l_min, int l_max);
// The first-order Bragg pair {P0, P-2}, in that order.
SubsystemSpec momentum_pair(std::string name);
SubsystemSpec fock_space(std::string name, int n_max);

std::string momentum_label(int l);
// P_l = (l0/2 + l) hbar k, returned in units of hbar k.
double momentum_in_hbar_k(int l, int bragg_order = 2);

/**
 * Normalized amplitude vector over an ordered tensor product of subsystems.
 *
 * Basis ordering is row-major: the first subsystem is the most significant
 * digit. A state with no subsystems is the scalar 1 and is what remains after
 * every factor has been measured out. Instances are immutable.
 */
class CompositeState
{
public:
    CompositeState();
    // Normalizes `amplitudes`; throws StateError on a zero, NaN or mis-sized vector.
    CompositeState(std::vector<SubsystemSpec> subsystems, Eigen::VectorXcd amplitudes);

    const std::vector<SubsystemSpec> &subsystems() const { return m_subsystems; }
    const SubsystemSpec &subsystem(std::size_t index) const;
    std::size_t subsystem_count() const { return m_subsystems.size(); }
    std::size_t index_of(std::string_view name) const;
    std::vector<std::size_t> dims() const;

    const Eigen::VectorXcd &amplitudes() const { return m_amplitudes; }
    std::size_t dimension() const { return static_cast<std::size_t>(m_amplitudes.size()); }
    double norm() const { return m_amplitudes.norm(); }

    std::size_t flat_index(const BasisLabels &labels) const;
    BasisLabels basis_labels(std::size_t flat) const;
    cplx amplitude(const BasisLabels &labels) const;
    double population(const BasisLabels &labels) const;

    CompositeState renamed(std::size_t index, std::string name) const;

private:
    std::vector<SubsystemSpec> m_subsystems;
    Eigen::VectorXcd m_amplitudes;
};

enum class Provenance { Analytic, Numeric };

std::string_view to_string(Provenance provenance);

struct TargetSpec
{
    SubsystemKind kind;
    std::size_t dimension;

    bool operator==(const TargetSpec &) const = default;
};

// A unitary together with the ordered list of factors it acts on.
struct Propagator
{
    Eigen::MatrixXcd matrix;
    std::vector<TargetSpec> targets;
    Provenance provenance = Provenance::Analytic;
    double elapsed = 0.0;

    double unitarity_defect() const;
};

// max |(U^dagger U - I)_ij|
double unitarity_defect(const Eigen::MatrixXcd &matrix);

CompositeState make_state(std::vector<SubsystemSpec> subsystems,
                          const std::vector<std::pair<BasisLabels, cplx>> &entries);

CompositeState tensor(const CompositeState &a, const CompositeState &b);

// Applies I x ... x U x ... x I with U acting on `targets` (in the order of U's descriptor).
CompositeState apply_local(const CompositeState &state, const Propagator &op,
                           const std::vector<std::size_t> &targets);

std::vector<double> outcome_probabilities(const CompositeState &state, std::size_t subsystem);

struct PostSelection
{
    double probability;
    CompositeState collapsed;
};

// The measured subsystem is removed from the collapsed state.
PostSelection postselect(const CompositeState &state, std::size_t subsystem, std::string_view outcome);

struct MeasurementRecord
{
    std::size_t subsystem;
    std::string outcome;
    double probability;
    CompositeState collapsed;
    std::optional<std::uint64_t> seed;
};

MeasurementRecord sample_measurement(const CompositeState &state, std::size_t subsystem,
                                     std::uint64_t seed);

Eigen::MatrixXcd reduced_density(const CompositeState &state, const std::vector<std::size_t> &keep);

double phase_invariant_fidelity(const CompositeState &a, const CompositeState &b);

// Wootters concurrence of a two-qubit density matrix.
double concurrence(const Eigen::MatrixXcd &rho);

} // namespace sdc
