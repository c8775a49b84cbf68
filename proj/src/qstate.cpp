#include "sdc/qstate.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <random>
#include <set>

#include "sdc/errors.hpp"
#include "sdc/tolerances.hpp"

namespace sdc {

namespace {

std::vector<std::size_t> strides_of(const std::vector<std::size_t> &dims)
{
    std::vector<std::size_t> strides(dims.size(), 1);
    for (std::size_t i = dims.size(); i-- > 1;) {
        strides[i - 1] = strides[i] * dims[i];
    }
    return strides;
}

// Flat offsets of every multi-index over `subset`, enumerated row-major in subset order.
std::vector<std::size_t> subset_offsets(const std::vector<std::size_t> &dims,
                                        const std::vector<std::size_t> &strides,
                                        const std::vector<std::size_t> &subset)
{
    std::vector<std::size_t> offsets{0};
    for (std::size_t s : subset) {
        std::vector<std::size_t> next;
        next.reserve(offsets.size() * dims[s]);
        for (std::size_t base : offsets) {
            for (std::size_t k = 0; k < dims[s]; ++k) {
                next.push_back(base + k * strides[s]);
            }
        }
        offsets = std::move(next);
    }
    return offsets;
}

std::vector<std::size_t> complement(std::size_t count, const std::vector<std::size_t> &subset)
{
    std::vector<std::size_t> rest;
    for (std::size_t i = 0; i < count; ++i) {
        if (std::find(subset.begin(), subset.end(), i) == subset.end()) {
            rest.push_back(i);
        }
    }
    return rest;
}

void check_subset(const CompositeState &state, const std::vector<std::size_t> &subset)
{
    std::set<std::size_t> seen;
    for (std::size_t s : subset) {
        if (s >= state.subsystem_count()) {
            throw DimensionError("subsystem index " + std::to_string(s) + " out of range");
        }
        if (!seen.insert(s).second) {
            throw DimensionError("subsystem index " + std::to_string(s) + " repeated");
        }
    }
}

} // namespace

std::string_view to_string(SubsystemKind kind)
{
    switch (kind) {
    case SubsystemKind::AtomInternal: return "atom-internal";
    case SubsystemKind::AtomMomentum: return "atom-momentum";
    case SubsystemKind::CavityFock: return "cavity-fock";
    }
    return "unknown";
}

std::string_view to_string(Provenance provenance)
{
    return provenance == Provenance::Analytic ? "analytic" : "numeric";
}

std::size_t SubsystemSpec::index_of(std::string_view label) const
{
    auto it = std::find(labels.begin(), labels.end(), label);
    if (it == labels.end()) {
        throw StateError("unknown label '" + std::string(label) + "' for subsystem '" + name + "'");
    }
    return static_cast<std::size_t>(it - labels.begin());
}

void SubsystemSpec::validate() const
{
    if (labels.size() < 2) {
        throw StateError("subsystem '" + name + "' needs dimension >= 2");
    }
    std::set<std::string> unique(labels.begin(), labels.end());
    if (unique.size() != labels.size()) {
        throw StateError("subsystem '" + name + "' has duplicate labels");
    }
    if (kind == SubsystemKind::AtomMomentum && momentum_orders.size() != labels.size()) {
        throw StateError("momentum subsystem '" + name + "' needs one lattice index per label");
    }
}

SubsystemSpec internal_levels(std::string name, std::string ground, std::string excited)
{
    return {SubsystemKind::AtomInternal, std::move(name), {std::move(ground), std::move(excited)}, {}};
}

std::string momentum_label(int l)
{
    return "P" + std::to_string(l);
}

double momentum_in_hbar_k(int l, int bragg_order)
{
    return bragg_order / 2.0 + l;
}

SubsystemSpec momentum_lattice(std::string name, int l_min, int l_max)
{
    if (l_max <= l_min) {
        throw StateError("momentum lattice needs l_max > l_min");
    }
    SubsystemSpec spec{SubsystemKind::AtomMomentum, std::move(name), {}, {}};
    for (int l = l_min; l <= l_max; ++l) {
        spec.labels.push_back(momentum_label(l));
        spec.momentum_orders.push_back(l);
    }
    return spec;
}

SubsystemSpec momentum_pair(std::string name)
{
    return {SubsystemKind::AtomMomentum, std::move(name), {momentum_label(0), momentum_label(-2)}, {0, -2}};
}

SubsystemSpec fock_space(std::string name, int n_max)
{
    if (n_max < 1) {
        throw StateError("Fock truncation n_max must be >= 1");
    }
    SubsystemSpec spec{SubsystemKind::CavityFock, std::move(name), {}, {}};
    for (int n = 0; n <= n_max; ++n) {
        spec.labels.push_back(std::to_string(n));
    }
    return spec;
}

CompositeState::CompositeState() : m_amplitudes(Eigen::VectorXcd::Ones(1)) {}

CompositeState::CompositeState(std::vector<SubsystemSpec> subsystems, Eigen::VectorXcd amplitudes)
    : m_subsystems(std::move(subsystems)), m_amplitudes(std::move(amplitudes))
{
    std::size_t total = 1;
    for (const auto &s : m_subsystems) {
        s.validate();
        total *= s.dimension();
    }
    if (static_cast<std::size_t>(m_amplitudes.size()) != total) {
        throw StateError("amplitude vector has length " + std::to_string(m_amplitudes.size()) +
                         ", expected " + std::to_string(total));
    }
    if (!m_amplitudes.allFinite()) {
        throw StateError("amplitudes contain NaN or Inf");
    }
    const double n = m_amplitudes.norm();
    if (n < std::sqrt(kTolerances.probability_floor)) {
        throw StateError("state has zero norm");
    }
    m_amplitudes /= n;
}

const SubsystemSpec &CompositeState::subsystem(std::size_t index) const
{
    if (index >= m_subsystems.size()) {
        throw DimensionError("subsystem index " + std::to_string(index) + " out of range");
    }
    return m_subsystems[index];
}

std::size_t CompositeState::index_of(std::string_view name) const
{
    for (std::size_t i = 0; i < m_subsystems.size(); ++i) {
        if (m_subsystems[i].name == name) {
            return i;
        }
    }
    throw StateError("no subsystem named '" + std::string(name) + "'");
}

std::vector<std::size_t> CompositeState::dims() const
{
    std::vector<std::size_t> d;
    d.reserve(m_subsystems.size());
    for (const auto &s : m_subsystems) {
        d.push_back(s.dimension());
    }
    return d;
}

std::size_t CompositeState::flat_index(const BasisLabels &labels) const
{
    if (labels.size() != m_subsystems.size()) {
        throw StateError("label tuple has " + std::to_string(labels.size()) + " entries, expected " +
                         std::to_string(m_subsystems.size()));
    }
    std::size_t flat = 0;
    for (std::size_t i = 0; i < labels.size(); ++i) {
        flat = flat * m_subsystems[i].dimension() + m_subsystems[i].index_of(labels[i]);
    }
    return flat;
}

BasisLabels CompositeState::basis_labels(std::size_t flat) const
{
    BasisLabels labels(m_subsystems.size());
    for (std::size_t i = m_subsystems.size(); i-- > 0;) {
        const std::size_t d = m_subsystems[i].dimension();
        labels[i] = m_subsystems[i].labels[flat % d];
        flat /= d;
    }
    return labels;
}

cplx CompositeState::amplitude(const BasisLabels &labels) const
{
    return m_amplitudes(static_cast<Eigen::Index>(flat_index(labels)));
}

double CompositeState::population(const BasisLabels &labels) const
{
    return std::norm(amplitude(labels));
}

CompositeState CompositeState::renamed(std::size_t index, std::string name) const
{
    if (index >= m_subsystems.size()) {
        throw DimensionError("subsystem index " + std::to_string(index) + " out of range");
    }
    CompositeState out = *this;
    out.m_subsystems[index].name = std::move(name);
    out.m_subsystems[index].validate();
    return out;
}

double unitarity_defect(const Eigen::MatrixXcd &matrix)
{
    if (matrix.rows() != matrix.cols() || matrix.rows() == 0) {
        return std::numeric_limits<double>::infinity();
    }
    const Eigen::MatrixXcd gram = matrix.adjoint() * matrix;
    return (gram - Eigen::MatrixXcd::Identity(matrix.rows(), matrix.cols())).cwiseAbs().maxCoeff();
}

double Propagator::unitarity_defect() const
{
    return sdc::unitarity_defect(matrix);
}

CompositeState make_state(std::vector<SubsystemSpec> subsystems,
                          const std::vector<std::pair<BasisLabels, cplx>> &entries)
{
    std::size_t total = 1;
    for (const auto &s : subsystems) {
        s.validate();
        total *= s.dimension();
    }
    Eigen::VectorXcd amps = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
    std::vector<bool> seen(total, false);
    // Probe object for label lookup; its amplitudes are never used.
    Eigen::VectorXcd probe = Eigen::VectorXcd::Zero(static_cast<Eigen::Index>(total));
    probe(0) = 1.0;
    const CompositeState layout(subsystems, probe);
    for (const auto &[labels, value] : entries) {
        const std::size_t flat = layout.flat_index(labels);
        if (seen[flat]) {
            throw StateError("basis entry given twice");
        }
        seen[flat] = true;
        amps(static_cast<Eigen::Index>(flat)) = value;
    }
    if (amps.squaredNorm() < kTolerances.probability_floor) {
        throw StateError("all entries are zero");
    }
    return CompositeState(std::move(subsystems), std::move(amps));
}

CompositeState tensor(const CompositeState &a, const CompositeState &b)
{
    auto subsystems = a.subsystems();
    subsystems.insert(subsystems.end(), b.subsystems().begin(), b.subsystems().end());
    const Eigen::Index nb = b.amplitudes().size();
    Eigen::VectorXcd amps(a.amplitudes().size() * nb);
    for (Eigen::Index i = 0; i < a.amplitudes().size(); ++i) {
        amps.segment(i * nb, nb) = a.amplitudes()(i) * b.amplitudes();
    }
    return CompositeState(std::move(subsystems), std::move(amps));
}

CompositeState apply_local(const CompositeState &state, const Propagator &op,
                           const std::vector<std::size_t> &targets)
{
    check_subset(state, targets);
    if (targets.size() != op.targets.size()) {
        throw DimensionError("propagator acts on " + std::to_string(op.targets.size()) +
                             " subsystems, " + std::to_string(targets.size()) + " given");
    }
    std::size_t sub_dim = 1;
    for (std::size_t i = 0; i < targets.size(); ++i) {
        const auto &s = state.subsystem(targets[i]);
        if (s.kind != op.targets[i].kind || s.dimension() != op.targets[i].dimension) {
            throw DimensionError("propagator target " + std::to_string(i) + " (" +
                                 std::string(to_string(op.targets[i].kind)) + ", dim " +
                                 std::to_string(op.targets[i].dimension) + ") does not match subsystem '" +
                                 s.name + "'");
        }
        sub_dim *= s.dimension();
    }
    if (static_cast<std::size_t>(op.matrix.rows()) != sub_dim ||
        static_cast<std::size_t>(op.matrix.cols()) != sub_dim) {
        throw DimensionError("propagator matrix size does not match its targets");
    }
    const double defect = op.unitarity_defect();
    if (!(defect <= kTolerances.unitarity)) {
        throw NonUnitaryError("propagator is not unitary (defect " + std::to_string(defect) + ")");
    }

    const auto dims = state.dims();
    const auto strides = strides_of(dims);
    const auto target_off = subset_offsets(dims, strides, targets);
    const auto rest_off = subset_offsets(dims, strides, complement(dims.size(), targets));

    const Eigen::VectorXcd &in = state.amplitudes();
    Eigen::VectorXcd out(in.size());
    Eigen::VectorXcd block(static_cast<Eigen::Index>(sub_dim));
    for (std::size_t base : rest_off) {
        for (std::size_t j = 0; j < sub_dim; ++j) {
            block(static_cast<Eigen::Index>(j)) = in(static_cast<Eigen::Index>(base + target_off[j]));
        }
        const Eigen::VectorXcd mapped = op.matrix * block;
        for (std::size_t j = 0; j < sub_dim; ++j) {
            out(static_cast<Eigen::Index>(base + target_off[j])) = mapped(static_cast<Eigen::Index>(j));
        }
    }
    return CompositeState(state.subsystems(), std::move(out));
}

std::vector<double> outcome_probabilities(const CompositeState &state, std::size_t subsystem)
{
    check_subset(state, {subsystem});
    const auto dims = state.dims();
    const auto strides = strides_of(dims);
    const auto rest_off = subset_offsets(dims, strides, complement(dims.size(), {subsystem}));
    std::vector<double> probs(dims[subsystem], 0.0);
    for (std::size_t k = 0; k < dims[subsystem]; ++k) {
        for (std::size_t base : rest_off) {
            probs[k] += std::norm(state.amplitudes()(static_cast<Eigen::Index>(base + k * strides[subsystem])));
        }
    }
    return probs;
}

PostSelection postselect(const CompositeState &state, std::size_t subsystem, std::string_view outcome)
{
    check_subset(state, {subsystem});
    const std::size_t k = state.subsystem(subsystem).index_of(outcome);
    const auto dims = state.dims();
    const auto strides = strides_of(dims);
    const auto rest = complement(dims.size(), {subsystem});
    const auto rest_off = subset_offsets(dims, strides, rest);

    Eigen::VectorXcd branch(static_cast<Eigen::Index>(rest_off.size()));
    for (std::size_t r = 0; r < rest_off.size(); ++r) {
        branch(static_cast<Eigen::Index>(r)) =
            state.amplitudes()(static_cast<Eigen::Index>(rest_off[r] + k * strides[subsystem]));
    }
    const double probability = branch.squaredNorm();
    if (probability < kTolerances.probability_floor) {
        throw ZeroProbabilityError("outcome '" + std::string(outcome) + "' on subsystem '" +
                                   state.subsystem(subsystem).name + "' has zero probability");
    }
    std::vector<SubsystemSpec> remaining;
    for (std::size_t r : rest) {
        remaining.push_back(state.subsystem(r));
    }
    return {probability, CompositeState(std::move(remaining), std::move(branch))};
}

MeasurementRecord sample_measurement(const CompositeState &state, std::size_t subsystem, std::uint64_t seed)
{
    const auto probs = outcome_probabilities(state, subsystem);
    std::mt19937_64 rng(seed);
    // 53 random bits mapped to [0, 1); stable across standard library implementations.
    const double u = static_cast<double>(rng() >> 11) * 0x1.0p-53;

    const double total = std::accumulate(probs.begin(), probs.end(), 0.0);
    std::size_t chosen = probs.size();
    double cumulative = 0.0;
    for (std::size_t k = 0; k < probs.size(); ++k) {
        if (probs[k] < kTolerances.probability_floor) {
            continue;
        }
        chosen = k;
        cumulative += probs[k] / total;
        if (u < cumulative) {
            break;
        }
    }
    const std::string label = state.subsystem(subsystem).labels[chosen];
    auto selected = postselect(state, subsystem, label);
    return {subsystem, label, selected.probability, std::move(selected.collapsed), seed};
}

Eigen::MatrixXcd reduced_density(const CompositeState &state, const std::vector<std::size_t> &keep)
{
    if (keep.empty()) {
        throw DimensionError("reduced_density needs at least one subsystem to keep");
    }
    check_subset(state, keep);
    const auto dims = state.dims();
    const auto strides = strides_of(dims);
    const auto keep_off = subset_offsets(dims, strides, keep);
    const auto rest_off = subset_offsets(dims, strides, complement(dims.size(), keep));

    Eigen::MatrixXcd psi(static_cast<Eigen::Index>(keep_off.size()), static_cast<Eigen::Index>(rest_off.size()));
    for (std::size_t i = 0; i < keep_off.size(); ++i) {
        for (std::size_t r = 0; r < rest_off.size(); ++r) {
            psi(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(r)) =
                state.amplitudes()(static_cast<Eigen::Index>(keep_off[i] + rest_off[r]));
        }
    }
    return psi * psi.adjoint();
}

double phase_invariant_fidelity(const CompositeState &a, const CompositeState &b)
{
    if (a.subsystem_count() != b.subsystem_count()) {
        throw StateError("fidelity between states with different subsystem counts");
    }
    for (std::size_t i = 0; i < a.subsystem_count(); ++i) {
        if (a.subsystem(i).kind != b.subsystem(i).kind ||
            a.subsystem(i).dimension() != b.subsystem(i).dimension()) {
            throw StateError("fidelity between states with different subsystem structure");
        }
    }
    const double f = std::norm(a.amplitudes().dot(b.amplitudes()));
    return std::clamp(f, 0.0, 1.0);
}

double concurrence(const Eigen::MatrixXcd &rho)
{
    if (rho.rows() != 4 || rho.cols() != 4) {
        throw NonPhysicalError("concurrence needs a 4x4 density matrix");
    }
    if ((rho - rho.adjoint()).cwiseAbs().maxCoeff() > kTolerances.hermiticity) {
        throw NonPhysicalError("density matrix is not Hermitian");
    }
    if (std::abs(rho.trace() - cplx(1.0)) > kTolerances.hermiticity) {
        throw NonPhysicalError("density matrix trace is not 1");
    }
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(rho);
    if (eig.eigenvalues().minCoeff() < -kTolerances.hermiticity) {
        throw NonPhysicalError("density matrix is not positive semidefinite");
    }
    const Eigen::VectorXd clipped = eig.eigenvalues().cwiseMax(0.0);
    const Eigen::MatrixXcd sqrt_rho =
        eig.eigenvectors() * clipped.cwiseSqrt().cast<cplx>().asDiagonal() * eig.eigenvectors().adjoint();

    Eigen::Matrix4cd yy = Eigen::Matrix4cd::Zero();
    yy(0, 3) = -1.0;
    yy(1, 2) = 1.0;
    yy(2, 1) = 1.0;
    yy(3, 0) = -1.0;
    const Eigen::MatrixXcd flipped = yy * rho.conjugate() * yy;
    const Eigen::MatrixXcd r = sqrt_rho * flipped * sqrt_rho;

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> reig(0.5 * (r + r.adjoint()));
    std::vector<double> lambda;
    for (Eigen::Index i = 0; i < 4; ++i) {
        lambda.push_back(std::sqrt(std::max(0.0, reig.eigenvalues()(i))));
    }
    std::sort(lambda.begin(), lambda.end(), std::greater<>());
    return std::clamp(lambda[0] - lambda[1] - lambda[2] - lambda[3], 0.0, 1.0);
}

} // namespace sdc
