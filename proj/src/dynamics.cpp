#include "sdc/dynamics.hpp"

#include <cmath>
#include <string>

#include <Eigen/Sparse>
#include <boost/numeric/odeint.hpp>

#include "sdc/errors.hpp"
#include "sdc/tolerances.hpp"

namespace sdc {

namespace {

constexpr double pi = std::numbers::pi;
constexpr cplx I{0.0, 1.0};

void require_nonzero_detuning(const PhysicalParams &params)
{
    if (params.detuning == 0.0) {
        throw ParameterError("detuning must be nonzero for off-resonant interactions");
    }
}

void check_hermitian(const Hamiltonian &h)
{
    if (h.matrix.rows() != h.matrix.cols()) {
        throw NonHermitianError("Hamiltonian is not square");
    }
    const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
    if ((h.matrix - h.matrix.adjoint()).cwiseAbs().maxCoeff() > kTolerances.hermiticity * scale) {
        throw NonHermitianError("Hamiltonian is not Hermitian");
    }
}

CompositeState spectral_evolve(const Hamiltonian &h, const CompositeState &state, double t)
{
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.matrix);
    const Eigen::VectorXcd phases = (-I * t * eig.eigenvalues().cast<cplx>()).array().exp();
    const Eigen::VectorXcd coeffs = eig.eigenvectors().adjoint() * state.amplitudes();
    return CompositeState(state.subsystems(), eig.eigenvectors() * phases.cwiseProduct(coeffs));
}

CompositeState adaptive_evolve(const Hamiltonian &h, const CompositeState &state, double t)
{
    using Buffer = std::vector<double>;
    const Eigen::Index n = h.matrix.rows();
    const Eigen::SparseMatrix<cplx> sparse = h.matrix.sparseView();

    // Complex amplitudes stored interleaved (re, im); std::complex guarantees that layout.
    Buffer psi(2 * static_cast<std::size_t>(n));
    Eigen::Map<Eigen::VectorXcd>(reinterpret_cast<cplx *>(psi.data()), n) = state.amplitudes();

    auto rhs = [&](const Buffer &x, Buffer &dxdt, double) {
        Eigen::Map<const Eigen::VectorXcd> in(reinterpret_cast<const cplx *>(x.data()), n);
        Eigen::Map<Eigen::VectorXcd> out(reinterpret_cast<cplx *>(dxdt.data()), n);
        out = -I * (sparse * in);
    };

    namespace odeint = boost::numeric::odeint;
    const double tol = kTolerances.integrator_step;
    const double scale = std::max(1.0, h.matrix.cwiseAbs().maxCoeff());
    odeint::integrate_adaptive(odeint::make_controlled<odeint::runge_kutta_dopri5<Buffer>>(tol, tol), rhs,
                               psi, 0.0, t, 0.1 / scale);

    Eigen::VectorXcd out = Eigen::Map<const Eigen::VectorXcd>(reinterpret_cast<const cplx *>(psi.data()), n);
    return CompositeState(state.subsystems(), std::move(out));
}

std::vector<TargetSpec> targets_of(std::initializer_list<std::pair<SubsystemKind, std::size_t>> list)
{
    std::vector<TargetSpec> out;
    for (auto [kind, dim] : list) {
        out.push_back({kind, dim});
    }
    return out;
}

Eigen::Matrix2cd bragg_pair_matrix(double alpha, double t, PhaseMode mode)
{
    const double a = alpha * t;
    Eigen::Matrix2cd u;
    u << std::cos(a), I * std::sin(a), I * std::sin(a), std::cos(a);
    if (mode == PhaseMode::Full) {
        u *= std::exp(2.0 * I * a);
    }
    return u;
}

} // namespace

double PhysicalParams::recoil_frequency() const
{
    return units::hbar * wavenumber * wavenumber / (2.0 * mass_kg);
}

double PhysicalParams::bragg_rabi() const
{
    return bragg_rabi(photon_number);
}

double PhysicalParams::bragg_rabi(int photons) const
{
    require_nonzero_detuning(*this);
    return coupling * coupling * photons / (4.0 * detuning);
}

double PhysicalParams::beta() const
{
    const double wr = recoil_frequency();
    if (!(wr > 0.0)) {
        throw ParameterError("recoil frequency must be positive");
    }
    return coupling * coupling / wr;
}

void PhysicalParams::validate() const
{
    if (!(mass_kg > 0.0)) {
        throw ParameterError("mass must be positive");
    }
    if (!(wavenumber > 0.0)) {
        throw ParameterError("wavenumber must be positive");
    }
    if (!(coupling >= 0.0)) {
        throw ParameterError("coupling must be non-negative");
    }
    if (photon_number < 0) {
        throw ParameterError("photon number must be non-negative");
    }
    if (!std::isfinite(detuning) || !std::isfinite(aux_coupling) || !std::isfinite(rabi_frequency) ||
        !std::isfinite(laser_phase)) {
        throw ParameterError("parameters must be finite");
    }
}

double PhysicalParams::wavenumber_from_recoil(double mass_kg, double recoil_frequency)
{
    return std::sqrt(2.0 * mass_kg * recoil_frequency / units::hbar);
}

PhysicalParams PhysicalParams::rb85_defaults()
{
    PhysicalParams p;
    p.mass_kg = 85.0 * units::amu;
    p.wavenumber = wavenumber_from_recoil(p.mass_kg, 2.4e4);
    p.coupling = units::two_pi * 16.4e6;
    p.detuning = units::two_pi * 1e9;
    p.photon_number = 1;
    p.aux_coupling = units::two_pi * 16.4e6;
    p.rabi_frequency = units::two_pi * 1e6;
    p.laser_phase = -pi / 2.0;
    return p;
}

void BraggConfig::validate(const PhysicalParams &params) const
{
    if (order != 2) {
        throw ParameterError("only first-order Bragg diffraction (order 2) is supported");
    }
    if (l_min > -order || l_max < 0) {
        throw ParameterError("momentum range must contain l = 0 and l = -2");
    }
    if (n_max < params.photon_number + 1 || n_max < 1) {
        throw ParameterError("Fock truncation n_max must be at least n + 1");
    }
}

double beamsplitter_time(const PhysicalParams &params)
{
    const double alpha = params.bragg_rabi();
    if (alpha == 0.0) {
        throw ParameterError("Bragg Rabi frequency is zero (no photons or no coupling)");
    }
    return pi / (4.0 * std::abs(alpha));
}

double mirror_time(const PhysicalParams &params)
{
    return 2.0 * beamsplitter_time(params);
}

double hypersuperposition_time(const PhysicalParams &params)
{
    const double b = params.beta();
    if (b == 0.0) {
        throw ParameterError("beta is zero (no coupling)");
    }
    return 2.0 * pi / b;
}

Hamiltonian build_bragg_hamiltonian(const PhysicalParams &params, const BraggConfig &cfg)
{
    cfg.validate(params);
    if (cfg.n_max < 0 || cfg.l_max < cfg.l_min) {
        throw ParameterError("negative Hilbert-space dimension");
    }
    Hamiltonian h;
    h.space = {internal_levels("internal"), momentum_lattice("momentum", cfg.l_min, cfg.l_max),
               fock_space("cavity", cfg.n_max)};
    const int n_mom = cfg.l_max - cfg.l_min + 1;
    const int n_fock = cfg.n_max + 1;
    const int dim = 2 * n_mom * n_fock;
    auto index = [&](int internal, int l, int n) { return (internal * n_mom + (l - cfg.l_min)) * n_fock + n; };

    const double wr = params.recoil_frequency();
    h.matrix = Eigen::MatrixXcd::Zero(dim, dim);
    for (int internal = 0; internal < 2; ++internal) {
        const double level = (internal == 1 ? 0.5 : -0.5) * params.detuning;
        for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
            const double p = momentum_in_hbar_k(l, cfg.order);
            for (int n = 0; n < n_fock; ++n) {
                h.matrix(index(internal, l, n), index(internal, l, n)) = p * p * wr + level;
            }
        }
    }
    // b sigma_+ cos(kx): |g, n, P_l> -> |e, n-1, P_{l+-1}> with amplitude (mu/2) sqrt(n)
    for (int l = cfg.l_min; l <= cfg.l_max; ++l) {
        for (int n = 1; n < n_fock; ++n) {
            const double g = 0.5 * params.coupling * std::sqrt(static_cast<double>(n));
            for (int shift : {-1, 1}) {
                const int lp = l + shift;
                if (lp < cfg.l_min || lp > cfg.l_max) {
                    continue;
                }
                const int from = index(0, l, n);
                const int to = index(1, lp, n - 1);
                h.matrix(to, from) += g;
                h.matrix(from, to) += g;
            }
        }
    }
    return h;
}

CompositeState evolve_numeric(const Hamiltonian &h, const CompositeState &state, double t,
                              EvolutionMethod method)
{
    check_hermitian(h);
    if (t < 0.0) {
        throw ParameterError("evolution time must be non-negative");
    }
    if (state.dimension() != static_cast<std::size_t>(h.matrix.rows())) {
        throw DimensionError("state dimension does not match the Hamiltonian");
    }
    if (state.subsystem_count() != h.space.size()) {
        throw DimensionError("state subsystem count does not match the Hamiltonian");
    }
    for (std::size_t i = 0; i < h.space.size(); ++i) {
        if (state.subsystem(i).dimension() != h.space[i].dimension()) {
            throw DimensionError("state subsystem '" + state.subsystem(i).name +
                                 "' does not match the Hamiltonian");
        }
    }
    if (t == 0.0) {
        return state;
    }
    if (method == EvolutionMethod::Auto) {
        method = h.matrix.rows() <= 256 ? EvolutionMethod::Spectral : EvolutionMethod::Adaptive;
    }
    return method == EvolutionMethod::Spectral ? spectral_evolve(h, state, t) : adaptive_evolve(h, state, t);
}

Propagator numeric_propagator(const Hamiltonian &h, double t)
{
    check_hermitian(h);
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.matrix);
    const Eigen::VectorXcd phases = (-I * t * eig.eigenvalues().cast<cplx>()).array().exp();
    Propagator u;
    u.matrix = eig.eigenvectors() * phases.asDiagonal() * eig.eigenvectors().adjoint();
    for (const auto &s : h.space) {
        u.targets.push_back({s.kind, s.dimension()});
    }
    u.provenance = Provenance::Numeric;
    u.elapsed = t;
    return u;
}

Propagator offresonant_bragg_propagator(const PhysicalParams &params, double t, PhaseMode mode)
{
    const double alpha = params.bragg_rabi();
    return {bragg_pair_matrix(alpha, t, mode), targets_of({{SubsystemKind::AtomMomentum, 2}}),
            Provenance::Analytic, t};
}

Propagator cavity_bragg_propagator(const PhysicalParams &params, double t, int n_max, PhaseMode mode)
{
    require_nonzero_detuning(params);
    const int nf = n_max + 1;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * nf, 2 * nf);
    for (int n = 0; n < nf; ++n) {
        const Eigen::Matrix2cd block = bragg_pair_matrix(params.bragg_rabi(n), t, mode);
        for (int r = 0; r < 2; ++r) {
            for (int c = 0; c < 2; ++c) {
                u(r * nf + n, c * nf + n) = block(r, c);
            }
        }
    }
    return {std::move(u),
            targets_of({{SubsystemKind::AtomMomentum, 2}, {SubsystemKind::CavityFock, static_cast<std::size_t>(nf)}}),
            Provenance::Analytic, t};
}

Propagator resonant_vacuum_propagator(const PhysicalParams &params, double t, int n_max, PhaseMode mode)
{
    const double b = params.beta();
    const int nf = n_max + 1;
    const int dim = 2 * 2 * nf;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(dim, dim);

    // i dC/dt = (beta/2) [[1/3, 1/2], [1/2, 1/3]] C on (|e,0,P0>, |e,0,P-2>)
    cplx prefactor = mode == PhaseMode::Full ? std::exp(-I * b * t / 6.0) : cplx(1.0);
    const cplx diag = prefactor * std::cos(b * t / 4.0);
    const cplx off = prefactor * (-I) * std::sin(b * t / 4.0);
    const int e_p0 = (1 * 2 + 0) * nf + 0;
    const int e_pm2 = (1 * 2 + 1) * nf + 0;
    u(e_p0, e_p0) = diag;
    u(e_pm2, e_pm2) = diag;
    u(e_p0, e_pm2) = off;
    u(e_pm2, e_p0) = off;
    return {std::move(u),
            targets_of({{SubsystemKind::AtomInternal, 2},
                        {SubsystemKind::AtomMomentum, 2},
                        {SubsystemKind::CavityFock, static_cast<std::size_t>(nf)}}),
            Provenance::Analytic, t};
}

Propagator dispersive_phase_propagator(const PhysicalParams &params, double t, int n_max)
{
    require_nonzero_detuning(params);
    const double rate = params.coupling * params.coupling / params.detuning;
    const int nf = n_max + 1;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Zero(2 * nf, 2 * nf);
    for (int n = 0; n < nf; ++n) {
        u(n, n) = std::exp(I * (n * rate * t));
        u(nf + n, nf + n) = std::exp(-I * ((n + 1) * rate * t));
    }
    return {std::move(u),
            targets_of({{SubsystemKind::AtomInternal, 2}, {SubsystemKind::CavityFock, static_cast<std::size_t>(nf)}}),
            Provenance::Analytic, t};
}

Propagator jc_swap_propagator(double aux_coupling, double t, int n_max)
{
    const int nf = n_max + 1;
    Eigen::MatrixXcd u = Eigen::MatrixXcd::Identity(2 * nf, 2 * nf);
    // |g, n> <-> |e, n-1> at rate mu_s sqrt(n); |g, 0> and the truncated |e, n_max> are idle.
    for (int n = 1; n < nf; ++n) {
        const double angle = aux_coupling * std::sqrt(static_cast<double>(n)) * t;
        const int g = n;
        const int e = nf + n - 1;
        u(g, g) = std::cos(angle);
        u(e, e) = std::cos(angle);
        u(e, g) = -I * std::sin(angle);
        u(g, e) = -I * std::sin(angle);
    }
    return {std::move(u),
            targets_of({{SubsystemKind::AtomInternal, 2}, {SubsystemKind::CavityFock, static_cast<std::size_t>(nf)}}),
            Provenance::Analytic, t};
}

Propagator ramsey_unitary()
{
    Eigen::MatrixXcd h(2, 2);
    h << 1.0, 1.0, 1.0, -1.0;
    return {h / std::sqrt(2.0), targets_of({{SubsystemKind::AtomInternal, 2}}), Provenance::Analytic, 0.0};
}

Propagator classical_pi_pulse(double rabi_frequency, double phase, double t)
{
    const double half = 0.5 * rabi_frequency * t;
    Eigen::MatrixXcd u(2, 2);
    // basis (g, e); sigma_+ = |e><g|
    u << std::cos(half), -I * std::sin(half) * std::exp(I * phase),
        -I * std::sin(half) * std::exp(-I * phase), std::cos(half);
    return {std::move(u), targets_of({{SubsystemKind::AtomInternal, 2}}), Provenance::Analytic, t};
}

DeviationReport compare_analytic_numeric(const PhysicalParams &params, const BraggConfig &cfg,
                                         const std::vector<double> &t_grid)
{
    if (t_grid.empty()) {
        throw ParameterError("time grid is empty");
    }
    const Hamiltonian h = build_bragg_hamiltonian(params, cfg);
    check_hermitian(h);
    const int n = params.photon_number;
    const std::string n_label = std::to_string(n);

    Eigen::VectorXcd zero = Eigen::VectorXcd::Zero(h.matrix.rows());
    zero(0) = 1.0;
    const CompositeState layout(h.space, zero);
    const auto g_p0 = static_cast<Eigen::Index>(layout.flat_index({"g", momentum_label(0), n_label}));
    const auto g_pm2 = static_cast<Eigen::Index>(layout.flat_index({"g", momentum_label(-2), n_label}));

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> eig(h.matrix);
    Eigen::VectorXcd initial = Eigen::VectorXcd::Zero(h.matrix.rows());
    initial(g_p0) = 1.0;
    const Eigen::VectorXcd coeffs = eig.eigenvectors().adjoint() * initial;

    DeviationReport report;
    report.alpha = params.bragg_rabi();
    Eigen::Vector2cd pair_in(1.0, 0.0);
    for (double t : t_grid) {
        const Eigen::VectorXcd phases = (-I * t * eig.eigenvalues().cast<cplx>()).array().exp();
        const Eigen::VectorXcd psi = eig.eigenvectors() * phases.cwiseProduct(coeffs);
        const double p0 = std::norm(psi(g_p0));
        const double pm2 = std::norm(psi(g_pm2));

        const Eigen::Vector2cd pair = offresonant_bragg_propagator(params, t).matrix * pair_in;
        const double dev = std::max(std::abs(p0 - std::norm(pair(0))), std::abs(pm2 - std::norm(pair(1))));
        const double leak = std::max(0.0, 1.0 - p0 - pm2);

        report.times.push_back(t);
        report.deviation.push_back(dev);
        report.leakage.push_back(leak);
        report.max_deviation = std::max(report.max_deviation, dev);
        report.max_leakage = std::max(report.max_leakage, leak);
    }
    return report;
}

} // namespace sdc
