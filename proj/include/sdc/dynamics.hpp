#pragma once

#include <numbers>
#include <vector>

#include <Eigen/Dense>

#include "sdc/qstate.hpp"

namespace sdc {

namespace units {
inline constexpr double hbar = 1.054571817e-34;   // J s
inline constexpr double amu = 1.66053906660e-27;  // kg
inline constexpr double two_pi = 2.0 * std::numbers::pi;
} // namespace units

// `Full` keeps every analytic phase factor; `Paper` drops the exp(2i alpha t)
// Bragg prefactor and the exp(-i beta t / 6) resonant branch factor.
enum class PhaseMode { Full, Paper };

/**
 * Physical inputs of the atom-cavity model.
 *
 * Mass and wavenumber are SI; every frequency is angular (rad/s). Dynamics
 * work with hbar = 1, so energies are expressed as angular frequencies.
 */
struct PhysicalParams
{
    double mass_kg = 85.0 * units::amu;
    double wavenumber = 0.0;       // 1/m
    double coupling = 0.0;         // mu
    double detuning = 0.0;         // Delta
    int photon_number = 1;         // n
    double aux_coupling = 0.0;     // mu_s
    double rabi_frequency = 0.0;   // Omega_r
    double laser_phase = -std::numbers::pi / 2.0;

    // hbar k^2 / 2M
    double recoil_frequency() const;
    // mu^2 n / 4 Delta; throws ParameterError when Delta == 0.
    double bragg_rabi() const;
    double bragg_rabi(int photons) const;
    // mu^2 / omega_r
    double beta() const;

    void validate() const;

    static double wavenumber_from_recoil(double mass_kg, double recoil_frequency);
    // Rb-85 in a 780 nm lattice with the cavity figures used throughout the repo.
    static PhysicalParams rb85_defaults();

    bool operator==(const PhysicalParams &) const = default;
};

struct BraggConfig
{
    int order = 2;   // first-order Bragg, 2 hbar k exchange
    int l_min = -3;
    int l_max = 1;
    int n_max = 3;

    void validate(const PhysicalParams &params) const;

    bool operator==(const BraggConfig &) const = default;
};

struct Hamiltonian
{
    Eigen::MatrixXcd matrix;
    std::vector<SubsystemSpec> space;
};

// Interaction times for the standard Bragg optics at the configured photon number.
double beamsplitter_time(const PhysicalParams &params);
double mirror_time(const PhysicalParams &params);
double hypersuperposition_time(const PhysicalParams &params);

/// Full rotating-wave Hamiltonian on internal (g, e) x momentum lattice x Fock
/// space. Kinetic energy (l0/2 + l)^2 omega_r, detuning Delta/2 sigma_z, and
/// the standing-wave coupling (mu/2) sqrt(n) between |g, n, P_l> and
/// |e, n-1, P_{l+-1}>.
Hamiltonian build_bragg_hamiltonian(const PhysicalParams &params, const BraggConfig &cfg);

enum class EvolutionMethod { Auto, Spectral, Adaptive };

/// exp(-i H t) applied to `state`. `Auto` diagonalizes H up to dimension 256
/// and switches to an adaptive Dormand-Prince integrator above that.
CompositeState evolve_numeric(const Hamiltonian &h, const CompositeState &state, double t,
                              EvolutionMethod method = EvolutionMethod::Auto);

// exp(-i H t) as a full matrix, from the Hermitian eigendecomposition.
Propagator numeric_propagator(const Hamiltonian &h, double t);

// Momentum pair (P0, P-2). exp(2i alpha t) [[cos, i sin], [i sin, cos]](alpha t).
Propagator offresonant_bragg_propagator(const PhysicalParams &params, double t,
                                        PhaseMode mode = PhaseMode::Full);

// Momentum pair x Fock{0..n_max}; the pair propagator with alpha evaluated per
// photon-number sector. Assumes the atom enters in |g>.
Propagator cavity_bragg_propagator(const PhysicalParams &params, double t, int n_max,
                                   PhaseMode mode = PhaseMode::Full);

// Internal x momentum pair x Fock{0..n_max}. Only the |e, 0> sector evolves;
// every other sector, including the adiabatically eliminated |g, 1>, is left alone.
Propagator resonant_vacuum_propagator(const PhysicalParams &params, double t, int n_max = 1,
                                      PhaseMode mode = PhaseMode::Full);

// Internal x Fock{0..n_max}, diagonal. |e,n> -> exp(-i(n+1) mu^2 t/Delta), |g,n> -> exp(i n mu^2 t/Delta).
Propagator dispersive_phase_propagator(const PhysicalParams &params, double t, int n_max);

// Auxiliary internal x Fock{0..n_max}; resonant Jaynes-Cummings exchange.
Propagator jc_swap_propagator(double aux_coupling, double t, int n_max = 1);

Propagator ramsey_unitary();

Propagator classical_pi_pulse(double rabi_frequency, double phase, double t);

struct DeviationReport
{
    double alpha = 0.0;
    std::vector<double> times;
    std::vector<double> deviation;
    std::vector<double> leakage;
    double max_deviation = 0.0;
    double max_leakage = 0.0;
};

/// Evolves |g, n, P0> under the full Hamiltonian and compares populations of
/// P0 and P-2 against the two-mode analytic propagator at every grid time.
DeviationReport compare_analytic_numeric(const PhysicalParams &params, const BraggConfig &cfg,
                                         const std::vector<double> &t_grid);

} // namespace sdc
