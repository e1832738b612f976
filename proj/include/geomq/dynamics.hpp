#pragma once

#include <array>
#include <iosfwd>
#include <optional>
#include <vector>

#include "geomq/canonical.hpp"

namespace geomq {

enum class Integrator { rk4_PS, crank_nicolson_psi };

std::string to_string(Integrator integrator);

struct EvolutionConfig
{
  HamiltonianKind hamiltonian = HamiltonianKind::quantum_free;
  double mass                 = 1.0;
  double alpha                = 1.0;
  double dt                   = 1e-3;
  int steps                   = 0;
  Integrator integrator       = Integrator::rk4_PS;
  /// rk4_PS requires dt <= cfl * m * dx^2 / alpha on the finest axis.
  double cfl = 0.1;
  /// A state is recorded every `save_every` steps, plus the initial and final state.
  int save_every = 1;

  /// Throws std::invalid_argument when a parameter is out of range for `grid`.
  void validate(const GridSpec & grid) const;
  /// Largest dt the CFL bound allows on `grid`.
  double max_stable_dt(const GridSpec & grid) const;
};

/// (1/2m) integral of [P |grad S|^2 + alpha^2 |grad P|^2 / (4P)]; nodes are left out of the second term.
double free_particle_hamiltonian(const EnsembleState & state, double mass);

/// (1/2m) integral of P |grad S|^2.
double classical_hamiltonian(const EnsembleState & state, double mass);

/// (alpha^2 / 2m) integral of |grad psi|^2.
double wave_kinetic_energy(const ComplexField & psi, double alpha, double mass);

/// The Hamiltonian as an observable, with closed-form variational derivatives.
Observable hamiltonian_observable(HamiltonianKind kind, double mass);

struct Rates
{
  ScalarField Pdot;
  ScalarField Sdot;
};

/**
 * @brief Right-hand side of the Hamiltonian flow.
 *
 * Pdot = -(1/m) div(P grad S); Sdot = -|grad S|^2 / 2m, plus
 * (alpha^2 / 2m) lap(sqrt P) / sqrt P for the quantum Hamiltonian.
 * The quantum term throws NodeError if any sample of P is below the node
 * threshold.
 */
Rates equations_of_motion(const EnsembleState & state, const EvolutionConfig & config);

struct ConservedRow
{
  double t     = 0.0;
  double norm  = 0.0;
  double H     = 0.0;
  std::array<double, 3> A{0.0, 0.0, 0.0};
  /// RMS width along the first axis.
  double sigma = 0.0;
};

struct Trajectory
{
  std::vector<double> times;
  std::vector<EnsembleState> states;
  /// Oracle wave function at each saved time (crank_nicolson_psi only).
  std::vector<ComplexField> psi;
  std::vector<ConservedRow> conserved;
  /// Largest |integral P - 1| removed by a renormalization, per unit time (rk4_PS only).
  double renormalization_rate = 0.0;
};

/**
 * @brief Integrate the flow.
 *
 * rk4_PS: classical fourth-order Runge-Kutta on (P, S), renormalizing P after
 * each step. crank_nicolson_psi: implicit midpoint rule for
 * i alpha dpsi/dt = -(alpha^2 / 2m) lap psi, converted back with
 * madelung_inverse at save times (gauge point = maximum of P).
 */
Trajectory evolve(const EnsembleState & state, const EvolutionConfig & config);

struct WaveTrajectory
{
  std::vector<double> times;
  std::vector<ComplexField> psi;
};

/// The Crank-Nicolson oracle on psi alone; psi may have nodes. Ignores config.integrator.
WaveTrajectory evolve_wavefunction(const ComplexField & psi, const EvolutionConfig & config);

/// Header t,norm,H,Ax,Ay,Az,sigma; absent axes are written as 0.
void write_conserved(std::ostream & out, const std::vector<ConservedRow> & rows);

/// Conserved quantities of a state; H follows the configured Hamiltonian.
ConservedRow conserved_quantities(double t, const EnsembleState & state, const EvolutionConfig & config);

/// RMS width of P along `axis`.
double rms_width(const ScalarField & P, int axis);
/// Mean of x_axis under P.
double mean_position(const ScalarField & P, int axis);

struct DiscrepancyRow
{
  double t        = 0.0;
  double P_L1     = 0.0;
  double S_L2     = 0.0;
  double psi_L2   = 0.0;
};

struct CrossValidation
{
  bool applicable = true;
  std::vector<DiscrepancyRow> rows;
  double max_P_L1   = 0.0;
  double max_S_L2   = 0.0;
  double max_psi_L2 = 0.0;
  Trajectory direct;
  Trajectory oracle;
};

/**
 * @brief Evolve the same state through rk4_PS and the wave-function oracle and compare.
 *
 * Runs round(horizon / dt) steps of config.dt. S is compared after removing
 * the P-weighted mean difference (global gauge). Not applicable (and not
 * run) for the classical Hamiltonian.
 */
CrossValidation cross_validate(const EnsembleState & state, const EvolutionConfig & config, double horizon);

}  // namespace geomq
