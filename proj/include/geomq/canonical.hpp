#pragma once

#include <array>
#include <functional>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "geomq/fields.hpp"

namespace geomq {

/// Which free-particle ensemble Hamiltonian generates time translations.
enum class HamiltonianKind { quantum_free, classical_free };

std::string to_string(HamiltonianKind kind);

using Functional = std::function<double(const EnsembleState &)>;
using FieldMap   = std::function<ScalarField(const EnsembleState &)>;

/**
 * @brief A functional F[P, S] together with its variational derivatives.
 *
 * `analytic` records whether dFdP / dFdS are closed-form or obtained by
 * finite differences. `homogeneous` claims F[lambda P, S] = lambda F[P, S].
 */
struct Observable
{
  std::string name;
  Functional value;
  FieldMap dFdP;
  FieldMap dFdS;
  bool analytic    = true;
  bool homogeneous = true;
};

/// Integral of (dF/dP dG/dS - dF/dS dG/dP).
double poisson_bracket(const Observable & F, const Observable & G, const EnsembleState & state);

/// Integral of |dF/dP dG/dS| + |dF/dS dG/dP|: the size of the terms that cancel in a vanishing bracket.
double bracket_scale(const Observable & F, const Observable & G, const EnsembleState & state);

enum class Conjugate { P, S };

/**
 * @brief Central-difference variational derivative.
 *
 * Component i is [F(field_i + h) - F(field_i - h)] / (2 h dV) with
 * h = 1e-6 * max|field| (1e-6 for an identically zero field). Probes use
 * unnormalized states. Throws std::domain_error if a probe evaluates to a
 * non-finite value.
 */
ScalarField numeric_variational_derivative(const Functional & F, const EnsembleState & state, Conjugate which);

/// Wraps a value functional; both derivatives come from numeric_variational_derivative.
Observable numeric_observable(std::string name, Functional value, bool homogeneous = false);

/// {F, G} as an observable in its own right, with numeric derivatives.
Observable bracket_observable(const Observable & F, const Observable & G);

namespace observables {

/// N = integral of P.
Observable normalization();
/// Q_i = integral of P x_i.
Observable position(int axis);
/// A_i = integral of P d_i S.
Observable momentum(int axis);
/// L_i = integral of P eps_ijk x_j d_k S.
Observable angular_momentum(int axis);
/// G_i = m Q_i - t A_i.
Observable boost(int axis, double mass, double time);
/// (integral of P)^2: deliberately not homogeneous of degree one.
Observable squared_normalization();

}  // namespace observables

/**
 * @brief Representation of the Galilean generators by observables.
 *
 * Components whose axes do not exist on the grid are left empty: on a 2D
 * grid only L_z is present, on a 1D grid no rotation is.
 */
struct GeneratorSet
{
  std::array<std::optional<Observable>, 3> A;
  std::array<std::optional<Observable>, 3> L;
  std::array<std::optional<Observable>, 3> G;
  std::array<std::optional<Observable>, 3> Q;
  Observable H;
  double mass = 1.0;
  double time = 0.0;
  int dim     = 3;
};

GeneratorSet build_galilean_generators(int dim, double mass, double time, HamiltonianKind kind);

struct RelationResidual
{
  std::string relation;
  double lhs      = 0.0;
  double rhs      = 0.0;
  double residual = 0.0;
  /// residual / max(bracket_scale, |rhs|); 0 when everything vanishes.
  double relative = 0.0;
};

struct AlgebraReport
{
  std::vector<RelationResidual> rows;
  double max_residual = 0.0;
  double max_relative = 0.0;
};

/// Evaluates the nine Galilean bracket families at a state.
AlgebraReport galilean_algebra_residual(const GeneratorSet & gen, const EnsembleState & state);

/// Header relation,lhs,rhs,residual,relative.
void write_algebra_report(std::ostream & out, const AlgebraReport & report);

/**
 * @brief One infinitesimal canonical step: dP = eps dG/dS, dS = -eps dG/dP.
 *
 * Samples pushed below zero by no more than 1e-12 are clamped; anything
 * further raises PositivityError. The result is renormalized.
 */
EnsembleState apply_generator(const Observable & gen, const EnsembleState & state, double epsilon);

struct HomogeneityReport
{
  double residual = 0.0;  ///< |F(lambda P, S) - lambda F(P, S)|
  double relative = 0.0;
  bool homogeneous = false;
  /// |F - integral of P dF/dP| and its relative size, when F claims homogeneity.
  std::optional<double> density_residual;
  std::optional<double> density_relative;
};

HomogeneityReport homogeneity_check(const Observable & F, const EnsembleState & state, double lambda, double tol = 1e-10);

/// |F(P, S + c) - F(P, S)|.
double gauge_residual(const Observable & F, const EnsembleState & state, double c);

}  // namespace geomq
