#pragma once

#include <Eigen/Core>

#include <iosfwd>
#include <string>
#include <vector>

#include "geomq/fields.hpp"

namespace geomq {

/// One 2x2 block per grid point, ordered (P, S) or (psi, psi*).
template<typename Scalar>
using Block = Eigen::Matrix<Scalar, 2, 2>;

using RealBlock    = Block<double>;
using ComplexBlock = Block<Complex>;

template<typename Scalar>
using BlockField = std::vector<Block<Scalar>, Eigen::aligned_allocator<Block<Scalar>>>;

/// The constant symplectic block [[0, 1], [-1, 0]].
RealBlock symplectic_block();

/**
 * @brief Pointwise (Omega, g, J) in (P, S) coordinates.
 *
 * Blocks are stored only on the support of P; `support` lists the grid
 * indices they belong to, in increasing order.
 */
struct KahlerTriple
{
  GridSpec grid;
  double alpha = 1.0;
  ScalarField A;
  std::vector<Index> support;
  RealBlock omega;
  BlockField<double> g;
  BlockField<double> J;
};

/**
 * @brief g = [[alpha/2P, A], [A, (2P/alpha)(1 + A^2)]], J = [[A, (2P/alpha)(1 + A^2)], [-alpha/2P, -A]].
 *
 * Throws NodeError if P is below the node threshold anywhere.
 */
KahlerTriple build_general_triple(const ScalarField & P, const ScalarField & A, double alpha);

/// J = [[A, C(1 + A^2)], [-1/C, -A]] pointwise. Throws std::domain_error where C = 0.
BlockField<double> intermediate_J(const ScalarField & A, const ScalarField & C);

enum class KahlerCondition { compatibility, hermitian, complex_structure };

std::string to_string(KahlerCondition c);

struct ConditionResidual
{
  KahlerCondition condition;
  double max_residual = 0.0;
  /// Position in the block list (grid index for a triple) where the maximum occurs.
  Index location = -1;
};

/**
 * @brief Residuals of Omega = g J, J^T g J = g, and J J = -I.
 *
 * Each residual is the largest entrywise error divided by the magnitude of
 * the terms that produced it (for Omega = g J: |g||J| + |Omega|), so blocks
 * of very different scale are compared on the same footing.
 */
struct KahlerReport
{
  std::vector<ConditionResidual> rows;

  double max_residual() const;
  bool passes(double tol) const { return max_residual() <= tol; }
  const ConditionResidual & operator[](KahlerCondition c) const;
};

template<typename Scalar>
KahlerReport verify_kahler(const BlockField<Scalar> & omega, const BlockField<Scalar> & g, const BlockField<Scalar> & J);

KahlerReport verify_kahler(const KahlerTriple & triple);

/// J J + I residual alone, same normalization as verify_kahler.
double complex_structure_residual(const BlockField<double> & J);

/// Header condition,max_residual,location.
void write_kahler_report(std::ostream & out, const KahlerReport & report);

struct AppendixResult
{
  Eigen::MatrixXd j;
  double square_residual    = 0.0;  ///< max |j j + I|
  double hermitian_residual = 0.0;  ///< max |j^T g j - g| / max |g|
  bool compatible(double tol = 1e-12) const { return square_residual <= tol && hermitian_residual <= tol; }
};

/**
 * @brief j = g^-1 omega for a finite-dimensional (omega, g).
 *
 * Throws KahlerError for odd dimension, non-antisymmetric or degenerate
 * omega, and g that is not symmetric positive definite.
 */
AppendixResult appendix_construct(const Eigen::MatrixXd & omega, const Eigen::MatrixXd & g);

struct FlatBlocks
{
  GridSpec grid;
  double alpha = 1.0;
  std::vector<Index> support;
  BlockField<Complex> omega_c;
  BlockField<Complex> g_c;
  BlockField<Complex> J_c;
};

/// The constant blocks every point of FlatBlocks should carry.
ComplexBlock flat_omega(double alpha);
ComplexBlock flat_metric(double alpha);
ComplexBlock flat_complex_structure();

/**
 * @brief Transform an A = 0 triple to (psi, psi*) coordinates.
 *
 * Throws KahlerError if A is not identically zero or if any block departs
 * from the flat constants by more than 1e-12 (relative to alpha), and
 * NodeError if the state has nodes on the triple's support.
 */
FlatBlocks to_complex_coordinates(const KahlerTriple & triple, const EnsembleState & state);

struct PSBlocks
{
  BlockField<double> omega;
  BlockField<double> g;
  BlockField<double> J;
};

/// Pull FlatBlocks back to (P, S) coordinates with the inverse Jacobian.
PSBlocks from_complex_coordinates(const FlatBlocks & flat, const EnsembleState & state);

}  // namespace geomq
