#pragma once

#include <Eigen/Core>

#include <iosfwd>

#include "geomq/fields.hpp"

namespace geomq {

/**
 * @brief Symmetric n x n metric over translation parameters.
 *
 * `truncated_mass` is the probability mass sitting at points below the node
 * threshold, which were left out of the 1/P integrand.
 */
struct ParamMetric
{
  Eigen::MatrixXd entries;
  double truncated_mass = 0.0;

  int dim() const noexcept { return static_cast<int>(entries.rows()); }
  double trace() const { return entries.trace(); }
  double min_eigenvalue() const;
  bool is_psd(double tol = 1e-10) const { return min_eigenvalue() >= -tol; }
  /// Delta^T * entries * Delta.
  double contract(const Eigen::VectorXd & delta) const { return delta.dot(entries * delta); }
};

/// Header j,k,value; one row per entry in row-major order.
void write_metric(std::ostream & out, const ParamMetric & metric);

/// Diagonal kernel alpha / (2 P) with the delta function folded into quadrature.
struct DiagonalKernel
{
  ScalarField weights;
  double truncated_mass = 0.0;

  /// Integral of weights * a * b.
  double contract(const ScalarField & a, const ScalarField & b) const;
};

struct LineElement
{
  double value          = 0.0;
  double truncated_mass = 0.0;
};

/// gamma_jk = (alpha/2) * integral of d_j P d_k P / P.
ParamMetric fisher_metric_translation(const ScalarField & P, double alpha);

/// ds^2 = (alpha/2) * integral of deltaP^2 / P. deltaP must integrate to zero within 1e-9.
LineElement jeffreys_line_element(const ScalarField & P, const ScalarField & deltaP, double alpha);

/// Weights alpha / (2 P); zero at nodes. Works on unnormalized P.
DiagonalKernel metric_gPP(const ScalarField & P, double alpha);

/// g_jk = (2/alpha) * integral of P (d_j S d_k S + alpha^2 / (4 P^2) d_j P d_k P).
ParamMetric induced_param_metric(const EnsembleState & state);

}  // namespace geomq
