#pragma once

#include "geomq/grid.hpp"

namespace geomq {

/**
 * @brief <phi|psi>, conjugate-linear in phi.
 *
 * Evaluated as (1 / 2 alpha) integral of (phi, phi*) [g_c + i Omega_c] (psi, psi*)^T
 * with the flat blocks, and cross-checked against integral of conj(phi) psi.
 * Throws SolverError if the two disagree by more than 1e-12 relative to
 * ||phi|| ||psi||, GridError if the grids differ.
 */
Complex dirac_product(const ComplexField & phi, const ComplexField & psi, double alpha);

/// sqrt(Re <psi|psi>).
double norm(const ComplexField & psi, double alpha);

}  // namespace geomq
