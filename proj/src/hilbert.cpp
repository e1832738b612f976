#include "geomq/hilbert.hpp"

#include <stdexcept>

#include "geomq/csv.hpp"
#include "geomq/kahler.hpp"

namespace geomq {

Complex dirac_product(const ComplexField & phi, const ComplexField & psi, double alpha)
{
  detail::require_same_grid(phi, psi);
  if (!(alpha > 0.0)) { throw std::invalid_argument("alpha must be positive"); }
  const GridSpec & grid  = phi.grid();
  const ComplexBlock k   = flat_metric(alpha) + Complex(0.0, 1.0) * flat_omega(alpha);
  const auto & a         = phi.values();
  const auto & b         = psi.values();

  Complex contracted(0.0);
  for (Index i = 0; i < grid.size(); ++i) {
    const Eigen::RowVector2cd left(a(i), std::conj(a(i)));
    const Eigen::Vector2cd right(b(i), std::conj(b(i)));
    contracted += (left * k * right)(0, 0);
  }
  contracted *= grid.cell_volume() / (2.0 * alpha);

  const Complex direct = grid.cell_volume() * (a.conjugate() * b).sum();
  const double scale   = grid.cell_volume() * std::sqrt(a.abs2().sum() * b.abs2().sum());
  if (std::abs(contracted - direct) > 1e-12 * std::max(scale, 1e-300)) {
    throw SolverError("Dirac product routes disagree by " + csv::number(std::abs(contracted - direct)));
  }
  return contracted;
}

double norm(const ComplexField & psi, double alpha)
{
  const Complex n = dirac_product(psi, psi, alpha);
  return std::sqrt(std::max(n.real(), 0.0));
}

}  // namespace geomq
