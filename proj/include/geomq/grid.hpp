#pragma once

#include <Eigen/Core>

#include <array>
#include <cmath>
#include <complex>
#include <string>
#include <type_traits>
#include <vector>

#include "geomq/errors.hpp"

namespace geomq {

using Index = Eigen::Index;
using Complex = std::complex<double>;
using Point = std::array<double, 3>;

enum class Boundary { periodic, vanishing };

/// How gradient and laplacian are discretized.
///
/// `central` is second-order finite differences (one-sided at the edges of a
/// vanishing grid). `spectral` differentiates the Fourier series of the
/// periodic extension; on a vanishing grid this is only meaningful for
/// fields that decay to zero well inside the box.
enum class DerivativeScheme { central, spectral };

std::string to_string(Boundary b);
std::string to_string(DerivativeScheme s);

/**
 * @brief Uniform box in 1 to 3 dimensions.
 *
 * Points along axis k sit at x_k = origin_k + i * L_k / N_k, i = 0..N_k-1.
 * Samples are stored row-major: the last axis varies fastest, so linear
 * index order is lexicographic order of the multi-index.
 */
class GridSpec
{
public:
  GridSpec(std::vector<double> extents,
    std::vector<int> points,
    Boundary boundary             = Boundary::periodic,
    DerivativeScheme scheme       = DerivativeScheme::central,
    std::vector<double> origin    = {});

  /// Centered 1D box [-L/2, L/2).
  static GridSpec line(double extent, int points, Boundary boundary = Boundary::periodic,
    DerivativeScheme scheme = DerivativeScheme::central);
  /// Centered cube with equal extent and point count on every axis.
  static GridSpec cube(int dim, double extent, int points, Boundary boundary = Boundary::periodic,
    DerivativeScheme scheme = DerivativeScheme::central);

  int dim() const noexcept { return static_cast<int>(points_.size()); }
  double extent(int axis) const { return extents_.at(axis); }
  int points(int axis) const { return points_.at(axis); }
  double origin(int axis) const { return origin_.at(axis); }
  double spacing(int axis) const { return extents_.at(axis) / points_.at(axis); }
  double cell_volume() const noexcept { return cell_volume_; }
  double volume() const noexcept;
  Index size() const noexcept { return size_; }
  Boundary boundary() const noexcept { return boundary_; }
  DerivativeScheme scheme() const noexcept { return scheme_; }

  /// Distance between consecutive linear indices along `axis`.
  Index stride(int axis) const;
  std::array<int, 3> multi_index(Index linear) const;
  Index linear_index(const std::array<int, 3> & multi) const;
  double coordinate(Index linear, int axis) const;
  Point point(Index linear) const;
  /// x_axis evaluated at every grid point.
  Eigen::ArrayXd coordinates(int axis) const;

  GridSpec with_scheme(DerivativeScheme scheme) const;
  GridSpec with_boundary(Boundary boundary) const;

  bool operator==(const GridSpec & other) const;
  bool operator!=(const GridSpec & other) const { return !(*this == other); }

private:
  std::vector<double> extents_;
  std::vector<int> points_;
  std::vector<double> origin_;
  Boundary boundary_;
  DerivativeScheme scheme_;
  Index size_{0};
  double cell_volume_{0};
};

namespace detail {

template<typename Scalar>
bool all_finite(const Eigen::Array<Scalar, Eigen::Dynamic, 1> & v)
{
  if constexpr (std::is_same_v<Scalar, Complex>) {
    return v.real().allFinite() && v.imag().allFinite();
  } else {
    return v.allFinite();
  }
}

}  // namespace detail

/**
 * @brief Immutable samples of a real or complex field on a grid.
 *
 * Every sample is finite; construction rejects anything else.
 */
template<typename _Scalar>
class Field
{
public:
  using Scalar = _Scalar;
  using Values = Eigen::Array<Scalar, Eigen::Dynamic, 1>;

  Field(GridSpec grid, Values values) : grid_(std::move(grid)), values_(std::move(values))
  {
    if (values_.size() != grid_.size()) { throw GridError("field sample count does not match grid size"); }
    if (!detail::all_finite(values_)) { throw GridError("field contains non-finite samples"); }
  }

  static Field constant(const GridSpec & grid, Scalar c) { return Field(grid, Values::Constant(grid.size(), c)); }

  static Field zero(const GridSpec & grid) { return constant(grid, Scalar(0)); }

  /// Samples f(x) at every grid point; f receives the point's coordinates.
  template<typename F>
  static Field from_function(const GridSpec & grid, F && f)
  {
    Values v(grid.size());
    for (Index i = 0; i < grid.size(); ++i) { v(i) = static_cast<Scalar>(f(grid.point(i))); }
    return Field(grid, std::move(v));
  }

  const GridSpec & grid() const noexcept { return grid_; }
  const Values & values() const noexcept { return values_; }
  Index size() const noexcept { return values_.size(); }
  Scalar operator[](Index i) const { return values_(i); }

  /// New field on the same grid.
  Field with_values(Values values) const { return Field(grid_, std::move(values)); }

private:
  GridSpec grid_;
  Values values_;
};

using ScalarField  = Field<double>;
using ComplexField = Field<Complex>;

namespace detail {

template<typename A, typename B>
void require_same_grid(const Field<A> & a, const Field<B> & b)
{
  if (a.grid() != b.grid()) { throw GridError("fields live on different grids"); }
}

}  // namespace detail

template<typename Scalar>
Field<Scalar> operator+(const Field<Scalar> & a, const Field<Scalar> & b)
{
  detail::require_same_grid(a, b);
  return a.with_values(a.values() + b.values());
}

template<typename Scalar>
Field<Scalar> operator-(const Field<Scalar> & a, const Field<Scalar> & b)
{
  detail::require_same_grid(a, b);
  return a.with_values(a.values() - b.values());
}

/// Pointwise product.
template<typename Scalar>
Field<Scalar> operator*(const Field<Scalar> & a, const Field<Scalar> & b)
{
  detail::require_same_grid(a, b);
  return a.with_values(a.values() * b.values());
}

template<typename Scalar>
Field<Scalar> operator*(Scalar c, const Field<Scalar> & a)
{
  return a.with_values(c * a.values());
}

template<typename Scalar>
Field<Scalar> operator-(const Field<Scalar> & a)
{
  return a.with_values(-a.values());
}

/// Second-order approximation of d f / d x_axis (scheme taken from the grid).
template<typename Scalar>
Field<Scalar> gradient(const Field<Scalar> & f, int axis);

/// Sum over axes of the second derivative.
///
/// Central scheme: three-point stencil; on a vanishing grid the samples
/// beyond the edge are taken as zero (Dirichlet closure).
template<typename Scalar>
Field<Scalar> laplacian(const Field<Scalar> & f);

/// Second derivative along a single axis, same closure as `laplacian`.
template<typename Scalar>
Field<Scalar> second_derivative(const Field<Scalar> & f, int axis);

/// Cell-volume weighted sum of the samples. Throws GridError on non-finite input.
template<typename Scalar>
Scalar integrate(const Field<Scalar> & f);

/// Same quadrature as `integrate`, applied to a bare sample array.
double integrate(const GridSpec & grid, const Eigen::ArrayXd & values);

/**
 * @brief Shift a field by whole cells on a periodic grid: out(x) = f(x + shift * dx).
 */
template<typename Scalar>
Field<Scalar> translate(const Field<Scalar> & f, const std::array<int, 3> & shift);

}  // namespace geomq
