#pragma once

#include <array>
#include <vector>

#include "geomq/grid.hpp"

namespace geomq {

/// Relative cutoff below which P counts as a node: P < kNodeRatio * max(P).
inline constexpr double kNodeRatio = 1e-12;

/// Absolute node threshold for a density.
double node_threshold(const ScalarField & P);

/// Mask of points with P at or above the node threshold.
Eigen::Array<bool, Eigen::Dynamic, 1> support_mask(const ScalarField & P);

/**
 * @brief The canonical pair (P, S) together with the constant alpha.
 *
 * `make` enforces P >= 0 and unit mass: a state whose mass is within 1e-6 of
 * one is renormalized, anything further off is rejected. `unchecked` skips
 * both rules and is meant for evaluating functionals away from the
 * normalized surface (finite-difference probes, P -> lambda P).
 */
class EnsembleState
{
public:
  static constexpr double kRenormalizeWindow = 1e-6;

  static EnsembleState make(ScalarField P, ScalarField S, double alpha);
  static EnsembleState unchecked(ScalarField P, ScalarField S, double alpha);

  const ScalarField & P() const noexcept { return P_; }
  const ScalarField & S() const noexcept { return S_; }
  double alpha() const noexcept { return alpha_; }
  const GridSpec & grid() const noexcept { return P_.grid(); }

  EnsembleState with_P(ScalarField P) const { return unchecked(std::move(P), S_, alpha_); }
  EnsembleState with_S(ScalarField S) const { return unchecked(P_, std::move(S), alpha_); }

  double node_threshold() const { return geomq::node_threshold(P_); }

private:
  EnsembleState(ScalarField P, ScalarField S, double alpha);

  ScalarField P_;
  ScalarField S_;
  double alpha_;
};

/// psi = sqrt(P) exp(i S / alpha), pointwise.
ComplexField madelung_forward(const EnsembleState & state);

struct MadelungInverse
{
  EnsembleState state;
  /// False at nodes (|psi|^2 below threshold); S is set to 0 there and carries no meaning.
  Eigen::Array<bool, Eigen::Dynamic, 1> defined;
  /// Net phase winding (in units of 2 pi) across the wrap of each periodic
  /// axis, measured on the grid line through the gauge point. Zero for
  /// vanishing axes.
  std::array<int, 3> winding{0, 0, 0};
};

/**
 * @brief Recover (P, S) from psi.
 *
 * The phase is unwrapped breadth-first from `gauge_point` along grid axes
 * (neighbors visited axis by axis, minus side first). Wrap-around links of
 * periodic axes are not traversed; the phase jump across them is reported
 * as `winding`. S(gauge_point) = alpha * arg psi(gauge_point).
 *
 * Throws NodeError if the gauge point is a node or if some point above the
 * node threshold cannot be reached without crossing a node.
 */
MadelungInverse madelung_inverse(const ComplexField & psi, double alpha, Index gauge_point);

/// Index of the largest sample (first one on ties).
Index argmax(const ScalarField & f);

}  // namespace geomq
