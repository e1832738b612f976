#include "geomq/fields.hpp"

#include <deque>
#include <numbers>

namespace geomq {

double node_threshold(const ScalarField & P)
{
  return kNodeRatio * P.values().maxCoeff();
}

Eigen::Array<bool, Eigen::Dynamic, 1> support_mask(const ScalarField & P)
{
  const double eps = node_threshold(P);
  return P.values() >= eps;
}

EnsembleState::EnsembleState(ScalarField P, ScalarField S, double alpha)
    : P_(std::move(P)), S_(std::move(S)), alpha_(alpha)
{}

EnsembleState EnsembleState::unchecked(ScalarField P, ScalarField S, double alpha)
{
  detail::require_same_grid(P, S);
  if (!(alpha > 0.0) || !std::isfinite(alpha)) { throw StateError("alpha must be positive"); }
  return EnsembleState(std::move(P), std::move(S), alpha);
}

EnsembleState EnsembleState::make(ScalarField P, ScalarField S, double alpha)
{
  if ((P.values() < 0.0).any()) { throw StateError("P has negative samples"); }
  const double mass = integrate(P);
  if (std::abs(mass - 1.0) >= kRenormalizeWindow) {
    throw StateError("P integrates to " + std::to_string(mass) + ", too far from 1 to renormalize");
  }
  if (mass != 1.0) { P = P.with_values(P.values() / mass); }
  return unchecked(std::move(P), std::move(S), alpha);
}

ComplexField madelung_forward(const EnsembleState & state)
{
  const auto & P   = state.P().values();
  const auto & S   = state.S().values();
  const double a   = state.alpha();
  ComplexField::Values psi(P.size());
  for (Index i = 0; i < P.size(); ++i) { psi(i) = std::polar(std::sqrt(P(i)), S(i) / a); }
  return ComplexField(state.grid(), std::move(psi));
}

namespace {

double wrap_phase(double d)
{
  constexpr double two_pi = 2.0 * std::numbers::pi;
  d = std::remainder(d, two_pi);
  return d;
}

}  // namespace

MadelungInverse madelung_inverse(const ComplexField & psi, double alpha, Index gauge_point)
{
  const GridSpec & grid = psi.grid();
  if (!(alpha > 0.0)) { throw StateError("alpha must be positive"); }
  if (gauge_point < 0 || gauge_point >= grid.size()) { throw GridError("gauge point outside grid"); }

  const Eigen::ArrayXd P  = psi.values().abs2();
  const double eps        = kNodeRatio * P.maxCoeff();
  const Eigen::Array<bool, Eigen::Dynamic, 1> above = P >= eps;
  if (!above(gauge_point)) { throw NodeError("gauge point is a node of psi", gauge_point); }

  Eigen::ArrayXd arg(grid.size());
  for (Index i = 0; i < grid.size(); ++i) { arg(i) = std::arg(psi.values()(i)); }

  Eigen::ArrayXd phase                        = Eigen::ArrayXd::Zero(grid.size());
  Eigen::Array<bool, Eigen::Dynamic, 1> seen = Eigen::Array<bool, Eigen::Dynamic, 1>::Constant(grid.size(), false);
  std::deque<Index> queue{gauge_point};
  phase(gauge_point) = arg(gauge_point);
  seen(gauge_point)  = true;
  while (!queue.empty()) {
    const Index c = queue.front();
    queue.pop_front();
    const auto m = grid.multi_index(c);
    for (int k = 0; k < grid.dim(); ++k) {
      for (int dir : {-1, +1}) {
        const int j = m[k] + dir;
        if (j < 0 || j >= grid.points(k)) { continue; }
        const Index n = c + dir * grid.stride(k);
        if (seen(n) || !above(n)) { continue; }
        phase(n) = phase(c) + wrap_phase(arg(n) - arg(c));
        seen(n)  = true;
        queue.push_back(n);
      }
    }
  }

  for (Index i = 0; i < grid.size(); ++i) {
    if (above(i) && !seen(i)) { throw NodeError("unwrapping path from the gauge point crosses a node", i); }
  }

  MadelungInverse out{EnsembleState::make(ScalarField(grid, P), ScalarField(grid, alpha * phase), alpha), above, {0, 0, 0}};

  if (grid.boundary() == Boundary::periodic) {
    const auto g = grid.multi_index(gauge_point);
    for (int k = 0; k < grid.dim(); ++k) {
      auto first = g, last = g;
      first[k]       = 0;
      last[k]        = grid.points(k) - 1;
      const Index i0 = grid.linear_index(first);
      const Index i1 = grid.linear_index(last);
      if (!above(i0) || !above(i1)) { continue; }
      const double across = phase(i1) + wrap_phase(arg(i0) - arg(i1)) - phase(i0);
      out.winding[k]      = static_cast<int>(std::lround(across / (2.0 * std::numbers::pi)));
    }
  }
  return out;
}

Index argmax(const ScalarField & f)
{
  Index i = 0;
  f.values().maxCoeff(&i);
  return i;
}

}  // namespace geomq
