#include "geomq/states.hpp"

#include <algorithm>
#include <numbers>
#include <stdexcept>

namespace geomq {

namespace {

constexpr double kPi = std::numbers::pi;

EnsembleState normalized(const GridSpec & grid, Eigen::ArrayXd P, Eigen::ArrayXd S, double alpha)
{
  P /= integrate(grid, P);
  return EnsembleState::make(ScalarField(grid, std::move(P)), ScalarField(grid, std::move(S)), alpha);
}

Eigen::ArrayXd linear_phase(const GridSpec & grid, const Point & p)
{
  Eigen::ArrayXd S = Eigen::ArrayXd::Zero(grid.size());
  for (int k = 0; k < grid.dim(); ++k) { S += p[k] * grid.coordinates(k); }
  return S;
}

double shortest_extent(const GridSpec & grid)
{
  double L = grid.extent(0);
  for (int k = 1; k < grid.dim(); ++k) { L = std::min(L, grid.extent(k)); }
  return L;
}

}  // namespace

EnsembleState gaussian_state(const GridSpec & grid, const Point & center, double sigma, const Point & momentum,
  double alpha)
{
  if (!(sigma > 0.0)) { throw StateError("sigma must be positive"); }
  Eigen::ArrayXd r2 = Eigen::ArrayXd::Zero(grid.size());
  for (int k = 0; k < grid.dim(); ++k) { r2 += (grid.coordinates(k) - center[k]).square(); }
  return normalized(grid, (-r2 / (2.0 * sigma * sigma)).exp(), linear_phase(grid, momentum), alpha);
}

EnsembleState periodized_gaussian_state(const GridSpec & grid, const Point & center, double sigma, double alpha)
{
  if (grid.boundary() != Boundary::periodic) { throw GridError("periodized Gaussian needs a periodic grid"); }
  if (!(sigma > 0.0)) { throw StateError("sigma must be positive"); }
  Eigen::ArrayXd amp = Eigen::ArrayXd::Ones(grid.size());
  for (int k = 0; k < grid.dim(); ++k) {
    const double L         = grid.extent(k);
    const int images       = 2 + static_cast<int>(std::ceil(12.0 * sigma / L));
    const Eigen::ArrayXd x = grid.coordinates(k);
    Eigen::ArrayXd sum     = Eigen::ArrayXd::Zero(grid.size());
    for (int n = -images; n <= images; ++n) {
      sum += (-(x - center[k] - n * L).square() / (4.0 * sigma * sigma)).exp();
    }
    amp *= sum;
  }
  return normalized(grid, amp.square(), Eigen::ArrayXd::Zero(grid.size()), alpha);
}

EnsembleState uniform_state(const GridSpec & grid, const Point & momentum, double alpha)
{
  return normalized(grid, Eigen::ArrayXd::Ones(grid.size()), linear_phase(grid, momentum), alpha);
}

EnsembleState random_compact_state(const GridSpec & grid, std::uint64_t seed, double alpha)
{
  Rng rng(seed);
  const int d    = grid.dim();
  const double w = shortest_extent(grid) / 20.0 * rng.uniform(0.95, 1.05);
  Point c{}, b{}, s{};
  for (int k = 0; k < d; ++k) {
    c[k] = grid.origin(k) + grid.extent(k) * (0.5 + rng.uniform(-0.02, 0.02));
    b[k] = rng.uniform(-1.0, 1.0) / d;
    s[k] = rng.uniform(-1.0, 1.0);
  }
  const double s0 = rng.uniform(-1.0, 1.0);

  Eigen::ArrayXd r2  = Eigen::ArrayXd::Zero(grid.size());
  Eigen::ArrayXd mod = Eigen::ArrayXd::Ones(grid.size());
  Eigen::ArrayXd lin = Eigen::ArrayXd::Constant(grid.size(), s0);
  for (int k = 0; k < d; ++k) {
    const Eigen::ArrayXd u = (grid.coordinates(k) - c[k]) / w;
    r2 += u.square();
    mod += 0.25 * b[k] * u.sin();
    lin += s[k] * u;
  }
  const Eigen::ArrayXd root = (-r2 / 4.0).exp() * mod;
  const Eigen::ArrayXd S    = 0.5 * alpha * (-r2 / (2.0 * 1.5 * 1.5)).exp() * lin;
  return normalized(grid, root.square(), S, alpha);
}

EnsembleState random_periodic_state(const GridSpec & grid, std::uint64_t seed, double alpha)
{
  Rng rng(seed);
  Eigen::ArrayXd logP = Eigen::ArrayXd::Zero(grid.size());
  Eigen::ArrayXd S    = Eigen::ArrayXd::Zero(grid.size());
  for (int k = 0; k < grid.dim(); ++k) {
    const Eigen::ArrayXd theta = 2.0 * kPi * (grid.coordinates(k) - grid.origin(k)) / grid.extent(k);
    for (int mode = 1; mode <= 2; ++mode) {
      const double scale = 0.5 / mode;
      logP += scale * (rng.uniform(-1.0, 1.0) * (mode * theta).cos() + rng.uniform(-1.0, 1.0) * (mode * theta).sin());
      S += alpha * scale * (rng.uniform(-1.0, 1.0) * (mode * theta).cos() + rng.uniform(-1.0, 1.0) * (mode * theta).sin());
    }
  }
  return normalized(grid, logP.exp(), S, alpha);
}

ComplexField random_complex_field(const GridSpec & grid, std::uint64_t seed)
{
  Rng rng(seed);
  const double w = shortest_extent(grid) / 10.0;
  Eigen::ArrayXd r2    = Eigen::ArrayXd::Zero(grid.size());
  Eigen::ArrayXd phase = Eigen::ArrayXd::Constant(grid.size(), rng.uniform(-kPi, kPi));
  Eigen::ArrayXd amp   = Eigen::ArrayXd::Constant(grid.size(), rng.uniform(0.5, 2.0));
  for (int k = 0; k < grid.dim(); ++k) {
    const double c         = grid.origin(k) + grid.extent(k) * rng.uniform(0.4, 0.6);
    const Eigen::ArrayXd u = (grid.coordinates(k) - c) / w;
    r2 += u.square();
    phase += rng.uniform(-2.0, 2.0) * u;
    amp += rng.uniform(-0.4, 0.4) * u.sin();
  }
  ComplexField::Values v(grid.size());
  const Eigen::ArrayXd env = (-r2 / 2.0).exp();
  for (Index i = 0; i < grid.size(); ++i) { v(i) = std::polar(amp(i) * env(i), phase(i)); }
  return ComplexField(grid, std::move(v));
}

}  // namespace geomq
