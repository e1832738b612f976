#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geomq/fields.hpp"
#include "geomq/states.hpp"
#include "oracles.hpp"

using namespace geomq;
using std::numbers::pi;

TEST_CASE("EnsembleState enforces positivity and normalization")
{
  const auto g = GridSpec::line(2.0, 16);
  const auto S = ScalarField::zero(g);
  CHECK_THROWS_AS(EnsembleState::make(ScalarField::constant(g, 0.7), S, 1.0), StateError);
  CHECK_THROWS_AS(EnsembleState::make(ScalarField::constant(g, 0.5), S, -1.0), StateError);
  Eigen::ArrayXd neg = Eigen::ArrayXd::Constant(16, 0.5);
  neg(4) = -1e-3;
  CHECK_THROWS_AS(EnsembleState::make(ScalarField(g, neg), S, 1.0), StateError);

  const auto s = EnsembleState::make(ScalarField::constant(g, 0.5 * (1.0 + 5e-7)), S, 1.0);
  CHECK(std::abs(integrate(s.P()) - 1.0) < 1e-14);
}

TEST_CASE("madelung_forward of the uniform state is 1/sqrt(V)")
{
  const auto g   = GridSpec::cube(2, 2.0, 8);
  const auto s   = uniform_state(g, {0.0, 0.0, 0.0}, 1.0);
  const auto psi = madelung_forward(s);
  for (Index i = 0; i < g.size(); ++i) { CHECK(std::abs(psi[i] - Complex(0.5, 0.0)) < 1e-15); }
}

TEST_CASE("madelung_forward of a Gaussian with S = p x is a plane-wave packet")
{
  const auto g       = GridSpec::line(16.0, 128, Boundary::vanishing);
  const double alpha = 0.6, p = 1.7, sigma = 1.2;
  const auto s       = gaussian_state(g, {0.4, 0.0, 0.0}, sigma, {p, 0.0, 0.0}, alpha);
  const auto psi     = madelung_forward(s);
  for (Index i = 0; i < g.size(); i += 7) {
    const double x = g.coordinate(i, 0);
    const oracle::cd ref = std::sqrt(s.P()[i]) * std::polar(1.0, p * x / alpha);
    CHECK(std::abs(psi[i] - ref) < 1e-14);
  }
  const Index top   = argmax(s.P());
  const double amp = std::sqrt(oracle::gaussian_pdf(g.coordinate(top, 0), 0.4, sigma));
  CHECK(std::abs(psi[top]) == doctest::Approx(amp).epsilon(1e-6));
}

TEST_CASE("madelung round trip recovers S up to a constant")
{
  const auto g = GridSpec::cube(2, 8.0, 32, Boundary::vanishing);
  const auto s = random_compact_state(g, 9, 0.8);
  const Index gp = argmax(s.P());
  const auto inv = madelung_inverse(madelung_forward(s), 0.8, gp);
  const double eps = s.node_threshold();
  const double shift = inv.state.S()[gp] - s.S()[gp];
  for (Index i = 0; i < g.size(); ++i) {
    CHECK(std::abs(inv.state.P()[i] - s.P()[i]) < 1e-14);
    if (s.P()[i] > eps) {
      CHECK(inv.defined(i));
      CHECK(std::abs(inv.state.S()[i] - s.S()[i] - shift) < 1e-10);
    }
  }
}

TEST_CASE("madelung_inverse of a constant psi")
{
  const auto g = GridSpec::line(4.0, 16);
  const auto psi = ComplexField::constant(g, Complex(0.5, 0.0));
  const auto inv = madelung_inverse(psi, 1.0, 3);
  CHECK(inv.state.P().values().isApproxToConstant(0.25));
  CHECK(inv.state.S().values().abs().maxCoeff() < 1e-15);
  CHECK(inv.defined.all());
}

TEST_CASE("madelung_inverse reports the winding of a periodic phase")
{
  const double L = 5.0, alpha = 0.9;
  const auto g   = GridSpec::line(L, 64);
  const auto psi = ComplexField::from_function(g, [&](const Point & x) {
    return std::polar(1.0 / std::sqrt(L), 2.0 * pi * x[0] / L);
  });
  const auto inv = madelung_inverse(psi, alpha, 0);
  CHECK(inv.winding[0] == 1);
  for (Index i = 0; i < g.size(); ++i) {
    const double expected = alpha * 2.0 * pi * (g.coordinate(i, 0) - g.coordinate(0, 0)) / L + alpha * std::arg(psi[0]);
    CHECK(inv.state.S()[i] == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("madelung_inverse fails when a node cuts the unwrapping path")
{
  const auto g = GridSpec::line(4.0, 16, Boundary::vanishing);
  Eigen::ArrayXcd v = Eigen::ArrayXcd::Constant(16, Complex(0.5, 0.0));
  v(8) = 0.0;
  const ComplexField psi(g, v);
  CHECK_THROWS_AS(madelung_inverse(psi, 1.0, 2), NodeError);
  CHECK_THROWS_AS(madelung_inverse(psi, 1.0, 8), NodeError);

  // wrap-around links are not followed, so a periodic grid is cut the same way
  CHECK_THROWS_AS(madelung_inverse(ComplexField(g.with_boundary(Boundary::periodic), v), 1.0, 2), NodeError);

  Eigen::ArrayXcd edge = Eigen::ArrayXcd::Constant(16, Complex(std::sqrt(4.0 / 15.0), 0.0));
  edge(15) = 0.0;
  const auto inv = madelung_inverse(ComplexField(g, edge), 1.0, 2);
  CHECK_FALSE(inv.defined(15));
  CHECK(inv.defined.head(15).all());
  CHECK(inv.state.S()[15] == 0.0);
}

TEST_CASE("node threshold and support mask")
{
  const auto g = GridSpec::line(1.0, 8);
  Eigen::ArrayXd p = Eigen::ArrayXd::Constant(8, 1.0);
  p(2) = 1e-13;
  p(3) = 2e-12;
  const ScalarField P(g, p);
  CHECK(node_threshold(P) == doctest::Approx(1e-12));
  const auto m = support_mask(P);
  CHECK_FALSE(m(2));
  CHECK(m(3));
  CHECK(m.count() == 7);
}
