#include <doctest.h>

#include <cmath>
#include <numbers>

#include "geomq/grid.hpp"
#include "oracles.hpp"

using namespace geomq;
using std::numbers::pi;

namespace {

ScalarField sine(const GridSpec & g)
{
  const double L = g.extent(0);
  return ScalarField::from_function(g, [&](const Point & x) { return std::sin(2.0 * pi * x[0] / L); });
}

double max_error(const ScalarField & f, const std::function<double(double)> & exact)
{
  double m = 0.0;
  for (Index i = 0; i < f.size(); ++i) { m = std::max(m, std::abs(f[i] - exact(f.grid().coordinate(i, 0)))); }
  return m;
}

}  // namespace

TEST_CASE("grid layout is row-major with the last axis fastest")
{
  const GridSpec g({2.0, 3.0}, {8, 10}, Boundary::periodic, DerivativeScheme::central, {0.0, 0.0});
  CHECK(g.size() == 80);
  CHECK(g.stride(1) == 1);
  CHECK(g.stride(0) == 10);
  CHECK(g.cell_volume() == doctest::Approx(0.25 * 0.3));
  const auto m = g.multi_index(23);
  CHECK(m[0] == 2);
  CHECK(m[1] == 3);
  CHECK(g.linear_index(m) == 23);
  CHECK(g.coordinate(23, 0) == doctest::Approx(0.5));
  CHECK(g.coordinate(23, 1) == doctest::Approx(0.9));
}

TEST_CASE("grid construction rejects invalid shapes")
{
  CHECK_THROWS_AS(GridSpec({1.0}, {4}), GridError);
  CHECK_THROWS_AS(GridSpec({1.0, 1.0}, {8}), GridError);
  CHECK_THROWS_AS(GridSpec({-1.0}, {8}), GridError);
  CHECK_THROWS_AS(GridSpec({1, 1, 1, 1}, {8, 8, 8, 8}), GridError);
  CHECK_THROWS_AS(GridSpec::cube(4, 1.0, 8), GridError);
}

TEST_CASE("fields reject non-finite samples")
{
  const auto g = GridSpec::line(1.0, 8);
  Eigen::ArrayXd v = Eigen::ArrayXd::Zero(8);
  v(3) = std::nan("");
  CHECK_THROWS_AS(ScalarField(g, v), GridError);
  CHECK_THROWS_AS(ScalarField(g, Eigen::ArrayXd::Zero(7)), GridError);
  CHECK_THROWS_AS(integrate(g, v), GridError);
}

TEST_CASE("gradient of a constant vanishes and gradient axis is checked")
{
  for (auto scheme : {DerivativeScheme::central, DerivativeScheme::spectral}) {
    const auto g = GridSpec::cube(2, 4.0, 16, Boundary::periodic, scheme);
    const auto f = ScalarField::constant(g, 3.5);
    CHECK(gradient(f, 0).values().abs().maxCoeff() < 1e-13);
    CHECK(laplacian(f).values().abs().maxCoeff() < 1e-12);
    CHECK_THROWS_AS(gradient(f, 2), GridError);
    CHECK_THROWS_AS(gradient(f, -1), GridError);
  }
}

TEST_CASE("gradient of x is one away from the periodic seam")
{
  const auto g = GridSpec::line(10.0, 50);
  const auto f = ScalarField::from_function(g, [](const Point & x) { return x[0]; });
  const auto d = gradient(f, 0);
  for (Index i = 1; i + 1 < g.size(); ++i) { CHECK(d[i] == doctest::Approx(1.0).epsilon(1e-12)); }
}

TEST_CASE("central gradient matches a plain-loop stencil")
{
  const auto g = GridSpec::line(3.0, 24);
  const auto f = ScalarField::from_function(g, [](const Point & x) { return std::exp(std::sin(2.0 * pi * x[0] / 3.0)); });
  const std::vector<double> samples(f.values().begin(), f.values().end());
  const auto ref = oracle::central_diff(samples, g.spacing(0));
  const auto d   = gradient(f, 0);
  for (Index i = 0; i < g.size(); ++i) { CHECK(d[i] == doctest::Approx(ref[i]).epsilon(1e-13)); }
}

TEST_CASE("central derivatives of a sine converge at second order")
{
  double prev_grad = 0.0, prev_lap = 0.0;
  for (int n : {32, 64, 128, 256}) {
    const auto g   = GridSpec::line(2.0, n);
    const double k = 2.0 * pi / 2.0;
    const auto f   = sine(g);
    const double eg = max_error(gradient(f, 0), [&](double x) { return k * std::cos(k * x); });
    const double el = max_error(laplacian(f), [&](double x) { return -k * k * std::sin(k * x); });
    if (prev_grad > 0.0) {
      CHECK(std::log2(prev_grad / eg) > 1.95);
      CHECK(std::log2(prev_lap / el) > 1.95);
    }
    prev_grad = eg;
    prev_lap  = el;
  }
}

TEST_CASE("spectral derivatives of a sine are exact to rounding")
{
  const auto g   = GridSpec::line(2.0, 32, Boundary::periodic, DerivativeScheme::spectral);
  const double k = pi;
  const auto f   = sine(g);
  CHECK(max_error(gradient(f, 0), [&](double x) { return k * std::cos(k * x); }) < 1e-12);
  CHECK(max_error(laplacian(f), [&](double x) { return -k * k * std::sin(k * x); }) < 1e-11);
}

TEST_CASE("laplacian of x^2 is 2 in the interior of a vanishing grid")
{
  const auto g = GridSpec::line(4.0, 40, Boundary::vanishing);
  const auto f = ScalarField::from_function(g, [](const Point & x) { return x[0] * x[0]; });
  const auto l = laplacian(f);
  for (Index i = 1; i + 1 < g.size(); ++i) { CHECK(l[i] == doctest::Approx(2.0).epsilon(1e-10)); }
}

TEST_CASE("laplacian is the sum of per-axis second derivatives")
{
  const auto g = GridSpec::cube(2, 6.0, 24, Boundary::vanishing);
  const auto f = ScalarField::from_function(g, [](const Point & x) { return std::exp(-x[0] * x[0] - 0.5 * x[1] * x[1]); });
  const auto sum = second_derivative(f, 0) + second_derivative(f, 1);
  CHECK((laplacian(f).values() - sum.values()).abs().maxCoeff() < 1e-12);
}

TEST_CASE("integration: volume, normalized Gaussian, odd function")
{
  const auto g = GridSpec::cube(2, 3.0, 16);
  CHECK(integrate(ScalarField::constant(g, 1.0)) == doctest::Approx(9.0).epsilon(1e-14));

  const auto line = GridSpec::line(20.0, 400, Boundary::vanishing);
  const auto gauss = ScalarField::from_function(line, [](const Point & x) { return oracle::gaussian_pdf(x[0], 0.3, 1.1); });
  CHECK(std::abs(integrate(gauss) - 1.0) < 1e-8);

  const auto odd = ScalarField::from_function(line, [](const Point & x) { return x[0] * std::exp(-x[0] * x[0]); });
  CHECK(std::abs(integrate(odd)) < 1e-12);
}

TEST_CASE("translation by whole cells matches a shifted sample")
{
  const auto g = GridSpec::cube(2, 4.0, 8);
  Eigen::ArrayXd v(g.size());
  for (Index i = 0; i < g.size(); ++i) { v(i) = static_cast<double>(i); }
  const ScalarField f(g, v);
  const auto t = translate(f, {1, -2, 0});
  const auto m = g.multi_index(5);
  const Index src = g.linear_index({(m[0] + 1) % 8, (m[1] - 2 + 8) % 8, 0});
  CHECK(t[5] == f[src]);
  CHECK_THROWS_AS(translate(ScalarField(g.with_boundary(Boundary::vanishing), v), {1, 0, 0}), GridError);
}

TEST_CASE("fields on different grids do not mix")
{
  const auto a = ScalarField::constant(GridSpec::line(1.0, 8), 1.0);
  const auto b = ScalarField::constant(GridSpec::line(2.0, 8), 1.0);
  CHECK_THROWS_AS(a + b, GridError);
}
