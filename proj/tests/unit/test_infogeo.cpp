#include <doctest.h>

#include <cmath>

#include "geomq/dynamics.hpp"
#include "geomq/infogeo.hpp"
#include "geomq/states.hpp"
#include "oracles.hpp"

using namespace geomq;

namespace {

GridSpec vanishing_line(int n = 512, double L = 24.0)
{
  return GridSpec::line(L, n, Boundary::vanishing, DerivativeScheme::spectral);
}

}  // namespace

TEST_CASE("Fisher metric of a uniform density vanishes")
{
  const auto s = uniform_state(GridSpec::cube(2, 3.0, 16), {0.0, 0.0, 0.0}, 1.0);
  const auto gamma = fisher_metric_translation(s.P(), 1.0);
  CHECK(gamma.entries.cwiseAbs().maxCoeff() < 1e-12);
  CHECK(gamma.truncated_mass == 0.0);
}

TEST_CASE("Fisher metric of a unit Gaussian with alpha = 2 is one")
{
  const auto s = gaussian_state(vanishing_line(), {0.0, 0.0, 0.0}, 1.0, {0.0, 0.0, 0.0}, 2.0);
  const auto gamma = fisher_metric_translation(s.P(), 2.0);
  CHECK(std::abs(gamma.entries(0, 0) - 1.0) < 1e-6);
  CHECK(std::abs(gamma.entries(0, 0) - oracle::gaussian_fisher(2.0, 1.0)) < 1e-6);
}

TEST_CASE("Fisher metric is unchanged by translating P")
{
  const auto g = GridSpec::cube(2, 16.0, 64, Boundary::periodic, DerivativeScheme::spectral);
  const auto s = random_compact_state(g.with_boundary(Boundary::vanishing), 4, 1.0);
  const ScalarField P(g, s.P().values());
  const auto a = fisher_metric_translation(P, 1.0);
  const auto b = fisher_metric_translation(translate(P, {5, -3, 0}), 1.0);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() < 1e-8 * a.entries.cwiseAbs().maxCoeff());
}

TEST_CASE("line element of a translation perturbation contracts the Fisher metric")
{
  const auto g = GridSpec::cube(2, 16.0, 64, Boundary::vanishing, DerivativeScheme::spectral);
  const auto s = random_compact_state(g, 12, 1.3);
  const auto gamma = fisher_metric_translation(s.P(), 1.3);
  CHECK(gamma.is_psd());
  Eigen::VectorXd delta(2);
  delta << 1e-3, -2e-3;
  const auto dP = delta(0) * gradient(s.P(), 0) + delta(1) * gradient(s.P(), 1);
  const double ds2 = jeffreys_line_element(s.P(), dP, 1.3).value;
  CHECK(std::abs(ds2 - gamma.contract(delta)) < 1e-8 * gamma.contract(delta));
  CHECK(jeffreys_line_element(s.P(), ScalarField::zero(g), 1.3).value == 0.0);
}

TEST_CASE("line element of a scale perturbation gives the scale-family Fisher value")
{
  // d/dsigma of a Gaussian: p (u^2 - 1) / sigma with u = x / sigma; Fisher information 2 / sigma^2.
  const double sigma = 1.3, alpha = 1.0, h = 1.0;
  const auto g = vanishing_line();
  const auto s = gaussian_state(g, {0.0, 0.0, 0.0}, sigma, {0.0, 0.0, 0.0}, alpha);
  const auto dP = ScalarField::from_function(g, [&](const Point & x) {
    const double u = x[0] / sigma;
    return h * oracle::gaussian_pdf(x[0], 0.0, sigma) * (u * u - 1.0) / sigma;
  });
  const double ds2 = jeffreys_line_element(s.P(), dP, alpha).value;
  CHECK(ds2 == doctest::Approx(0.5 * alpha * 2.0 / (sigma * sigma) * h * h).epsilon(1e-8));
}

TEST_CASE("line element rejects perturbations that change the mass")
{
  const auto s = uniform_state(GridSpec::line(2.0, 16), {0.0, 0.0, 0.0}, 1.0);
  CHECK_THROWS_AS(jeffreys_line_element(s.P(), ScalarField::constant(s.grid(), 1e-3), 1.0), StateError);
}

TEST_CASE("metric_gPP weights and contraction")
{
  const auto g = GridSpec::line(4.0, 16);
  const auto s = uniform_state(g, {0.0, 0.0, 0.0}, 1.5);
  const auto k = metric_gPP(s.P(), 1.5);
  CHECK(k.weights.values().isApproxToConstant(1.5 * 4.0 / 2.0));

  const auto lambda = metric_gPP(3.0 * s.P(), 1.5);
  CHECK((lambda.weights.values() * 3.0 - k.weights.values()).abs().maxCoeff() < 1e-14);

  const auto dP = ScalarField::from_function(g, [](const Point & x) { return std::sin(3.14159265358979 * x[0] / 2.0); });
  CHECK(k.contract(dP, dP) == doctest::Approx(jeffreys_line_element(s.P(), dP, 1.5).value).epsilon(1e-15));
}

TEST_CASE("nodes are dropped and their mass reported")
{
  const auto g = GridSpec::line(4.0, 16);
  Eigen::ArrayXd p = Eigen::ArrayXd::Constant(16, 0.25);
  p(5) = 0.0;
  const ScalarField P(g, p * 16.0 / 15.0);
  const auto gamma = fisher_metric_translation(P, 1.0);
  CHECK(std::isfinite(gamma.entries(0, 0)));
  CHECK(gamma.truncated_mass == 0.0);
  CHECK(metric_gPP(P, 1.0).weights[5] == 0.0);
}

TEST_CASE("induced metric with S = 0 equals the Fisher metric")
{
  const auto g = GridSpec::cube(2, 16.0, 48, Boundary::vanishing, DerivativeScheme::spectral);
  const auto s = gaussian_state(g, {0.3, -0.2, 0.0}, 1.1, {0.0, 0.0, 0.0}, 0.7);
  const auto a = induced_param_metric(s);
  const auto b = fisher_metric_translation(s.P(), 0.7);
  CHECK((a.entries - b.entries).cwiseAbs().maxCoeff() < 1e-10 * b.entries.cwiseAbs().maxCoeff());
}

TEST_CASE("induced metric of a plane wave is (2/alpha) p p^T")
{
  const auto g       = GridSpec::cube(2, 4.0, 32, Boundary::vanishing);
  const double alpha = 0.5;
  const Point p{0.8, -1.2, 0.0};
  const auto s = EnsembleState::make(ScalarField::constant(g, 1.0 / 16.0),
    ScalarField::from_function(g, [&](const Point & x) { return p[0] * x[0] + p[1] * x[1]; }), alpha);
  const auto a = induced_param_metric(s);
  for (int j = 0; j < 2; ++j) {
    for (int k = 0; k < 2; ++k) { CHECK(a.entries(j, k) == doctest::Approx(2.0 / alpha * p[j] * p[k]).epsilon(1e-12)); }
  }
}

TEST_CASE("trace identity: (alpha/4m) trace g equals the quantum Hamiltonian")
{
  const auto g = GridSpec::cube(2, 16.0, 64, Boundary::vanishing, DerivativeScheme::spectral);
  for (std::uint64_t seed : {1u, 2u, 3u}) {
    const auto s = random_compact_state(g, seed, 0.9);
    const double m = 1.7;
    const double H = free_particle_hamiltonian(s, m);
    CHECK(std::abs(0.9 / (4.0 * m) * induced_param_metric(s).trace() - H) < 1e-10 * std::abs(H));
  }
}
