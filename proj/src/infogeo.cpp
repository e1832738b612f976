#include "geomq/infogeo.hpp"

#include <Eigen/Eigenvalues>

#include <ostream>
#include <vector>

#include "geomq/csv.hpp"

namespace geomq {

double ParamMetric::min_eigenvalue() const
{
  if (entries.size() == 0) { return 0.0; }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(entries, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff();
}

void write_metric(std::ostream & out, const ParamMetric & metric)
{
  csv::Table t({"j", "k", "value"});
  for (int j = 0; j < metric.dim(); ++j) {
    for (int k = 0; k < metric.dim(); ++k) {
      t.add_row({std::to_string(j), std::to_string(k), csv::number(metric.entries(j, k))});
    }
  }
  t.write(out);
}

double DiagonalKernel::contract(const ScalarField & a, const ScalarField & b) const
{
  detail::require_same_grid(weights, a);
  detail::require_same_grid(weights, b);
  return integrate(weights.grid(), weights.values() * a.values() * b.values());
}

DiagonalKernel metric_gPP(const ScalarField & P, double alpha)
{
  const auto mask = support_mask(P);
  Eigen::ArrayXd w = Eigen::ArrayXd::Zero(P.size());
  double dropped   = 0.0;
  for (Index i = 0; i < P.size(); ++i) {
    if (mask(i)) {
      w(i) = alpha / (2.0 * P[i]);
    } else {
      dropped += P[i];
    }
  }
  return {ScalarField(P.grid(), std::move(w)), dropped * P.grid().cell_volume()};
}

ParamMetric fisher_metric_translation(const ScalarField & P, double alpha)
{
  const int n            = P.grid().dim();
  const DiagonalKernel K = metric_gPP(P, alpha);
  std::vector<ScalarField> dP;
  for (int j = 0; j < n; ++j) { dP.push_back(gradient(P, j)); }

  ParamMetric g{Eigen::MatrixXd::Zero(n, n), K.truncated_mass};
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      g.entries(j, k) = K.contract(dP[j], dP[k]);
      g.entries(k, j) = g.entries(j, k);
    }
  }
  return g;
}

LineElement jeffreys_line_element(const ScalarField & P, const ScalarField & deltaP, double alpha)
{
  const double drift = integrate(deltaP);
  if (std::abs(drift) > 1e-9) {
    throw StateError("perturbation does not preserve normalization (integral " + csv::number(drift) + ")");
  }
  const DiagonalKernel K = metric_gPP(P, alpha);
  return {K.contract(deltaP, deltaP), K.truncated_mass};
}

ParamMetric induced_param_metric(const EnsembleState & state)
{
  const int n    = state.grid().dim();
  ParamMetric g  = fisher_metric_translation(state.P(), state.alpha());
  std::vector<ScalarField> dS;
  for (int j = 0; j < n; ++j) { dS.push_back(gradient(state.S(), j)); }
  const double c = 2.0 / state.alpha();
  for (int j = 0; j < n; ++j) {
    for (int k = j; k < n; ++k) {
      const double kinetic = c * integrate(state.grid(), state.P().values() * dS[j].values() * dS[k].values());
      g.entries(j, k) += kinetic;
      if (k != j) { g.entries(k, j) = g.entries(j, k); }
    }
  }
  return g;
}

}  // namespace geomq
