#include "geomq/kahler.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>

#include <ostream>
#include <stdexcept>

#include "geomq/csv.hpp"

namespace geomq {

RealBlock symplectic_block()
{
  RealBlock w;
  w << 0.0, 1.0, -1.0, 0.0;
  return w;
}

KahlerTriple build_general_triple(const ScalarField & P, const ScalarField & A, double alpha)
{
  detail::require_same_grid(P, A);
  if (!(alpha > 0.0)) { throw std::invalid_argument("alpha must be positive"); }
  const double eps = node_threshold(P);
  KahlerTriple t{P.grid(), alpha, A, {}, symplectic_block(), {}, {}};
  t.support.reserve(P.size());
  t.g.reserve(P.size());
  t.J.reserve(P.size());
  for (Index i = 0; i < P.size(); ++i) {
    const double p = P[i];
    if (!(p > eps)) { throw NodeError("Kahler blocks need P above the node threshold", i); }
    const double a   = A[i];
    const double gpp = alpha / (2.0 * p);
    const double gss = (2.0 * p / alpha) * (1.0 + a * a);
    RealBlock g, J;
    g << gpp, a, a, gss;
    J << a, gss, -gpp, -a;
    t.support.push_back(i);
    t.g.push_back(g);
    t.J.push_back(J);
  }
  return t;
}

BlockField<double> intermediate_J(const ScalarField & A, const ScalarField & C)
{
  detail::require_same_grid(A, C);
  BlockField<double> out;
  out.reserve(A.size());
  for (Index i = 0; i < A.size(); ++i) {
    const double a = A[i], c = C[i];
    if (c == 0.0) { throw std::domain_error("intermediate_J: C vanishes at index " + std::to_string(i)); }
    RealBlock J;
    J << a, c * (1.0 + a * a), -1.0 / c, -a;
    out.push_back(J);
  }
  return out;
}

std::string to_string(KahlerCondition c)
{
  switch (c) {
    case KahlerCondition::compatibility: return "omega_eq_gJ";
    case KahlerCondition::hermitian: return "JtgJ_eq_g";
    case KahlerCondition::complex_structure: return "JJ_eq_minus_I";
  }
  return "unknown";
}

double KahlerReport::max_residual() const
{
  double m = 0.0;
  for (const auto & r : rows) { m = std::max(m, r.max_residual); }
  return m;
}

const ConditionResidual & KahlerReport::operator[](KahlerCondition c) const
{
  for (const auto & r : rows) {
    if (r.condition == c) { return r; }
  }
  throw std::out_of_range("condition not in report");
}

namespace {

// Largest |err_cd| / scale_cd; entries with zero scale contribute |err_cd|.
double relative_max(const RealBlock & err, const RealBlock & scale)
{
  double m = 0.0;
  for (int r = 0; r < 2; ++r) {
    for (int c = 0; c < 2; ++c) {
      const double s = scale(r, c);
      m              = std::max(m, s > 0.0 ? err(r, c) / s : err(r, c));
    }
  }
  return m;
}

void update(ConditionResidual & row, double value, Index where)
{
  if (value > row.max_residual || row.location < 0) {
    row.max_residual = std::max(row.max_residual, value);
    row.location     = where;
  }
}

}  // namespace

template<typename Scalar>
KahlerReport verify_kahler(const BlockField<Scalar> & omega, const BlockField<Scalar> & g, const BlockField<Scalar> & J)
{
  if (omega.size() != g.size() || g.size() != J.size()) {
    throw std::invalid_argument("verify_kahler: block fields have different lengths");
  }
  using B = Block<Scalar>;
  ConditionResidual c12{KahlerCondition::compatibility, 0.0, -1};
  ConditionResidual c13{KahlerCondition::hermitian, 0.0, -1};
  ConditionResidual c14{KahlerCondition::complex_structure, 0.0, -1};
  const RealBlock I = RealBlock::Identity();
  for (std::size_t n = 0; n < g.size(); ++n) {
    const B & w = omega[n];
    const B & G = g[n];
    const B & j = J[n];
    const RealBlock aw = w.cwiseAbs(), ag = G.cwiseAbs(), aj = j.cwiseAbs();
    const Index at     = static_cast<Index>(n);

    const RealBlock e12 = (w - G * j).cwiseAbs();
    update(c12, relative_max(e12, ag * aj + aw), at);

    const RealBlock e13 = (j.transpose() * G * j - G).cwiseAbs();
    update(c13, relative_max(e13, aj.transpose() * ag * aj + ag), at);

    const RealBlock e14 = (j * j + B::Identity()).cwiseAbs();
    update(c14, relative_max(e14, aj * aj + I), at);
  }
  return KahlerReport{{c12, c13, c14}};
}

template KahlerReport verify_kahler(const BlockField<double> &, const BlockField<double> &, const BlockField<double> &);
template KahlerReport verify_kahler(const BlockField<Complex> &, const BlockField<Complex> &, const BlockField<Complex> &);

KahlerReport verify_kahler(const KahlerTriple & triple)
{
  const BlockField<double> omega(triple.g.size(), triple.omega);
  KahlerReport r = verify_kahler(omega, triple.g, triple.J);
  for (auto & row : r.rows) {
    if (row.location >= 0) { row.location = triple.support[row.location]; }
  }
  return r;
}

double complex_structure_residual(const BlockField<double> & J)
{
  double m = 0.0;
  for (const auto & j : J) {
    const RealBlock aj = j.cwiseAbs();
    m = std::max(m, relative_max((j * j + RealBlock::Identity()).cwiseAbs(), aj * aj + RealBlock::Identity()));
  }
  return m;
}

void write_kahler_report(std::ostream & out, const KahlerReport & report)
{
  csv::Table t({"condition", "max_residual", "location"});
  for (const auto & r : report.rows) {
    t.add_row({to_string(r.condition), csv::number(r.max_residual), std::to_string(r.location)});
  }
  t.write(out);
}

AppendixResult appendix_construct(const Eigen::MatrixXd & omega, const Eigen::MatrixXd & g)
{
  const Index n = omega.rows();
  if (n == 0 || omega.cols() != n || g.rows() != n || g.cols() != n) {
    throw KahlerError("appendix_construct: omega and g must be square and of equal size");
  }
  if (n % 2 != 0) { throw KahlerError("appendix_construct: dimension must be even"); }
  const double wscale = omega.cwiseAbs().maxCoeff();
  if ((omega + omega.transpose()).cwiseAbs().maxCoeff() > 1e-12 * wscale) {
    throw KahlerError("appendix_construct: omega is not antisymmetric");
  }
  Eigen::FullPivLU<Eigen::MatrixXd> lu(omega);
  lu.setThreshold(1e-12);
  if (wscale == 0.0 || lu.rank() < n) { throw KahlerError("appendix_construct: omega is degenerate"); }
  const double gscale = g.cwiseAbs().maxCoeff();
  if ((g - g.transpose()).cwiseAbs().maxCoeff() > 1e-12 * gscale) {
    throw KahlerError("appendix_construct: g is not symmetric");
  }
  Eigen::LLT<Eigen::MatrixXd> llt(g);
  if (llt.info() != Eigen::Success) { throw KahlerError("appendix_construct: g is not positive definite"); }

  AppendixResult r;
  r.j = llt.solve(omega);
  const Eigen::MatrixXd I = Eigen::MatrixXd::Identity(n, n);
  r.square_residual       = (r.j * r.j + I).cwiseAbs().maxCoeff();
  r.hermitian_residual    = (r.j.transpose() * g * r.j - g).cwiseAbs().maxCoeff() / gscale;
  return r;
}

ComplexBlock flat_omega(double alpha)
{
  ComplexBlock w;
  w << Complex(0.0), Complex(0.0, alpha), Complex(0.0, -alpha), Complex(0.0);
  return w;
}

ComplexBlock flat_metric(double alpha)
{
  ComplexBlock g;
  g << Complex(0.0), Complex(alpha), Complex(alpha), Complex(0.0);
  return g;
}

ComplexBlock flat_complex_structure()
{
  ComplexBlock j;
  j << Complex(0.0, -1.0), Complex(0.0), Complex(0.0), Complex(0.0, 1.0);
  return j;
}

namespace {

// d(psi, psi*) / d(P, S) at one point.
ComplexBlock madelung_jacobian(Complex psi, double P, double alpha)
{
  const Complex i(0.0, 1.0);
  ComplexBlock jac;
  jac << psi / (2.0 * P), i * psi / alpha, std::conj(psi) / (2.0 * P), -i * std::conj(psi) / alpha;
  return jac;
}

// d(P, S) / d(psi, psi*), the inverse of madelung_jacobian.
ComplexBlock madelung_jacobian_inverse(Complex psi, double P, double alpha)
{
  const Complex i(0.0, 1.0);
  ComplexBlock m;
  m << std::conj(psi), psi, -i * alpha * std::conj(psi) / (2.0 * P), i * alpha * psi / (2.0 * P);
  return m;
}

void require_support(const EnsembleState & state, const std::vector<Index> & support)
{
  const double eps = state.node_threshold();
  for (Index i : support) {
    if (!(state.P()[i] > eps)) { throw NodeError("complex coordinates are singular at a node", i); }
  }
}

}  // namespace

FlatBlocks to_complex_coordinates(const KahlerTriple & triple, const EnsembleState & state)
{
  if (triple.grid != state.grid()) { throw GridError("triple and state live on different grids"); }
  if ((triple.A.values() != 0.0).any()) { throw KahlerError("complex coordinates apply to the A = 0 triple only"); }
  require_support(state, triple.support);

  const double a      = triple.alpha;
  const ComplexField psi = madelung_forward(state);
  const ComplexBlock w_ref = flat_omega(a), g_ref = flat_metric(a), j_ref = flat_complex_structure();
  const ComplexBlock omega = triple.omega.cast<Complex>();

  FlatBlocks flat{triple.grid, a, triple.support, {}, {}, {}};
  for (std::size_t n = 0; n < triple.support.size(); ++n) {
    const Index i          = triple.support[n];
    const double P         = state.P()[i];
    const ComplexBlock jac = madelung_jacobian(psi[i], P, a);
    const ComplexBlock m   = madelung_jacobian_inverse(psi[i], P, a);
    const ComplexBlock wc  = m.transpose() * omega * m;
    const ComplexBlock gc  = m.transpose() * triple.g[n].cast<Complex>() * m;
    const ComplexBlock jc  = jac * triple.J[n].cast<Complex>() * m;
    const double dev = std::max({(wc - w_ref).cwiseAbs().maxCoeff() / a, (gc - g_ref).cwiseAbs().maxCoeff() / a,
      (jc - j_ref).cwiseAbs().maxCoeff()});
    if (dev > 1e-12) {
      throw KahlerError("complex-coordinate blocks depart from the flat form by " + csv::number(dev) + " at index "
                        + std::to_string(i));
    }
    flat.omega_c.push_back(wc);
    flat.g_c.push_back(gc);
    flat.J_c.push_back(jc);
  }
  return flat;
}

PSBlocks from_complex_coordinates(const FlatBlocks & flat, const EnsembleState & state)
{
  if (flat.grid != state.grid()) { throw GridError("blocks and state live on different grids"); }
  require_support(state, flat.support);
  const ComplexField psi = madelung_forward(state);
  PSBlocks out;
  for (std::size_t n = 0; n < flat.support.size(); ++n) {
    const Index i          = flat.support[n];
    const double P         = state.P()[i];
    const ComplexBlock jac = madelung_jacobian(psi[i], P, flat.alpha);
    const ComplexBlock m   = madelung_jacobian_inverse(psi[i], P, flat.alpha);
    out.omega.push_back((jac.transpose() * flat.omega_c[n] * jac).real());
    out.g.push_back((jac.transpose() * flat.g_c[n] * jac).real());
    out.J.push_back((m * flat.J_c[n] * jac).real());
  }
  return out;
}

}  // namespace geomq
