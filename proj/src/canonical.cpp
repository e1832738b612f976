#include "geomq/canonical.hpp"

#include <ostream>
#include <stdexcept>

#include "geomq/csv.hpp"
#include "geomq/dynamics.hpp"

namespace geomq {

std::string to_string(HamiltonianKind kind)
{
  return kind == HamiltonianKind::quantum_free ? "quantum_free" : "classical_free";
}

double poisson_bracket(const Observable & F, const Observable & G, const EnsembleState & state)
{
  const ScalarField fP = F.dFdP(state), fS = F.dFdS(state);
  const ScalarField gP = G.dFdP(state), gS = G.dFdS(state);
  return integrate(state.grid(), fP.values() * gS.values() - fS.values() * gP.values());
}

double bracket_scale(const Observable & F, const Observable & G, const EnsembleState & state)
{
  const ScalarField fP = F.dFdP(state), fS = F.dFdS(state);
  const ScalarField gP = G.dFdP(state), gS = G.dFdS(state);
  return integrate(state.grid(), (fP.values() * gS.values()).abs() + (fS.values() * gP.values()).abs());
}

ScalarField numeric_variational_derivative(const Functional & F, const EnsembleState & state, Conjugate which)
{
  const ScalarField & base = which == Conjugate::P ? state.P() : state.S();
  const double scale       = base.values().abs().maxCoeff();
  const double h           = 1e-6 * (scale > 0.0 ? scale : 1.0);
  const double dV          = state.grid().cell_volume();

  Eigen::ArrayXd probe = base.values();
  Eigen::ArrayXd out(base.size());
  auto eval = [&]() {
    ScalarField f(state.grid(), probe);
    const EnsembleState s = which == Conjugate::P ? state.with_P(std::move(f)) : state.with_S(std::move(f));
    const double v = F(s);
    if (!std::isfinite(v)) { throw std::domain_error("functional is not finite at a probe state"); }
    return v;
  };
  for (Index i = 0; i < base.size(); ++i) {
    const double x0 = probe(i);
    probe(i)        = x0 + h;
    const double up = eval();
    probe(i)        = x0 - h;
    const double dn = eval();
    probe(i)        = x0;
    out(i)          = (up - dn) / (2.0 * h * dV);
  }
  return ScalarField(state.grid(), std::move(out));
}

Observable numeric_observable(std::string name, Functional value, bool homogeneous)
{
  Observable o;
  o.name        = std::move(name);
  o.value       = value;
  o.dFdP        = [value](const EnsembleState & s) { return numeric_variational_derivative(value, s, Conjugate::P); };
  o.dFdS        = [value](const EnsembleState & s) { return numeric_variational_derivative(value, s, Conjugate::S); };
  o.analytic    = false;
  o.homogeneous = homogeneous;
  return o;
}

Observable bracket_observable(const Observable & F, const Observable & G)
{
  return numeric_observable("{" + F.name + "," + G.name + "}",
    [F, G](const EnsembleState & s) { return poisson_bracket(F, G, s); });
}

namespace observables {

namespace {

const char * axis_name(int axis)
{
  static const char * names[] = {"x", "y", "z"};
  return names[axis];
}

void require_axis(const GridSpec & grid, int axis)
{
  if (axis < 0 || axis >= grid.dim()) { throw GridError("observable axis not present on this grid"); }
}

// (j, k) such that (axis, j, k) is a cyclic permutation of (0, 1, 2).
std::pair<int, int> cyclic_pair(int axis)
{
  return {(axis + 1) % 3, (axis + 2) % 3};
}

}  // namespace

Observable normalization()
{
  Observable o;
  o.name  = "N";
  o.value = [](const EnsembleState & s) { return integrate(s.P()); };
  o.dFdP  = [](const EnsembleState & s) { return ScalarField::constant(s.grid(), 1.0); };
  o.dFdS  = [](const EnsembleState & s) { return ScalarField::zero(s.grid()); };
  return o;
}

Observable squared_normalization()
{
  Observable o;
  o.name  = "N^2";
  o.value = [](const EnsembleState & s) {
    const double n = integrate(s.P());
    return n * n;
  };
  o.dFdP = [](const EnsembleState & s) { return ScalarField::constant(s.grid(), 2.0 * integrate(s.P())); };
  o.dFdS = [](const EnsembleState & s) { return ScalarField::zero(s.grid()); };
  o.homogeneous = false;
  return o;
}

Observable position(int axis)
{
  Observable o;
  o.name  = std::string("Q") + axis_name(axis);
  o.value = [axis](const EnsembleState & s) {
    require_axis(s.grid(), axis);
    return integrate(s.grid(), s.P().values() * s.grid().coordinates(axis));
  };
  o.dFdP = [axis](const EnsembleState & s) {
    require_axis(s.grid(), axis);
    return ScalarField(s.grid(), s.grid().coordinates(axis));
  };
  o.dFdS = [](const EnsembleState & s) { return ScalarField::zero(s.grid()); };
  return o;
}

Observable momentum(int axis)
{
  Observable o;
  o.name  = std::string("A") + axis_name(axis);
  o.value = [axis](const EnsembleState & s) {
    return integrate(s.grid(), s.P().values() * gradient(s.S(), axis).values());
  };
  o.dFdP = [axis](const EnsembleState & s) { return gradient(s.S(), axis); };
  o.dFdS = [axis](const EnsembleState & s) { return -gradient(s.P(), axis); };
  return o;
}

Observable angular_momentum(int axis)
{
  const auto [j, k] = cyclic_pair(axis);
  Observable o;
  o.name = std::string("L") + axis_name(axis);
  // density x_j d_k S - x_k d_j S
  auto density = [j, k](const EnsembleState & s) {
    require_axis(s.grid(), j);
    require_axis(s.grid(), k);
    return Eigen::ArrayXd(s.grid().coordinates(j) * gradient(s.S(), k).values()
                          - s.grid().coordinates(k) * gradient(s.S(), j).values());
  };
  o.value = [density](const EnsembleState & s) { return integrate(s.grid(), s.P().values() * density(s)); };
  o.dFdP  = [density](const EnsembleState & s) { return ScalarField(s.grid(), density(s)); };
  // d_k(x_j P) = x_j d_k P because x_j does not vary along axis k.
  o.dFdS = [j, k](const EnsembleState & s) {
    require_axis(s.grid(), j);
    require_axis(s.grid(), k);
    return ScalarField(s.grid(), s.grid().coordinates(k) * gradient(s.P(), j).values()
                                   - s.grid().coordinates(j) * gradient(s.P(), k).values());
  };
  return o;
}

Observable boost(int axis, double mass, double time)
{
  Observable o;
  o.name  = std::string("G") + axis_name(axis);
  o.value = [axis, mass, time, Q = position(axis), A = momentum(axis)](const EnsembleState & s) {
    const double q = Q.value(s);
    return time == 0.0 ? mass * q : mass * q - time * A.value(s);
  };
  o.dFdP = [axis, mass, time](const EnsembleState & s) {
    require_axis(s.grid(), axis);
    return ScalarField(s.grid(), mass * s.grid().coordinates(axis) - time * gradient(s.S(), axis).values());
  };
  o.dFdS = [axis, time](const EnsembleState & s) { return time * gradient(s.P(), axis); };
  return o;
}

}  // namespace observables

GeneratorSet build_galilean_generators(int dim, double mass, double time, HamiltonianKind kind)
{
  if (!(mass > 0.0)) { throw std::invalid_argument("mass must be positive"); }
  if (dim < 1 || dim > 3) { throw std::invalid_argument("dimension must be 1, 2 or 3"); }
  GeneratorSet gen{{}, {}, {}, {}, hamiltonian_observable(kind, mass), mass, time, dim};
  for (int i = 0; i < dim; ++i) {
    gen.A[i] = observables::momentum(i);
    gen.G[i] = observables::boost(i, mass, time);
    gen.Q[i] = observables::position(i);
  }
  for (int i = 0; i < 3; ++i) {
    const int j = (i + 1) % 3, k = (i + 2) % 3;
    if (j < dim && k < dim) { gen.L[i] = observables::angular_momentum(i); }
  }
  return gen;
}

namespace {

int levi_civita(int i, int j, int k)
{
  if (i == j || j == k || i == k) { return 0; }
  return ((j - i + 3) % 3 == 1) ? 1 : -1;
}

// Value and variational derivatives of one generator, evaluated once per state.
struct Evaluated
{
  double value = 0.0;
  Eigen::ArrayXd dP;
  Eigen::ArrayXd dS;
};

using EvaluatedSet = std::array<std::optional<Evaluated>, 3>;

Evaluated evaluate(const Observable & F, const EnsembleState & state)
{
  return {F.value(state), F.dFdP(state).values(), F.dFdS(state).values()};
}

EvaluatedSet evaluate(const std::array<std::optional<Observable>, 3> & X, const EnsembleState & state)
{
  EvaluatedSet out;
  for (int i = 0; i < 3; ++i) {
    if (X[i]) { out[i] = evaluate(*X[i], state); }
  }
  return out;
}

struct Relations
{
  const EnsembleState & state;
  AlgebraReport & report;

  void add(const std::string & name, const Evaluated & F, const Evaluated & G, double rhs)
  {
    const GridSpec & grid = state.grid();
    RelationResidual r;
    r.relation     = name;
    r.lhs          = integrate(grid, F.dP * G.dS - F.dS * G.dP);
    r.rhs          = rhs;
    r.residual     = std::abs(r.lhs - r.rhs);
    const double s = std::max(integrate(grid, (F.dP * G.dS).abs() + (F.dS * G.dP).abs()), std::abs(rhs));
    r.relative     = s > 0.0 ? r.residual / s : 0.0;
    report.max_residual = std::max(report.max_residual, r.residual);
    report.max_relative = std::max(report.max_relative, r.relative);
    report.rows.push_back(std::move(r));
  }

  // {X_i, Y_j} = eps_ijk Z_k over every pair present; the rhs needs Z_k unless it vanishes.
  void epsilon_family(const char * x, const EvaluatedSet & X, const char * y, const EvaluatedSet & Y,
    const EvaluatedSet & Z)
  {
    for (int i = 0; i < 3; ++i) {
      for (int j = 0; j < 3; ++j) {
        if (!X[i] || !Y[j]) { continue; }
        double rhs = 0.0;
        if (i != j) {
          const int k = 3 - i - j;
          if (!Z[k]) { continue; }
          rhs = levi_civita(i, j, k) * Z[k]->value;
        }
        add(label(x, i, y, j), *X[i], *Y[j], rhs);
      }
    }
  }

  static std::string label(const char * a, int i, const char * b, int j)
  {
    static const char * xyz[] = {"x", "y", "z"};
    return std::string("{") + a + xyz[i] + "," + b + xyz[j] + "}";
  }
};

}  // namespace

AlgebraReport galilean_algebra_residual(const GeneratorSet & gen, const EnsembleState & state)
{
  static const char * xyz[] = {"x", "y", "z"};
  const Evaluated H     = evaluate(gen.H, state);
  const EvaluatedSet A  = evaluate(gen.A, state);
  const EvaluatedSet L  = evaluate(gen.L, state);
  const EvaluatedSet G  = evaluate(gen.G, state);

  AlgebraReport report;
  Relations rel{state, report};
  for (int i = 0; i < 3; ++i) {
    if (A[i]) { rel.add(std::string("{H,A") + xyz[i] + "}", H, *A[i], 0.0); }
  }
  for (int i = 0; i < 3; ++i) {
    if (L[i]) { rel.add(std::string("{H,L") + xyz[i] + "}", H, *L[i], 0.0); }
  }
  for (int i = 0; i < 3; ++i) {
    if (G[i] && A[i]) { rel.add(std::string("{H,G") + xyz[i] + "}", H, *G[i], -A[i]->value); }
  }
  rel.epsilon_family("L", L, "A", A, A);
  rel.epsilon_family("L", L, "L", L, L);
  rel.epsilon_family("L", L, "G", G, G);
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (A[i] && A[j]) { rel.add(Relations::label("A", i, "A", j), *A[i], *A[j], 0.0); }
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (A[i] && G[j]) { rel.add(Relations::label("A", i, "G", j), *A[i], *G[j], i == j ? -gen.mass : 0.0); }
    }
  }
  for (int i = 0; i < 3; ++i) {
    for (int j = 0; j < 3; ++j) {
      if (G[i] && G[j]) { rel.add(Relations::label("G", i, "G", j), *G[i], *G[j], 0.0); }
    }
  }
  return report;
}

void write_algebra_report(std::ostream & out, const AlgebraReport & report)
{
  csv::Table t({"relation", "lhs", "rhs", "residual", "relative"});
  for (const auto & r : report.rows) {
    t.add_row({r.relation, csv::number(r.lhs), csv::number(r.rhs), csv::number(r.residual), csv::number(r.relative)});
  }
  t.write(out);
}

EnsembleState apply_generator(const Observable & gen, const EnsembleState & state, double epsilon)
{
  if (epsilon == 0.0) { return state; }
  Eigen::ArrayXd P = state.P().values() + epsilon * gen.dFdS(state).values();
  Eigen::ArrayXd S = state.S().values() - epsilon * gen.dFdP(state).values();
  for (Index i = 0; i < P.size(); ++i) {
    if (P(i) < -1e-12) { throw PositivityError("generator step drives P negative at index " + std::to_string(i)); }
    if (P(i) < 0.0) { P(i) = 0.0; }
  }
  return EnsembleState::make(ScalarField(state.grid(), std::move(P)), ScalarField(state.grid(), std::move(S)),
    state.alpha());
}

HomogeneityReport homogeneity_check(const Observable & F, const EnsembleState & state, double lambda, double tol)
{
  if (!(lambda > 0.0)) { throw std::invalid_argument("lambda must be positive"); }
  HomogeneityReport r;
  const double base   = F.value(state);
  const double scaled = F.value(state.with_P(lambda * state.P()));
  r.residual          = std::abs(scaled - lambda * base);
  const double ref    = std::abs(lambda * base);
  r.relative          = ref > 0.0 ? r.residual / ref : r.residual;
  r.homogeneous       = r.relative <= tol;
  if (F.homogeneous) {
    const double density = integrate(state.grid(), state.P().values() * F.dFdP(state).values());
    r.density_residual   = std::abs(base - density);
    r.density_relative   = std::abs(base) > 0.0 ? *r.density_residual / std::abs(base) : *r.density_residual;
  }
  return r;
}

double gauge_residual(const Observable & F, const EnsembleState & state, double c)
{
  const ScalarField shifted = state.S().with_values(state.S().values() + c);
  return std::abs(F.value(state.with_S(shifted)) - F.value(state));
}

}  // namespace geomq
