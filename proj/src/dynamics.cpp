#include "geomq/dynamics.hpp"
#include "geomq/csv.hpp"
#include "geomq/infogeo.hpp"

#include <Eigen/SparseCore>
#include <Eigen/SparseLU>
#include <unsupported/Eigen/FFT>

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace geomq {

std::string to_string(Integrator integrator)
{
  return integrator == Integrator::rk4_PS ? "rk4_PS" : "crank_nicolson_psi";
}

double EvolutionConfig::max_stable_dt(const GridSpec & grid) const
{
  double h = grid.spacing(0);
  for (int k = 1; k < grid.dim(); ++k) { h = std::min(h, grid.spacing(k)); }
  return cfl * mass * h * h / alpha;
}

void EvolutionConfig::validate(const GridSpec & grid) const
{
  if (!(mass > 0.0) || !std::isfinite(mass)) { throw std::invalid_argument("mass must be positive"); }
  if (!(alpha > 0.0) || !std::isfinite(alpha)) { throw std::invalid_argument("alpha must be positive"); }
  if (!(dt > 0.0) || !std::isfinite(dt)) { throw std::invalid_argument("dt must be positive"); }
  if (steps < 0) { throw std::invalid_argument("steps must be non-negative"); }
  if (save_every < 1) { throw std::invalid_argument("save_every must be at least 1"); }
  if (!(cfl > 0.0)) { throw std::invalid_argument("cfl must be positive"); }
  if (integrator == Integrator::crank_nicolson_psi && hamiltonian != HamiltonianKind::quantum_free) {
    throw std::invalid_argument("crank_nicolson_psi evolves the quantum Hamiltonian only");
  }
  if (integrator == Integrator::rk4_PS && dt > max_stable_dt(grid) * (1.0 + 1e-12)) {
    throw std::invalid_argument("dt " + std::to_string(dt) + " exceeds the stability bound "
                                + std::to_string(max_stable_dt(grid)));
  }
}

namespace {

Eigen::ArrayXd squared_gradient(const ScalarField & f)
{
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(f.size());
  for (int k = 0; k < f.grid().dim(); ++k) { acc += gradient(f, k).values().square(); }
  return acc;
}

// -(1/m) div(P grad S)
Eigen::ArrayXd continuity_rate(const EnsembleState & s, double mass)
{
  Eigen::ArrayXd acc = Eigen::ArrayXd::Zero(s.grid().size());
  for (int k = 0; k < s.grid().dim(); ++k) {
    const ScalarField flux = s.P() * gradient(s.S(), k);
    acc += gradient(flux, k).values();
  }
  return -acc / mass;
}

// lap(sqrt P) / sqrt P, zero where P is below the node threshold.
Eigen::ArrayXd quantum_potential(const ScalarField & P, bool throw_at_nodes)
{
  const auto mask = support_mask(P);
  if (throw_at_nodes) {
    for (Index i = 0; i < P.size(); ++i) {
      if (!mask(i)) { throw NodeError("quantum potential evaluated at a node", i); }
    }
  }
  const ScalarField root = P.with_values(P.values().max(0.0).sqrt());
  const Eigen::ArrayXd lap = laplacian(root).values();
  Eigen::ArrayXd q = Eigen::ArrayXd::Zero(P.size());
  for (Index i = 0; i < P.size(); ++i) {
    if (mask(i)) { q(i) = lap(i) / root[i]; }
  }
  return q;
}

}  // namespace

double classical_hamiltonian(const EnsembleState & state, double mass)
{
  return integrate(state.grid(), state.P().values() * squared_gradient(state.S())) / (2.0 * mass);
}

double free_particle_hamiltonian(const EnsembleState & state, double mass)
{
  const DiagonalKernel K = metric_gPP(state.P(), state.alpha());
  double fisher          = 0.0;
  for (int k = 0; k < state.grid().dim(); ++k) {
    const ScalarField dP = gradient(state.P(), k);
    fisher += K.contract(dP, dP);
  }
  // K carries alpha / 2P, so (alpha / 2) * fisher = (alpha^2 / 4) * integral |grad P|^2 / P.
  return classical_hamiltonian(state, mass) + state.alpha() * fisher / (4.0 * mass);
}

double wave_kinetic_energy(const ComplexField & psi, double alpha, double mass)
{
  double acc = 0.0;
  for (int k = 0; k < psi.grid().dim(); ++k) {
    acc += integrate(psi.grid(), gradient(psi, k).values().abs2());
  }
  return alpha * alpha * acc / (2.0 * mass);
}

Observable hamiltonian_observable(HamiltonianKind kind, double mass)
{
  Observable o;
  o.name = "H";
  if (kind == HamiltonianKind::quantum_free) {
    o.value = [mass](const EnsembleState & s) { return free_particle_hamiltonian(s, mass); };
    o.dFdP  = [mass](const EnsembleState & s) {
      const double a = s.alpha();
      return ScalarField(s.grid(),
        (squared_gradient(s.S()) - a * a * quantum_potential(s.P(), false)) / (2.0 * mass));
    };
  } else {
    o.value = [mass](const EnsembleState & s) { return classical_hamiltonian(s, mass); };
    o.dFdP  = [mass](const EnsembleState & s) { return ScalarField(s.grid(), squared_gradient(s.S()) / (2.0 * mass)); };
  }
  o.dFdS = [mass](const EnsembleState & s) { return ScalarField(s.grid(), continuity_rate(s, mass)); };
  return o;
}

Rates equations_of_motion(const EnsembleState & state, const EvolutionConfig & config)
{
  const double m     = config.mass;
  Eigen::ArrayXd Sdot = -squared_gradient(state.S()) / (2.0 * m);
  if (config.hamiltonian == HamiltonianKind::quantum_free) {
    const double a = state.alpha();
    Sdot += a * a * quantum_potential(state.P(), true) / (2.0 * m);
  }
  return {ScalarField(state.grid(), continuity_rate(state, m)), ScalarField(state.grid(), std::move(Sdot))};
}

double mean_position(const ScalarField & P, int axis)
{
  const GridSpec & g = P.grid();
  return integrate(g, P.values() * g.coordinates(axis)) / integrate(P);
}

double rms_width(const ScalarField & P, int axis)
{
  const GridSpec & g    = P.grid();
  const double mu       = mean_position(P, axis);
  const Eigen::ArrayXd d = g.coordinates(axis) - mu;
  return std::sqrt(integrate(g, P.values() * d.square()) / integrate(P));
}

ConservedRow conserved_quantities(double t, const EnsembleState & state, const EvolutionConfig & config)
{
  ConservedRow row;
  row.t    = t;
  row.norm = integrate(state.P());
  row.H    = config.hamiltonian == HamiltonianKind::quantum_free ? free_particle_hamiltonian(state, config.mass)
                                                                 : classical_hamiltonian(state, config.mass);
  for (int k = 0; k < state.grid().dim(); ++k) {
    row.A[k] = integrate(state.grid(), state.P().values() * gradient(state.S(), k).values());
  }
  row.sigma = rms_width(state.P(), 0);
  return row;
}

namespace {

// Same quantities read directly off psi: norm, (alpha^2/2m) integral |grad psi|^2, alpha Im integral psi* d_k psi.
ConservedRow conserved_from_psi(double t, const ComplexField & psi, const EvolutionConfig & config)
{
  const GridSpec & g = psi.grid();
  ConservedRow row;
  row.t    = t;
  row.norm = integrate(g, psi.values().abs2());
  row.H    = wave_kinetic_energy(psi, config.alpha, config.mass);
  for (int k = 0; k < g.dim(); ++k) {
    const ComplexField d = gradient(psi, k);
    row.A[k]             = config.alpha * integrate(g, (psi.values().conjugate() * d.values()).imag());
  }
  row.sigma = rms_width(ScalarField(g, psi.values().abs2()), 0);
  return row;
}

struct Stage
{
  Eigen::ArrayXd P;
  Eigen::ArrayXd S;
};

Stage rates_at(const GridSpec & grid, const Eigen::ArrayXd & P, const Eigen::ArrayXd & S, double alpha,
  const EvolutionConfig & config)
{
  const auto s = EnsembleState::unchecked(ScalarField(grid, P), ScalarField(grid, S), alpha);
  Rates r      = equations_of_motion(s, config);
  return {r.Pdot.values(), r.Sdot.values()};
}

// Tiny negative samples (below the node threshold in magnitude) are clamped;
// anything larger means the scheme has broken positivity.
void clamp_negative(Eigen::ArrayXd & P)
{
  const double eps = kNodeRatio * P.maxCoeff();
  for (Index i = 0; i < P.size(); ++i) {
    if (P(i) < 0.0) {
      if (P(i) < -eps) { throw PositivityError("rk4_PS step drives P negative at index " + std::to_string(i)); }
      P(i) = 0.0;
    }
  }
}

bool is_save_step(int step, const EvolutionConfig & config)
{
  return step % config.save_every == 0 || step == config.steps;
}

Trajectory evolve_rk4(const EnsembleState & state, const EvolutionConfig & config)
{
  const GridSpec & grid = state.grid();
  const double a        = state.alpha();
  const double dt       = config.dt;
  Trajectory traj;
  traj.times.push_back(0.0);
  traj.states.push_back(state);
  traj.conserved.push_back(conserved_quantities(0.0, state, config));

  Eigen::ArrayXd P = state.P().values();
  Eigen::ArrayXd S = state.S().values();
  double worst     = 0.0;
  for (int step = 1; step <= config.steps; ++step) {
    const Stage k1 = rates_at(grid, P, S, a, config);
    const Stage k2 = rates_at(grid, P + 0.5 * dt * k1.P, S + 0.5 * dt * k1.S, a, config);
    const Stage k3 = rates_at(grid, P + 0.5 * dt * k2.P, S + 0.5 * dt * k2.S, a, config);
    const Stage k4 = rates_at(grid, P + dt * k3.P, S + dt * k3.S, a, config);
    P += dt / 6.0 * (k1.P + 2.0 * k2.P + 2.0 * k3.P + k4.P);
    S += dt / 6.0 * (k1.S + 2.0 * k2.S + 2.0 * k3.S + k4.S);
    clamp_negative(P);
    const double mass = integrate(grid, P);
    worst             = std::max(worst, std::abs(mass - 1.0));
    P /= mass;

    if (is_save_step(step, config)) {
      const double t = step * dt;
      auto s         = EnsembleState::make(ScalarField(grid, P), ScalarField(grid, S), a);
      traj.times.push_back(t);
      traj.conserved.push_back(conserved_quantities(t, s, config));
      traj.states.push_back(std::move(s));
    }
  }
  traj.renormalization_rate = worst / dt;
  return traj;
}

// Discrete Laplacian as a sparse matrix, matching the central closure of `laplacian`.
Eigen::SparseMatrix<Complex> central_laplacian_matrix(const GridSpec & grid)
{
  std::vector<Eigen::Triplet<Complex>> entries;
  const bool periodic = grid.boundary() == Boundary::periodic;
  for (Index i = 0; i < grid.size(); ++i) {
    const auto m = grid.multi_index(i);
    for (int k = 0; k < grid.dim(); ++k) {
      const double w = 1.0 / (grid.spacing(k) * grid.spacing(k));
      const int n    = grid.points(k);
      entries.emplace_back(i, i, -2.0 * w);
      for (int dir : {-1, +1}) {
        auto nb = m;
        nb[k] += dir;
        if (nb[k] < 0 || nb[k] >= n) {
          if (!periodic) { continue; }
          nb[k] = (nb[k] + n) % n;
        }
        entries.emplace_back(i, grid.linear_index(nb), w);
      }
    }
  }
  Eigen::SparseMatrix<Complex> L(grid.size(), grid.size());
  L.setFromTriplets(entries.begin(), entries.end());
  return L;
}

// Multi-dimensional DFT applied axis by axis.
void transform_all_axes(const GridSpec & grid, Eigen::ArrayXcd & v, bool forward)
{
  Eigen::FFT<double> fft;
  std::vector<Complex> line, out;
  for (int k = 0; k < grid.dim(); ++k) {
    const Index s     = grid.stride(k);
    const int n       = grid.points(k);
    const Index block = s * n;
    line.resize(n);
    for (Index outer = 0; outer < grid.size(); outer += block) {
      for (Index inner = 0; inner < s; ++inner) {
        const Index base = outer + inner;
        for (int i = 0; i < n; ++i) { line[i] = v(base + i * s); }
        if (forward) {
          fft.fwd(out, line);
        } else {
          fft.inv(out, line);
        }
        for (int i = 0; i < n; ++i) { v(base + i * s) = out[i]; }
      }
    }
  }
}

// Sum over axes of k^2 for every mode, in the layout produced by transform_all_axes.
Eigen::ArrayXd wavenumber_squared(const GridSpec & grid)
{
  Eigen::ArrayXd k2 = Eigen::ArrayXd::Zero(grid.size());
  for (Index i = 0; i < grid.size(); ++i) {
    const auto m = grid.multi_index(i);
    for (int k = 0; k < grid.dim(); ++k) {
      const int n        = grid.points(k);
      const int signed_j = (m[k] <= n / 2) ? m[k] : m[k] - n;
      const double kk    = 2.0 * std::numbers::pi / grid.extent(k) * signed_j;
      k2(i) += kk * kk;
    }
  }
  return k2;
}

void record_psi(Trajectory & traj, double t, ComplexField psi, double alpha, const EvolutionConfig & config)
{
  const ScalarField P(psi.grid(), psi.values().abs2());
  auto inv = madelung_inverse(psi, alpha, argmax(P));
  traj.times.push_back(t);
  traj.conserved.push_back(conserved_from_psi(t, psi, config));
  traj.states.push_back(std::move(inv.state));
  traj.psi.push_back(std::move(psi));
}

// Advances psi through every step, calling save(step, psi) at save steps.
template<typename Save>
void crank_nicolson_steps(const ComplexField & psi0, const EvolutionConfig & config, Save && save)
{
  const GridSpec & grid = psi0.grid();
  const double dt       = config.dt;
  if (config.steps == 0) { return; }

  // i alpha dpsi/dt = -(alpha^2 / 2m) lap psi, i.e. dpsi/dt = -i K psi with K = -(alpha / 2m) lap.
  const double c = config.alpha / (2.0 * config.mass);
  if (grid.scheme() == DerivativeScheme::spectral) {
    const Eigen::ArrayXcd omega = (c * wavenumber_squared(grid)).cast<Complex>();
    const Complex half(0.0, 0.5 * dt);
    const Eigen::ArrayXcd mult = (1.0 - half * omega) / (1.0 + half * omega);
    Eigen::ArrayXcd spectrum   = psi0.values();
    transform_all_axes(grid, spectrum, true);
    for (int step = 1; step <= config.steps; ++step) {
      spectrum *= mult;
      if (is_save_step(step, config)) {
        Eigen::ArrayXcd v = spectrum;
        transform_all_axes(grid, v, false);
        save(step, ComplexField(grid, std::move(v)));
      }
    }
    return;
  }

  const Eigen::SparseMatrix<Complex> K = (-c) * central_laplacian_matrix(grid);
  Eigen::SparseMatrix<Complex> I(grid.size(), grid.size());
  I.setIdentity();
  const Complex half(0.0, 0.5 * dt);
  const Eigen::SparseMatrix<Complex> lhs = I + half * K;
  const Eigen::SparseMatrix<Complex> rhs = I - half * K;
  Eigen::SparseLU<Eigen::SparseMatrix<Complex>> lu;
  lu.compute(lhs);
  if (lu.info() != Eigen::Success) { throw SolverError("Crank-Nicolson factorization failed"); }

  Eigen::VectorXcd v = psi0.values().matrix();
  for (int step = 1; step <= config.steps; ++step) {
    v = lu.solve(rhs * v);
    if (lu.info() != Eigen::Success) { throw SolverError("Crank-Nicolson solve failed"); }
    if (is_save_step(step, config)) { save(step, ComplexField(grid, v.array())); }
  }
}

Trajectory evolve_crank_nicolson(const EnsembleState & state, const EvolutionConfig & config)
{
  Trajectory traj;
  const ComplexField psi = madelung_forward(state);
  traj.times.push_back(0.0);
  traj.states.push_back(state);
  traj.conserved.push_back(conserved_from_psi(0.0, psi, config));
  traj.psi.push_back(psi);
  crank_nicolson_steps(psi, config, [&](int step, ComplexField f) {
    record_psi(traj, step * config.dt, std::move(f), state.alpha(), config);
  });
  return traj;
}

}  // namespace

Trajectory evolve(const EnsembleState & state, const EvolutionConfig & config)
{
  config.validate(state.grid());
  if (std::abs(state.alpha() - config.alpha) > 1e-15 * config.alpha) {
    throw std::invalid_argument("state alpha differs from the configured alpha");
  }
  if (config.integrator == Integrator::rk4_PS) { return evolve_rk4(state, config); }
  return evolve_crank_nicolson(state, config);
}

WaveTrajectory evolve_wavefunction(const ComplexField & psi, const EvolutionConfig & config)
{
  EvolutionConfig c = config;
  c.integrator      = Integrator::crank_nicolson_psi;
  c.hamiltonian     = HamiltonianKind::quantum_free;
  c.validate(psi.grid());
  WaveTrajectory traj{{0.0}, {psi}};
  crank_nicolson_steps(psi, c, [&](int step, ComplexField f) {
    traj.times.push_back(step * c.dt);
    traj.psi.push_back(std::move(f));
  });
  return traj;
}

void write_conserved(std::ostream & out, const std::vector<ConservedRow> & rows)
{
  csv::Table t({"t", "norm", "H", "Ax", "Ay", "Az", "sigma"});
  for (const auto & r : rows) { t.add_row(std::vector<double>{r.t, r.norm, r.H, r.A[0], r.A[1], r.A[2], r.sigma}); }
  t.write(out);
}

CrossValidation cross_validate(const EnsembleState & state, const EvolutionConfig & config, double horizon)
{
  CrossValidation out;
  if (config.hamiltonian != HamiltonianKind::quantum_free) {
    out.applicable = false;
    return out;
  }
  if (!(horizon >= 0.0)) { throw std::invalid_argument("horizon must be non-negative"); }
  const double floor = 1e-6 * state.P().values().maxCoeff();
  if (state.P().values().minCoeff() < floor) {
    throw NodeError("cross-validation needs a node-free initial state (min P >= 1e-6 max P)");
  }

  EvolutionConfig direct = config;
  direct.steps           = static_cast<int>(std::lround(horizon / config.dt));
  direct.integrator      = Integrator::rk4_PS;
  EvolutionConfig oracle = direct;
  oracle.integrator      = Integrator::crank_nicolson_psi;

  out.direct = evolve(state, direct);
  out.oracle = evolve(state, oracle);

  const GridSpec & g = state.grid();
  for (std::size_t i = 0; i < out.direct.times.size(); ++i) {
    const EnsembleState & d = out.direct.states[i];
    const EnsembleState & o = out.oracle.states[i];
    DiscrepancyRow row;
    row.t                = out.direct.times[i];
    row.P_L1             = integrate(g, (d.P().values() - o.P().values()).abs());
    const Eigen::ArrayXd dS = d.S().values() - o.S().values();
    const double shift   = integrate(g, d.P().values() * dS) / integrate(d.P());
    row.S_L2             = std::sqrt(integrate(g, (dS - shift).square()));
    const ComplexField psi_direct = madelung_forward(d);
    row.psi_L2 = std::sqrt(integrate(g, (psi_direct.values() - out.oracle.psi[i].values()).abs2()));
    out.max_P_L1   = std::max(out.max_P_L1, row.P_L1);
    out.max_S_L2   = std::max(out.max_S_L2, row.S_L2);
    out.max_psi_L2 = std::max(out.max_psi_L2, row.psi_L2);
    out.rows.push_back(row);
  }
  return out;
}

}  // namespace geomq
