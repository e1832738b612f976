#include "geomq/scenario.hpp"

#include <algorithm>
#include <cctype>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <numbers>
#include <set>
#include <sstream>

#include "geomq/canonical.hpp"
#include "geomq/csv.hpp"
#include "geomq/hilbert.hpp"
#include "geomq/infogeo.hpp"
#include "geomq/kahler.hpp"
#include "geomq/states.hpp"

namespace geomq::cli {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// names

namespace {

struct ScenarioInfo
{
  ScenarioKind kind;
  const char * name;
  const char * description;
};

const ScenarioInfo kScenarios[] = {
  {ScenarioKind::fisher_check, "fisher_check", "Fisher metric, Jeffreys line element and translation invariance"},
  {ScenarioKind::algebra_check, "algebra_check", "Galilean bracket relations and observable admissibility"},
  {ScenarioKind::kahler_check, "kahler_check", "Kahler conditions, intermediate J, defect detection, finite-dimensional j"},
  {ScenarioKind::flat_coords_check, "flat_coords_check", "Flat blocks in (psi, psi*) coordinates and the round trip"},
  {ScenarioKind::gaussian_spread, "gaussian_spread", "Free Gaussian packet width against the closed form"},
  {ScenarioKind::classical_advect, "classical_advect", "Rigid advection under the classical Hamiltonian"},
  {ScenarioKind::cross_validate, "cross_validate", "Direct (P, S) evolution against the wave-function oracle"},
  {ScenarioKind::dirac_check, "dirac_check", "Dirac product routes, sesquilinearity, symmetry, positivity, invariance"},
};

}  // namespace

std::string to_string(ScenarioKind kind)
{
  for (const auto & s : kScenarios) {
    if (s.kind == kind) { return s.name; }
  }
  return "unknown";
}

std::optional<ScenarioKind> parse_scenario(const std::string & name)
{
  for (const auto & s : kScenarios) {
    if (name == s.name) { return s.kind; }
  }
  return std::nullopt;
}

const std::vector<ScenarioKind> & all_scenarios()
{
  static const std::vector<ScenarioKind> kinds = [] {
    std::vector<ScenarioKind> v;
    for (const auto & s : kScenarios) { v.push_back(s.kind); }
    return v;
  }();
  return kinds;
}

std::string describe(ScenarioKind kind)
{
  for (const auto & s : kScenarios) {
    if (s.kind == kind) { return s.description; }
  }
  return "";
}

ConfigError::ConfigError(const std::string & what, int line)
    : std::runtime_error(line > 0 ? "line " + std::to_string(line) + ": " + what : what), line_(line)
{}

// ---------------------------------------------------------------------------
// parsing

namespace {

std::string trim(const std::string & s)
{
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) { return ""; }
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

std::vector<std::string> tokens(const std::string & value)
{
  std::string v = value;
  std::replace(v.begin(), v.end(), ',', ' ');
  std::istringstream ss(v);
  std::vector<std::string> out;
  std::string t;
  while (ss >> t) { out.push_back(t); }
  return out;
}

double to_double(const std::string & text, const std::string & key, int line)
{
  char * end     = nullptr;
  const double v = std::strtod(text.c_str(), &end);
  if (text.empty() || end != text.c_str() + text.size() || !std::isfinite(v)) {
    throw ConfigError("'" + key + "' expects a number, got '" + text + "'", line);
  }
  return v;
}

long long to_integer(const std::string & text, const std::string & key, int line)
{
  char * end        = nullptr;
  const long long v = std::strtoll(text.c_str(), &end, 10);
  if (text.empty() || end != text.c_str() + text.size()) {
    throw ConfigError("'" + key + "' expects an integer, got '" + text + "'", line);
  }
  return v;
}

std::vector<double> to_doubles(const std::string & text, const std::string & key, int line)
{
  std::vector<double> out;
  for (const auto & t : tokens(text)) { out.push_back(to_double(t, key, line)); }
  if (out.empty() || out.size() > 3) { throw ConfigError("'" + key + "' expects 1 to 3 numbers", line); }
  return out;
}

Point to_point(const std::string & text, const std::string & key, int line)
{
  const auto v = to_doubles(text, key, line);
  Point p{0.0, 0.0, 0.0};
  std::copy(v.begin(), v.end(), p.begin());
  return p;
}

const std::map<std::string, std::set<std::string>> kKeys = {
  {"scenario", {"name", "seed", "output_dir"}},
  {"grid", {"dim", "extent", "points", "boundary", "derivative"}},
  {"physics", {"mass", "alpha", "time"}},
  {"initial_state", {"family", "center", "sigma", "momentum", "path"}},
  {"evolution", {"hamiltonian", "integrator", "dt", "steps", "save_every", "cfl", "horizon"}},
};

const std::vector<std::pair<std::string, std::string>> kRequired = {
  {"scenario", "name"},
  {"grid", "dim"},
  {"grid", "extent"},
  {"grid", "points"},
  {"physics", "mass"},
  {"physics", "alpha"},
};

const std::set<std::string> kFamilies = {
  "gaussian", "periodized_gaussian", "uniform", "random_compact", "random_periodic", "csv"};

void apply(ScenarioConfig & c, const std::string & section, const std::string & key, const std::string & value,
  int line)
{
  const std::string name = section + "." + key;
  if (name == "scenario.name") {
    const auto kind = parse_scenario(value);
    if (!kind) { throw ConfigError("unknown scenario '" + value + "'", line); }
    c.scenario = *kind;
  } else if (name == "scenario.seed") {
    const long long s = to_integer(value, key, line);
    if (s < 0) { throw ConfigError("'seed' must be non-negative", line); }
    c.seed = static_cast<std::uint64_t>(s);
  } else if (name == "scenario.output_dir") {
    c.output_dir = value;
  } else if (name == "grid.dim") {
    c.dim = static_cast<int>(to_integer(value, key, line));
  } else if (name == "grid.extent") {
    c.extent = to_doubles(value, key, line);
  } else if (name == "grid.points") {
    c.points.clear();
    for (const auto & t : tokens(value)) { c.points.push_back(static_cast<int>(to_integer(t, key, line))); }
    if (c.points.empty() || c.points.size() > 3) { throw ConfigError("'points' expects 1 to 3 integers", line); }
  } else if (name == "grid.boundary") {
    if (value == "periodic") {
      c.boundary = Boundary::periodic;
    } else if (value == "vanishing") {
      c.boundary = Boundary::vanishing;
    } else {
      throw ConfigError("'boundary' must be periodic or vanishing", line);
    }
  } else if (name == "grid.derivative") {
    if (value == "central") {
      c.derivative = DerivativeScheme::central;
    } else if (value == "spectral") {
      c.derivative = DerivativeScheme::spectral;
    } else {
      throw ConfigError("'derivative' must be central or spectral", line);
    }
  } else if (name == "physics.mass") {
    c.mass = c.evolution.mass = to_double(value, key, line);
  } else if (name == "physics.alpha") {
    c.alpha = c.evolution.alpha = to_double(value, key, line);
  } else if (name == "physics.time") {
    c.time = to_double(value, key, line);
  } else if (name == "initial_state.family") {
    if (!kFamilies.count(value)) { throw ConfigError("unknown initial_state family '" + value + "'", line); }
    c.initial.family = value;
  } else if (name == "initial_state.center") {
    c.initial.center = to_point(value, key, line);
  } else if (name == "initial_state.sigma") {
    c.initial.sigma = to_double(value, key, line);
  } else if (name == "initial_state.momentum") {
    c.initial.momentum = to_point(value, key, line);
  } else if (name == "initial_state.path") {
    c.initial.path = value;
  } else if (name == "evolution.hamiltonian") {
    if (value == "quantum_free") {
      c.evolution.hamiltonian = HamiltonianKind::quantum_free;
    } else if (value == "classical_free") {
      c.evolution.hamiltonian = HamiltonianKind::classical_free;
    } else {
      throw ConfigError("'hamiltonian' must be quantum_free or classical_free", line);
    }
  } else if (name == "evolution.integrator") {
    if (value == "rk4_PS") {
      c.evolution.integrator = Integrator::rk4_PS;
    } else if (value == "crank_nicolson_psi") {
      c.evolution.integrator = Integrator::crank_nicolson_psi;
    } else {
      throw ConfigError("'integrator' must be rk4_PS or crank_nicolson_psi", line);
    }
  } else if (name == "evolution.dt") {
    c.evolution.dt = to_double(value, key, line);
  } else if (name == "evolution.steps") {
    c.evolution.steps = static_cast<int>(to_integer(value, key, line));
  } else if (name == "evolution.save_every") {
    c.evolution.save_every = static_cast<int>(to_integer(value, key, line));
  } else if (name == "evolution.cfl") {
    c.evolution.cfl = to_double(value, key, line);
  } else if (name == "evolution.horizon") {
    c.horizon = to_double(value, key, line);
  }
}

}  // namespace

ScenarioConfig parse_config(std::istream & in)
{
  ScenarioConfig c;
  std::string section;
  std::string raw;
  int line = 0;
  while (std::getline(in, raw)) {
    ++line;
    const auto comment = raw.find_first_of("#;");
    const std::string text = trim(comment == std::string::npos ? raw : raw.substr(0, comment));
    if (text.empty()) { continue; }
    if (text.front() == '[') {
      if (text.back() != ']') { throw ConfigError("unterminated section header", line); }
      section = trim(text.substr(1, text.size() - 2));
      if (!kKeys.count(section)) { throw ConfigError("unknown section [" + section + "]", line); }
      if (!c.lines.emplace("[" + section + "]", line).second) {
        throw ConfigError("duplicate section [" + section + "]", line);
      }
      continue;
    }
    const auto eq = text.find('=');
    if (eq == std::string::npos) { throw ConfigError("expected 'key = value'", line); }
    if (section.empty()) { throw ConfigError("key outside of any section", line); }
    const std::string key   = trim(text.substr(0, eq));
    const std::string value = trim(text.substr(eq + 1));
    if (!kKeys.at(section).count(key)) { throw ConfigError("unknown key '" + key + "' in [" + section + "]", line); }
    if (value.empty()) { throw ConfigError("'" + key + "' has no value", line); }
    if (!c.lines.emplace(section + "." + key, line).second) {
      throw ConfigError("duplicate key '" + key + "' in [" + section + "]", line);
    }
    apply(c, section, key, value, line);
  }
  for (const auto & [sec, key] : kRequired) {
    if (c.lines.count(sec + "." + key)) { continue; }
    const auto header = c.lines.find("[" + sec + "]");
    if (header == c.lines.end()) {
      throw ConfigError("missing section [" + sec + "] (needed for '" + key + "')", line);
    }
    throw ConfigError("[" + sec + "] is missing required key '" + key + "'", header->second);
  }
  return c;
}

ScenarioConfig load_config(const fs::path & path)
{
  std::ifstream in(path);
  if (!in) { throw ConfigError("cannot open config file " + path.string()); }
  ScenarioConfig c = parse_config(in);
  if (!c.initial.path.empty() && c.initial.path.is_relative()) {
    c.initial.path = path.parent_path() / c.initial.path;
  }
  return c;
}

GridSpec ScenarioConfig::grid() const
{
  std::vector<double> e(dim);
  std::vector<int> n(dim);
  for (int k = 0; k < dim; ++k) {
    e[k] = extent.size() == 1 ? extent[0] : extent.at(k);
    n[k] = points.size() == 1 ? points[0] : points.at(k);
  }
  std::vector<double> origin(dim);
  for (int k = 0; k < dim; ++k) { origin[k] = -0.5 * e[k]; }
  return GridSpec(e, n, boundary, derivative, origin);
}

std::vector<std::pair<std::string, std::string>> ScenarioConfig::parameters() const
{
  auto list = [](const auto & v) {
    std::string s;
    for (std::size_t i = 0; i < v.size(); ++i) {
      if (i) { s += ' '; }
      if constexpr (std::is_same_v<std::decay_t<decltype(v[i])>, double>) {
        s += csv::number(v[i]);
      } else {
        s += std::to_string(v[i]);
      }
    }
    return s;
  };
  auto point = [&](const Point & p) { return list(std::vector<double>(p.begin(), p.begin() + dim)); };
  return {
    {"scenario", to_string(scenario)},
    {"seed", std::to_string(seed)},
    {"dim", std::to_string(dim)},
    {"extent", list(extent)},
    {"points", list(points)},
    {"boundary", geomq::to_string(boundary)},
    {"derivative", geomq::to_string(derivative)},
    {"mass", csv::number(mass)},
    {"alpha", csv::number(alpha)},
    {"time", csv::number(time)},
    {"family", initial.family},
    {"center", point(initial.center)},
    {"sigma", csv::number(initial.sigma)},
    {"momentum", point(initial.momentum)},
    {"path", initial.path.generic_string()},
    {"hamiltonian", geomq::to_string(evolution.hamiltonian)},
    {"integrator", geomq::to_string(evolution.integrator)},
    {"dt", csv::number(evolution.dt)},
    {"steps", std::to_string(evolution.steps)},
    {"save_every", std::to_string(evolution.save_every)},
    {"cfl", csv::number(evolution.cfl)},
    {"horizon", csv::number(horizon)},
  };
}

// ---------------------------------------------------------------------------
// validation

namespace {

int line_of(const ScenarioConfig & c, const std::string & key)
{
  const auto it = c.lines.find(key);
  if (it != c.lines.end()) { return it->second; }
  const auto section = c.lines.find("[" + key.substr(0, key.find('.')) + "]");
  return section != c.lines.end() ? section->second : 0;
}

bool is_dynamic(ScenarioKind k)
{
  return k == ScenarioKind::gaussian_spread || k == ScenarioKind::classical_advect
      || k == ScenarioKind::cross_validate || k == ScenarioKind::dirac_check;
}

}  // namespace

void validate(const ScenarioConfig & c)
{
  auto fail = [&](const std::string & what, const std::string & key) { throw ConfigError(what, line_of(c, key)); };

  if (c.dim < 1 || c.dim > 3) { fail("'dim' must be 1, 2 or 3", "grid.dim"); }
  if (c.extent.size() != 1 && static_cast<int>(c.extent.size()) != c.dim) {
    fail("'extent' needs one value or one per axis", "grid.extent");
  }
  if (c.points.size() != 1 && static_cast<int>(c.points.size()) != c.dim) {
    fail("'points' needs one value or one per axis", "grid.points");
  }
  for (double e : c.extent) {
    if (!(e > 0.0)) { fail("'extent' must be positive", "grid.extent"); }
  }
  for (int n : c.points) {
    if (n < 8) { fail("'points' must be at least 8 per axis", "grid.points"); }
  }
  if (!(c.mass > 0.0)) { fail("'mass' must be positive", "physics.mass"); }
  if (!(c.alpha > 0.0)) { fail("'alpha' must be positive", "physics.alpha"); }
  if (!(c.initial.sigma > 0.0)) { fail("'sigma' must be positive", "initial_state.sigma"); }

  const std::string & fam = c.initial.family;
  if (fam == "periodized_gaussian") {
    if (c.boundary != Boundary::periodic) { fail("periodized_gaussian needs a periodic grid", "initial_state.family"); }
    if (c.initial.momentum != Point{0.0, 0.0, 0.0}) {
      fail("periodized_gaussian carries no momentum", "initial_state.momentum");
    }
  }
  if (fam == "csv") {
    if (c.initial.path.empty()) { fail("family csv needs 'path'", "initial_state.family"); }
    if (!fs::exists(c.initial.path)) { fail("state file " + c.initial.path.string() + " does not exist", "initial_state.path"); }
  }

  switch (c.scenario) {
    case ScenarioKind::gaussian_spread:
      if (fam != "gaussian") { fail("gaussian_spread needs family gaussian", "initial_state.family"); }
      if (c.evolution.hamiltonian != HamiltonianKind::quantum_free) {
        fail("gaussian_spread needs the quantum_free Hamiltonian", "evolution.hamiltonian");
      }
      break;
    case ScenarioKind::classical_advect:
      if (fam != "gaussian") { fail("classical_advect needs family gaussian", "initial_state.family"); }
      if (c.evolution.hamiltonian != HamiltonianKind::classical_free) {
        fail("classical_advect needs the classical_free Hamiltonian", "evolution.hamiltonian");
      }
      if (c.evolution.integrator != Integrator::rk4_PS) {
        fail("classical_advect integrates with rk4_PS", "evolution.integrator");
      }
      break;
    case ScenarioKind::cross_validate:
      if (c.evolution.hamiltonian != HamiltonianKind::quantum_free) {
        fail("cross_validate needs the quantum_free Hamiltonian", "evolution.hamiltonian");
      }
      if (!(c.horizon >= 0.0)) { fail("'horizon' must be non-negative", "evolution.horizon"); }
      break;
    default: break;
  }

  if (is_dynamic(c.scenario)) {
    if (!c.lines.count("evolution.dt")) { fail("[evolution] is missing required key 'dt'", "evolution.dt"); }
    if (c.scenario != ScenarioKind::cross_validate || c.horizon == 0.0) {
      if (!c.lines.count("evolution.steps")) { fail("[evolution] is missing required key 'steps'", "evolution.steps"); }
      if (c.evolution.steps < 1) { fail("'steps' must be at least 1", "evolution.steps"); }
    }
    EvolutionConfig e = c.evolution;
    if (c.scenario == ScenarioKind::dirac_check) { e.integrator = Integrator::crank_nicolson_psi; }
    if (c.scenario == ScenarioKind::cross_validate) { e.integrator = Integrator::rk4_PS; }
    try {
      e.validate(c.grid());
    } catch (const std::invalid_argument & err) {
      fail(err.what(), "evolution.dt");
    }
  }
}

// ---------------------------------------------------------------------------
// running

bool RunResult::passed() const
{
  return std::all_of(checks.begin(), checks.end(), [](const Check & c) { return c.passed(); });
}

void write_summary(std::ostream & out, const std::vector<Check> & checks)
{
  csv::Table t({"check", "value", "tolerance", "status"});
  for (const auto & c : checks) {
    t.add_row({c.name, csv::number(c.value), csv::number(c.tolerance), c.passed() ? "PASS" : "FAIL"});
  }
  t.write(out);
}

namespace {

class Runner
{
public:
  Runner(const ScenarioConfig & config, fs::path dir) : c(config), grid(config.grid())
  {
    result.output_dir = std::move(dir);
  }

  const ScenarioConfig & c;
  const GridSpec grid;
  RunResult result;

  void check(std::string name, double value, double tolerance, bool at_least = false)
  {
    result.checks.push_back({std::move(name), value, tolerance, at_least});
  }

  void save(const fs::path & relative, const std::function<void(std::ostream &)> & body)
  {
    const fs::path full = result.output_dir / relative;
    csv::save(full, body);
    result.files.push_back(full);
  }

  void save_table(const fs::path & relative, const csv::Table & t)
  {
    save(relative, [&](std::ostream & out) { t.write(out); });
  }

  EnsembleState initial_state() const
  {
    const auto & in = c.initial;
    if (in.family == "gaussian") { return gaussian_state(grid, in.center, in.sigma, in.momentum, c.alpha); }
    if (in.family == "periodized_gaussian") { return periodized_gaussian_state(grid, in.center, in.sigma, c.alpha); }
    if (in.family == "uniform") { return uniform_state(grid, in.momentum, c.alpha); }
    if (in.family == "random_compact") { return random_compact_state(grid, c.seed, c.alpha); }
    if (in.family == "random_periodic") { return random_periodic_state(grid, c.seed, c.alpha); }
    std::ifstream f(in.path);
    if (!f) { throw std::runtime_error("cannot open state file " + in.path.string()); }
    return csv::read_state(f, grid, c.alpha);
  }

  void snapshots(const Trajectory & traj)
  {
    for (std::size_t i = 0; i < traj.states.size(); ++i) {
      const long step = std::lround(traj.times[i] / c.evolution.dt);
      char name[32];
      std::snprintf(name, sizeof(name), "state_%06ld.csv", step);
      save(fs::path("snapshots") / name, [&](std::ostream & out) { csv::write_state(out, traj.states[i]); });
    }
  }

  void conserved(const fs::path & relative, const std::vector<ConservedRow> & rows)
  {
    save(relative, [&](std::ostream & out) { write_conserved(out, rows); });
  }
};

// Smooth random field of order-one amplitude, built from low-order Fourier modes.
ScalarField smooth_random_field(const GridSpec & grid, Rng & rng, double amplitude)
{
  Eigen::ArrayXd v = Eigen::ArrayXd::Constant(grid.size(), amplitude * rng.uniform(-1.0, 1.0));
  for (int k = 0; k < grid.dim(); ++k) {
    const Eigen::ArrayXd th = 2.0 * std::numbers::pi * (grid.coordinates(k) - grid.origin(k)) / grid.extent(k);
    for (int m = 1; m <= 2; ++m) {
      v += amplitude / m * (rng.uniform(-1.0, 1.0) * (m * th).cos() + rng.uniform(-1.0, 1.0) * (m * th).sin());
    }
  }
  return ScalarField(grid, std::move(v));
}

void fisher_check(Runner & r)
{
  const EnsembleState s = r.initial_state();
  const ScalarField & P = s.P();
  const double a        = s.alpha();
  const int n           = r.grid.dim();
  const ParamMetric gamma = fisher_metric_translation(P, a);
  r.save("metric.csv", [&](std::ostream & out) { write_metric(out, gamma); });

  Rng rng(r.c.seed + 1);
  std::vector<ScalarField> dP;
  for (int j = 0; j < n; ++j) { dP.push_back(gradient(P, j)); }
  csv::Table lines({"trial", "contracted", "line_element", "relative_difference"});
  double worst = 0.0;
  for (int trial = 0; trial < 8; ++trial) {
    Eigen::VectorXd delta(n);
    Eigen::ArrayXd dp = Eigen::ArrayXd::Zero(P.size());
    for (int j = 0; j < n; ++j) {
      delta(j) = rng.uniform(-1.0, 1.0);
      dp += delta(j) * dP[j].values();
    }
    const double contracted = gamma.contract(delta);
    const double ds2        = jeffreys_line_element(P, ScalarField(r.grid, dp), a).value;
    const double rel        = std::abs(ds2 - contracted) / std::max(std::abs(contracted), 1e-300);
    worst                   = std::max(worst, rel);
    lines.add_row({std::to_string(trial), csv::number(contracted), csv::number(ds2), csv::number(rel)});
  }
  r.save_table("line_element.csv", lines);
  r.check("fisher_vs_line_element", worst, 1e-6);

  // Whole-cell shifts; on a vanishing grid the shifted-in samples come from the far edge, where P is negligible.
  const GridSpec periodic = r.grid.with_boundary(Boundary::periodic);
  const ScalarField moved = translate(ScalarField(periodic, P.values()), {3, -2, 1});
  const ParamMetric shifted = fisher_metric_translation(ScalarField(r.grid, moved.values()), a);
  const double scale = gamma.entries.cwiseAbs().maxCoeff();
  r.check("translation_invariance", (shifted.entries - gamma.entries).cwiseAbs().maxCoeff() / scale, 1e-6);
  r.check("metric_psd_violation", std::max(0.0, -gamma.min_eigenvalue()) / scale, 1e-10);
  r.check("truncated_mass", gamma.truncated_mass, 1e-9);

  if (r.c.initial.family == "gaussian") {
    const double expected = 0.5 * a / (r.c.initial.sigma * r.c.initial.sigma);
    const Eigen::MatrixXd ref = expected * Eigen::MatrixXd::Identity(n, n);
    r.check("gaussian_closed_form", (gamma.entries - ref).cwiseAbs().maxCoeff() / expected, 1e-6);
  }
}

void algebra_check(Runner & r)
{
  const EnsembleState s = r.initial_state();
  const GeneratorSet gen = build_galilean_generators(r.grid.dim(), r.c.mass, r.c.time, r.c.evolution.hamiltonian);
  const AlgebraReport report = galilean_algebra_residual(gen, s);
  r.save("algebra.csv", [&](std::ostream & out) { write_algebra_report(out, report); });
  r.check("algebra_max_relative", report.max_relative, 1e-6);

  std::vector<Observable> obs{observables::normalization()};
  for (const auto * family : {&gen.Q, &gen.A, &gen.L, &gen.G}) {
    for (const auto & o : *family) {
      if (o) { obs.push_back(*o); }
    }
  }
  obs.push_back(gen.H);

  const double lambda = 2.5;
  const double shift  = 0.37 * s.alpha();
  csv::Table t({"observable", "gauge", "homogeneity", "density"});
  double gauge = 0.0, homog = 0.0, density = 0.0;
  for (const auto & o : obs) {
    const double value = o.value(s);
    const double g     = gauge_residual(o, s, shift) / std::max(1.0, std::abs(value));
    const auto h       = homogeneity_check(o, s, lambda);
    const double d     = h.density_relative.value_or(0.0);
    gauge              = std::max(gauge, g);
    homog              = std::max(homog, h.relative);
    density            = std::max(density, d);
    t.add_row({o.name, csv::number(g), csv::number(h.relative), csv::number(d)});
  }
  const Observable counter = observables::squared_normalization();
  const auto ch            = homogeneity_check(counter, s, lambda);
  t.add_row({counter.name, csv::number(gauge_residual(counter, s, shift)), csv::number(ch.relative), ""});
  r.save_table("admissibility.csv", t);
  r.check("max_gauge_residual", gauge, 1e-10);
  r.check("max_homogeneity_residual", homog, 1e-10);
  r.check("max_density_identity_residual", density, 1e-9);
  r.check("squared_normalization_nonhomogeneity_detected", ch.relative, 1e-3, true);
}

void kahler_check(Runner & r)
{
  const EnsembleState s = r.initial_state();
  Rng rng(r.c.seed + 2);
  const ScalarField A = smooth_random_field(r.grid, rng, 1.5);
  const KahlerTriple triple = build_general_triple(s.P(), A, s.alpha());
  const KahlerReport report = verify_kahler(triple);
  for (const auto & row : report.rows) { r.check(to_string(row.condition), row.max_residual, 1e-12); }

  const ScalarField A2 = smooth_random_field(r.grid, rng, 2.0);
  Eigen::ArrayXd C     = smooth_random_field(r.grid, rng, 2.0).values();
  C = C.sign() * (C.abs() + 0.1);
  r.check("intermediate_J_square", complex_structure_residual(intermediate_J(A2, ScalarField(r.grid, C))), 1e-13);

  KahlerTriple bad = triple;
  for (auto & g : bad.g) { g(1, 1) *= 1.01; }
  const KahlerReport defect = verify_kahler(bad);
  r.check("injected_defect_detected", defect[KahlerCondition::compatibility].max_residual, 1e-3, true);

  csv::Table app({"n", "kind", "square_residual", "hermitian_residual"});
  double compatible = 0.0, flagged = 1e300;
  for (int n = 2; n <= 10; n += 2) {
    Eigen::MatrixXd w0 = Eigen::MatrixXd::Zero(n, n);
    for (int p = 0; p < n / 2; ++p) {
      w0(2 * p, 2 * p + 1) = 1.0;
      w0(2 * p + 1, 2 * p) = -1.0;
    }
    Eigen::MatrixXd T = Eigen::MatrixXd::Identity(n, n);
    Eigen::MatrixXd B(n, n);
    for (Index i = 0; i < n * n; ++i) {
      T.data()[i] += 0.3 * rng.uniform(-1.0, 1.0);
      B.data()[i] = rng.uniform(-1.0, 1.0);
    }
    const AppendixResult good = appendix_construct(T.transpose() * w0 * T, T.transpose() * T);
    compatible = std::max({compatible, good.square_residual, good.hermitian_residual});
    app.add_row({std::to_string(n), "compatible", csv::number(good.square_residual), csv::number(good.hermitian_residual)});
    const Eigen::MatrixXd g = B.transpose() * B + 0.5 * Eigen::MatrixXd::Identity(n, n);
    const AppendixResult odd = appendix_construct(w0, g);
    flagged = std::min(flagged, std::max(odd.square_residual, odd.hermitian_residual));
    app.add_row({std::to_string(n), "random", csv::number(odd.square_residual), csv::number(odd.hermitian_residual)});
  }
  r.save_table("appendix.csv", app);
  r.check("appendix_compatible_residual", compatible, 1e-12);
  r.check("appendix_incompatible_detected", flagged, 1e-3, true);
  r.save("kahler.csv", [&](std::ostream & out) { write_kahler_report(out, report); });
}

void flat_coords_check(Runner & r)
{
  const EnsembleState s = r.initial_state();
  const double a        = s.alpha();
  const KahlerTriple triple = build_general_triple(s.P(), ScalarField::zero(r.grid), a);
  const FlatBlocks flat     = to_complex_coordinates(triple, s);
  const PSBlocks back       = from_complex_coordinates(flat, s);

  csv::Table t({"index", "omega_c", "g_c", "J_c", "roundtrip"});
  double dw = 0.0, dg = 0.0, dj = 0.0, rt = 0.0;
  for (std::size_t n = 0; n < flat.support.size(); ++n) {
    const double w  = (flat.omega_c[n] - flat_omega(a)).cwiseAbs().maxCoeff() / a;
    const double g  = (flat.g_c[n] - flat_metric(a)).cwiseAbs().maxCoeff() / a;
    const double j  = (flat.J_c[n] - flat_complex_structure()).cwiseAbs().maxCoeff();
    const double gs = triple.g[n].cwiseAbs().maxCoeff();
    const double js = triple.J[n].cwiseAbs().maxCoeff();
    const double b  = std::max({(back.omega[n] - triple.omega).cwiseAbs().maxCoeff(),
      (back.g[n] - triple.g[n]).cwiseAbs().maxCoeff() / gs, (back.J[n] - triple.J[n]).cwiseAbs().maxCoeff() / js});
    dw = std::max(dw, w);
    dg = std::max(dg, g);
    dj = std::max(dj, j);
    rt = std::max(rt, b);
    t.add_row({std::to_string(flat.support[n]), csv::number(w), csv::number(g), csv::number(j), csv::number(b)});
  }
  r.save_table("flat.csv", t);
  r.check("omega_c_flat", dw, 1e-12);
  r.check("g_c_flat", dg, 1e-12);
  r.check("J_c_flat", dj, 1e-12);
  r.check("roundtrip", rt, 1e-12);
}

void gaussian_spread(Runner & r)
{
  const EnsembleState s = r.initial_state();
  const Trajectory traj = evolve(s, r.c.evolution);
  const double s0       = r.c.initial.sigma;
  const double k        = r.c.alpha / (2.0 * r.c.mass * s0);
  csv::Table t({"t", "sigma_measured", "sigma_analytic", "relative_error"});
  double worst = 0.0, norm = 0.0;
  for (const auto & row : traj.conserved) {
    const double analytic = std::sqrt(s0 * s0 + k * k * row.t * row.t);
    const double rel      = std::abs(row.sigma - analytic) / analytic;
    worst                 = std::max(worst, rel);
    norm                  = std::max(norm, std::abs(row.norm - 1.0));
    t.add_row(std::vector<double>{row.t, row.sigma, analytic, rel});
  }
  r.save_table("spread.csv", t);
  r.conserved("conserved.csv", traj.conserved);
  r.snapshots(traj);
  r.check("sigma_max_relative_error", worst, 1e-4);
  r.check("norm_drift", norm, 1e-9);
}

void classical_advect(Runner & r)
{
  const EnsembleState s = r.initial_state();
  const Trajectory traj = evolve(s, r.c.evolution);
  const int n           = r.grid.dim();
  std::vector<double> w0(n);
  for (int j = 0; j < n; ++j) { w0[j] = rms_width(s.P(), j); }

  std::vector<std::string> header{"t"};
  for (const auto & x : csv::coordinate_columns(n)) {
    header.push_back("center_" + x);
    header.push_back("expected_" + x);
    header.push_back("width_" + x);
  }
  csv::Table t(header);
  double center = 0.0, width = 0.0, dx = r.grid.spacing(0);
  for (int j = 1; j < n; ++j) { dx = std::min(dx, r.grid.spacing(j)); }
  for (std::size_t i = 0; i < traj.states.size(); ++i) {
    const double time = traj.times[i];
    std::vector<double> row{time};
    double err2 = 0.0;
    for (int j = 0; j < n; ++j) {
      const double c   = mean_position(traj.states[i].P(), j);
      const double exp = r.c.initial.center[j] + r.c.initial.momentum[j] / r.c.mass * time;
      const double w   = rms_width(traj.states[i].P(), j);
      err2 += (c - exp) * (c - exp);
      width = std::max(width, std::abs(w - w0[j]) / w0[j]);
      row.insert(row.end(), {c, exp, w});
    }
    center = std::max(center, std::sqrt(err2));
    t.add_row(row);
  }
  r.save_table("advect.csv", t);
  r.conserved("conserved.csv", traj.conserved);
  r.snapshots(traj);
  r.check("center_max_error", center, dx);
  r.check("width_max_relative_change", width, 1e-3);
}

void cross_validate_scenario(Runner & r)
{
  const EnsembleState s = r.initial_state();
  const double horizon  = r.c.horizon > 0.0 ? r.c.horizon : r.c.evolution.steps * r.c.evolution.dt;
  const CrossValidation cv = cross_validate(s, r.c.evolution, horizon);

  csv::Table t({"t", "P_L1", "S_L2", "psi_L2"});
  for (const auto & row : cv.rows) { t.add_row(std::vector<double>{row.t, row.P_L1, row.S_L2, row.psi_L2}); }
  r.save_table("discrepancy.csv", t);
  r.conserved("conserved.csv", cv.direct.conserved);
  r.conserved("oracle_conserved.csv", cv.oracle.conserved);
  r.snapshots(cv.direct);

  const auto & d  = cv.direct.conserved;
  const double H0 = d.front().H;
  double energy = 0.0, momentum = 0.0, oracle_norm = 0.0;
  const double pscale = std::sqrt(2.0 * r.c.mass * std::abs(H0));
  for (const auto & row : d) {
    energy = std::max(energy, std::abs(row.H - H0) / std::abs(H0));
    for (int j = 0; j < 3; ++j) { momentum = std::max(momentum, std::abs(row.A[j] - d.front().A[j]) / pscale); }
  }
  for (const auto & row : cv.oracle.conserved) { oracle_norm = std::max(oracle_norm, std::abs(row.norm - 1.0)); }
  const double growth = cv.oracle.conserved.back().sigma / cv.oracle.conserved.front().sigma - 1.0;

  r.check("psi_L2_discrepancy", cv.max_psi_L2, 1e-4);
  r.check("direct_renormalization_rate", cv.direct.renormalization_rate, 1e-9);
  r.check("oracle_norm_drift", oracle_norm, 1e-9);
  r.check("direct_energy_drift", energy, 1e-6);
  r.check("direct_momentum_drift", momentum, 1e-6);
  r.check("sigma_growth", growth, 0.5, true);
}

void dirac_check(Runner & r)
{
  const double a = r.c.alpha;
  const double dV = r.grid.cell_volume();
  Rng rng(r.c.seed + 3);
  auto rand_c = [&] { return Complex(rng.uniform(-1.0, 1.0), rng.uniform(-1.0, 1.0)); };

  csv::Table t({"pair", "re", "im", "route_difference"});
  double routes = 0.0, sesqui = 0.0, herm = 0.0, pos = 0.0, invariance = 0.0;
  const int pairs = 20;
  for (int p = 0; p < pairs; ++p) {
    const std::uint64_t base = r.c.seed * 1000 + 3 * static_cast<std::uint64_t>(p);
    const ComplexField phi   = random_complex_field(r.grid, base);
    const ComplexField psi   = random_complex_field(r.grid, base + 1);
    const ComplexField chi   = random_complex_field(r.grid, base + 2);
    const double scale       = norm(phi, a) * norm(psi, a);

    const Complex ip     = dirac_product(phi, psi, a);
    const Complex direct = dV * (phi.values().conjugate() * psi.values()).sum();
    const double diff    = std::abs(ip - direct) / scale;
    routes               = std::max(routes, diff);
    t.add_row({std::to_string(p), csv::number(ip.real()), csv::number(ip.imag()), csv::number(diff)});

    const Complex x = rand_c(), y = rand_c();
    const ComplexField mix = phi.with_values(x * phi.values() + y * chi.values());
    const Complex lhs      = dirac_product(mix, psi, a);
    const Complex rhs      = std::conj(x) * ip + std::conj(y) * dirac_product(chi, psi, a);
    const double mscale    = (std::abs(x) * norm(phi, a) + std::abs(y) * norm(chi, a)) * norm(psi, a);
    sesqui                 = std::max(sesqui, std::abs(lhs - rhs) / mscale);
    const ComplexField mix2 = psi.with_values(x * psi.values() + y * chi.values());
    const Complex lhs2      = dirac_product(phi, mix2, a);
    const Complex rhs2      = x * ip + y * dirac_product(phi, chi, a);
    const double m2scale    = norm(phi, a) * (std::abs(x) * norm(psi, a) + std::abs(y) * norm(chi, a));
    sesqui                  = std::max(sesqui, std::abs(lhs2 - rhs2) / m2scale);

    herm = std::max(herm, std::abs(ip - std::conj(dirac_product(psi, phi, a))) / scale);
    const Complex pp = dirac_product(psi, psi, a);
    pos = std::max(pos, (std::max(0.0, -pp.real()) + std::abs(pp.imag())) / std::abs(pp));

    if (p < 3) {
      const WaveTrajectory tp = evolve_wavefunction(phi, r.c.evolution);
      const WaveTrajectory ts = evolve_wavefunction(psi, r.c.evolution);
      for (std::size_t i = 0; i < tp.psi.size(); ++i) {
        invariance = std::max(invariance, std::abs(dirac_product(tp.psi[i], ts.psi[i], a) - ip) / scale);
      }
    }
  }
  r.save_table("dirac.csv", t);

  const EnsembleState s = r.initial_state();
  r.check("routes_agree", routes, 1e-12);
  r.check("sesquilinearity", sesqui, 1e-12);
  r.check("hermitian_symmetry", herm, 1e-12);
  r.check("positivity_violation", pos, 1e-12);
  r.check("normalized_state_norm", std::abs(norm(madelung_forward(s), a) - 1.0), 1e-9);
  r.check("evolution_invariance", invariance, 1e-8);
}

}  // namespace

RunResult run(const ScenarioConfig & config)
{
  fs::path dir = config.output_dir;
  if (const char * env = std::getenv(kOutputDirEnv); env && *env) { dir = env; }
  Runner r(config, dir);
  switch (config.scenario) {
    case ScenarioKind::fisher_check: fisher_check(r); break;
    case ScenarioKind::algebra_check: algebra_check(r); break;
    case ScenarioKind::kahler_check: kahler_check(r); break;
    case ScenarioKind::flat_coords_check: flat_coords_check(r); break;
    case ScenarioKind::gaussian_spread: gaussian_spread(r); break;
    case ScenarioKind::classical_advect: classical_advect(r); break;
    case ScenarioKind::cross_validate: cross_validate_scenario(r); break;
    case ScenarioKind::dirac_check: dirac_check(r); break;
  }
  csv::Table params({"key", "value"});
  for (const auto & [k, v] : config.parameters()) { params.add_row({k, v}); }
  r.save_table("parameters.csv", params);
  r.save("summary.csv", [&](std::ostream & out) { write_summary(out, r.result.checks); });
  return r.result;
}

}  // namespace geomq::cli
